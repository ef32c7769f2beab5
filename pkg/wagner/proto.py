"""Protocol buffer messages of TensorBoard event files, scalar values only.

The classes are built at import time from a descriptor declared here, so no
generated ``_pb2`` modules are needed. Field numbers match TensorBoard's
``event.proto`` and ``summary.proto``.
"""

from google.protobuf import descriptor_pb2, descriptor_pool, message_factory

_PACKAGE = 'tensorboard'
_FILE = 'wagner/tensorboard_scalars.proto'

_OPTIONAL = descriptor_pb2.FieldDescriptorProto.LABEL_OPTIONAL
_REPEATED = descriptor_pb2.FieldDescriptorProto.LABEL_REPEATED
_DOUBLE = descriptor_pb2.FieldDescriptorProto.TYPE_DOUBLE
_FLOAT = descriptor_pb2.FieldDescriptorProto.TYPE_FLOAT
_INT64 = descriptor_pb2.FieldDescriptorProto.TYPE_INT64
_STRING = descriptor_pb2.FieldDescriptorProto.TYPE_STRING
_MESSAGE = descriptor_pb2.FieldDescriptorProto.TYPE_MESSAGE


def _field(message, name, number, kind, label=_OPTIONAL, type_name=None):
    f = message.field.add()
    f.name = name
    f.number = number
    f.type = kind
    f.label = label
    if type_name:
        f.type_name = type_name


def _file_descriptor():
    fd = descriptor_pb2.FileDescriptorProto()
    fd.name = _FILE
    fd.package = _PACKAGE
    fd.syntax = 'proto3'

    summary = fd.message_type.add()
    summary.name = 'Summary'
    value = summary.nested_type.add()
    value.name = 'Value'
    _field(value, 'tag', 1, _STRING)
    _field(value, 'simple_value', 2, _FLOAT)
    _field(summary, 'value', 1, _MESSAGE, _REPEATED, '.%s.Summary.Value' % _PACKAGE)

    event = fd.message_type.add()
    event.name = 'Event'
    _field(event, 'wall_time', 1, _DOUBLE)
    _field(event, 'step', 2, _INT64)
    _field(event, 'file_version', 3, _STRING)
    _field(event, 'summary', 5, _MESSAGE, type_name='.%s.Summary' % _PACKAGE)
    return fd


def _message_class(descriptor):
    if hasattr(message_factory, 'GetMessageClass'):
        return message_factory.GetMessageClass(descriptor)
    return message_factory.MessageFactory().GetPrototype(descriptor)


_POOL = descriptor_pool.DescriptorPool()
_POOL.AddSerializedFile(_file_descriptor().SerializeToString())

Summary = _message_class(_POOL.FindMessageTypeByName('%s.Summary' % _PACKAGE))
Event = _message_class(_POOL.FindMessageTypeByName('%s.Event' % _PACKAGE))
