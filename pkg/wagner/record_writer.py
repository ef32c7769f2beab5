"""
Length-prefixed, checksummed records as read by TensorBoard's event loader.
"""

import struct

from .crc32c import crc32c


class RecordWriter(object):
    def __init__(self, path):
        self.path = path
        self._writer = None
        self._writer = open(path, 'wb')

    def write(self, event_str):
        w = self._writer.write
        header = struct.pack('<Q', len(event_str))
        w(header)
        w(struct.pack('<I', masked_crc32c(header)))
        w(event_str)
        w(struct.pack('<I', masked_crc32c(event_str)))

    def flush(self):
        if self._writer is not None:
            self._writer.flush()

    def close(self):
        if self._writer is not None:
            self._writer.close()
            self._writer = None

    def __del__(self):
        self.close()


def masked_crc32c(data):
    x = u32(crc32c(data))
    return u32(((x >> 15) | u32(x << 17)) + 0xa282ead8)


def u32(x):
    return x & 0xffffffff


def read_records(path):
    """Payloads of every record in ``path``; checksums are verified."""
    records = []
    with open(path, 'rb') as f:
        while True:
            header = f.read(8)
            if not header:
                break
            (length,) = struct.unpack('<Q', header)
            (header_crc,) = struct.unpack('<I', f.read(4))
            if header_crc != masked_crc32c(header):
                raise ValueError('corrupt record header in %s' % path)
            payload = f.read(length)
            (payload_crc,) = struct.unpack('<I', f.read(4))
            if payload_crc != masked_crc32c(payload):
                raise ValueError('corrupt record payload in %s' % path)
            records.append(payload)
    return records
