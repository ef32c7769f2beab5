"""Deterministic JSON reports and CSV traces.

Floats are printed with 17 significant digits, which round-trips every
double, and keys keep their insertion order, so equal inputs give
byte-identical files.
"""

import csv
import io
import math
import numbers

import numpy as np

from . import __version__


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError('cannot serialize non-finite value %r' % x)
    return format(x, '.17g')


def _encode(obj, indent, level):
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if obj is None:
        return 'null'
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if isinstance(obj, numbers.Integral):
        return str(int(obj))
    if isinstance(obj, numbers.Real):
        return format_float(obj)
    if isinstance(obj, str):
        return _string(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = ['%s%s: %s' % (pad, _string(str(k)), _encode(v, indent, level + 1))
                 for k, v in obj.items()]
        return '{\n%s\n%s}' % (',\n'.join(items), end)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return '[%s]' % ', '.join(_encode(v, indent, level + 1) for v in obj)
        items = ['%s%s' % (pad, _encode(v, indent, level + 1)) for v in obj]
        return '[\n%s\n%s]' % (',\n'.join(items), end)
    raise TypeError('cannot serialize %s' % type(obj).__name__)


def _string(s):
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == '\\':
            out.append('\\\\')
        elif ch == '\n':
            out.append('\\n')
        elif ord(ch) < 0x20:
            out.append('\\u%04x' % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return ''.join(out)


def dumps(obj, indent=2):
    """JSON text of a report made of dicts, lists, numbers, strings and arrays."""
    return _encode(obj, indent, 0) + '\n'


def write_json(obj, path=None, stream=None):
    text = dumps(obj)
    if path is not None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    elif stream is not None:
        stream.write(text)
    return text


def envelope(command, options, manifest_path=None):
    """Header every report starts with."""
    return {
        'engine': 'wagner',
        'version': __version__,
        'command': command,
        'manifest': manifest_path,
        'options': options.to_dict(),
        'omega_inverse_convention': ('transpose' if options.omega_inverse_transpose
                                     else 'upper @ lower = identity'),
    }


def trace_header(chart):
    return ['t'] + list(chart.base_names) + list(chart.fiber_names) + ['F']


def trace_csv(result, chart, stream=None):
    """CSV text of a transport trace, ``t,x1..xn,v1..v2m,F``."""
    buffer = io.StringIO() if stream is None else stream
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(trace_header(chart))
    for t, x, v, F in result.trace:
        writer.writerow([format_float(c) for c in (t,) + tuple(x) + tuple(v) + (F,)])
    if stream is None:
        return buffer.getvalue()
    return None
