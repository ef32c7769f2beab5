import io
import math

import numpy as np
import pytest

from wagner import report
from wagner.options import EngineOptions
from wagner.transport import TransportResult


def test_format_float():
    assert report.format_float(0.1) == '0.10000000000000001'
    assert report.format_float(1.0) == '1'
    assert float(report.format_float(1 / 3)) == 1 / 3
    with pytest.raises(ValueError):
        report.format_float(math.nan)
    with pytest.raises(ValueError):
        report.format_float(-math.inf)


def test_dumps_keeps_key_order():
    text = report.dumps({'b': 1, 'a': [1.5, True, None], 'c': {'z': 'x"y'}})
    assert text.index('"b"') < text.index('"a"') < text.index('"c"')
    assert '[1.5, true, null]' in text
    assert '"x\\"y"' in text
    assert text.endswith('}\n')


def test_dumps_arrays():
    text = report.dumps({'K': np.array([[0.0, 1.0], [-1.0, 0.0]]), 'n': np.int64(3),
                         'ok': np.bool_(True)})
    assert '[0, 1]' in text and '[-1, 0]' in text
    assert '"n": 3' in text
    assert '"ok": true' in text


def test_dumps_rejects():
    with pytest.raises(ValueError):
        report.dumps({'x': np.array([np.inf])})
    with pytest.raises(TypeError):
        report.dumps({'x': object()})


def test_dumps_is_deterministic():
    doc = {'x': [0.1 * k for k in range(10)], 'nested': [{'a': 1e-300}]}
    assert report.dumps(doc) == report.dumps(doc)


def test_envelope():
    envelope = report.envelope('eval', EngineOptions(), 'm.json')
    assert list(envelope)[:4] == ['engine', 'version', 'command', 'manifest']
    assert envelope['options']['eq22_sigma'] == 1.0
    assert envelope['omega_inverse_convention'] == 'upper @ lower = identity'
    transposed = report.envelope('eval', EngineOptions(omega_inverse_transpose=True))
    assert transposed['omega_inverse_convention'] == 'transpose'


def test_trace_csv(heis5):
    result = TransportResult('interior', [(0.0, (0, 0, 0, 0, 0), (1, 0, 0, 0), 1.0),
                                          (0.5, (0.1, 0, 0, 0, 0), (0.9, 0, 0, 0), 0.81)])
    lines = report.trace_csv(result, heis5).splitlines()
    assert lines[0] == 't,x1,x2,x3,x4,x5,v1,v2,v3,v4,F'
    assert lines[2] == '0.5,0.10000000000000001,0,0,0,0,0.90000000000000002,0,0,0,' \
                       '0.81000000000000005'
    stream = io.StringIO()
    assert report.trace_csv(result, heis5, stream) is None
    assert stream.getvalue().count('\n') == 3
