import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wagner import jets
from wagner.errors import ConfigurationError, DomainError, OrderOverflowError


def _seeds(names, point, order, nested=False):
    return [jets.seed_variable(name, value, order, directions=names, nested=nested)
            for name, value in zip(names, point)]


def test_seed_variable():
    x = jets.seed_variable('x1', 2.0, 2)
    assert x.value == 2.0
    assert jets.extract(x, ('x1',)) == 1.0
    assert jets.extract(x, ('x1', 'x1')) == 0.0

    v = jets.seed_variable('v1', 0.0, 1)
    assert v.value == 0.0
    assert jets.extract(v, ('v1',)) == 1.0


@pytest.mark.parametrize('order', [0, 5, 1.5, True])
def test_seed_variable_rejects_order(order):
    with pytest.raises(ConfigurationError):
        jets.seed_variable('x1', 0.0, order)


def test_bilinear_product():
    x1, x2 = _seeds(('x1', 'x2'), (3.0, 5.0), 2)
    p = x1 * x2
    assert p.value == 15.0
    assert jets.extract(p, ('x1', 'x2')) == 1.0
    assert jets.extract(p, ('x1',)) == 5.0
    assert jets.extract(p, ('x2',)) == 3.0


def test_extract():
    v = jets.seed_variable('v1', 2.0, 3)
    assert jets.extract(v ** 3, ('v1', 'v1')) == pytest.approx(12.0)
    e = jets.exp(jets.seed_variable('x1', 0.0, 3))
    assert jets.extract(e, ('x1', 'x1', 'x1')) == pytest.approx(1.0)
    assert jets.extract(e) == e.value == 1.0
    # absent directions differentiate to zero
    assert jets.extract(e, ('x2',)) == 0.0
    assert jets.extract(4.0) == 4.0
    assert jets.extract(4.0, ('x1',)) == 0.0


def test_extract_past_truncation():
    x = jets.seed_variable('x1', 1.0, 2)
    with pytest.raises(OrderOverflowError):
        jets.extract(x ** 3, ('x1', 'x1', 'x1'))
    with pytest.raises(OrderOverflowError):
        jets.seed_variable('x1', 1.0, 1).partial('x1').partial('x1')


def test_mixed_orders_meet_at_lower_order():
    a = jets.seed_variable('x1', 1.0, 3)
    b = jets.seed_variable('v1', 2.0, 1)
    c = a * b
    assert c.order == 1
    assert set(c.space.directions) == {'x1', 'v1'}
    assert jets.extract(c, ('x1',)) == 2.0
    assert jets.extract(c, ('v1',)) == 1.0


def test_partial_lowers_order():
    x1, v1 = _seeds(('x1', 'v1'), (0.5, 2.0), 3)
    f = jets.exp(2 * x1) * v1 ** 2
    df = f.partial('v1')
    assert df.order == 2
    assert df.value == pytest.approx(2 * math.exp(1.0) * 2.0)
    assert jets.extract(df, ('x1', 'v1')) == pytest.approx(4 * math.exp(1.0))


def test_nested_layer_carries_one_more_derivative():
    names = ('x1', 'x2')
    x1, x2 = _seeds(names, (0.3, -0.2), 4, nested=True)
    f = jets.sin(x1) * jets.exp(x2)
    # fourth primary derivative, then one more through the nested layer
    d4 = f.partial('x1').partial('x1').partial('x1').partial('x1')
    d5 = jets.value_of(d4.nested_partial('x1'))
    assert d4.value == pytest.approx(math.sin(0.3) * math.exp(-0.2))
    assert d5 == pytest.approx(math.cos(0.3) * math.exp(-0.2))
    with pytest.raises(OrderOverflowError):
        jets.seed_variable('x1', 0.0, 2).nested_partial('x1')


def test_elementary_functions():
    x = jets.seed_variable('x1', 0.7, 4)
    for func, d in [(jets.sin, [math.sin, math.cos]), (jets.cos, [math.cos, lambda t: -math.sin(t)]),
                    (jets.exp, [math.exp, math.exp]), (jets.log, [math.log, lambda t: 1 / t]),
                    (jets.sqrt, [math.sqrt, lambda t: 0.5 / math.sqrt(t)])]:
        y = func(x)
        assert y.value == pytest.approx(d[0](0.7))
        assert jets.extract(y, ('x1',)) == pytest.approx(d[1](0.7))
    # second derivative of 1/x is 2/x^3
    assert jets.extract(1.0 / x, ('x1', 'x1')) == pytest.approx(2 / 0.7 ** 3)
    assert jets.extract(x ** 2.5, ('x1', 'x1')) == pytest.approx(2.5 * 1.5 * 0.7 ** 0.5)
    assert jets.extract(2.0 ** x, ('x1',)) == pytest.approx(math.log(2) * 2.0 ** 0.7)


def test_domain_errors():
    zero = jets.seed_variable('x1', 0.0, 2)
    with pytest.raises(DomainError):
        jets.log(zero)
    with pytest.raises(DomainError):
        jets.sqrt(zero)
    with pytest.raises(DomainError):
        1.0 / zero
    with pytest.raises(DomainError):
        zero ** 0.5
    with pytest.raises(DomainError):
        jets.divide(1.0, 0.0)
    with pytest.raises(DomainError):
        jets.power(-1.0, 0.5)
    with pytest.raises(DomainError):
        jets.power(0.0, -1)
    assert jets.power(-2.0, 3) == -8.0


def test_inverse_of_jet_matrix():
    names = ('x1', 'x2')
    x1, x2 = _seeds(names, (0.4, 0.1), 3)
    m = np.array([[2 + x1, x2], [x1 * x2, 1 + x2 ** 2]], dtype=object)
    inverse = jets.inv(m)
    product = np.dot(m, inverse)
    for i in range(2):
        for j in range(2):
            entry = product[i, j]
            assert entry.value == pytest.approx(1.0 if i == j else 0.0, abs=1e-14)
            for idx in [('x1',), ('x2',), ('x1', 'x2'), ('x2', 'x2', 'x2')]:
                assert jets.extract(entry, idx) == pytest.approx(0.0, abs=1e-12)


_coefficients = st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6)
_points = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=30, deadline=None)
@given(_coefficients, _points)
def test_polynomial_partials_are_exact(c, point):
    # p = c0 x^4 + c1 x^2 y z + c2 y^3 + c3 x y z + c4 z^2 + c5
    names = ('x1', 'x2', 'x3')
    x, y, z = _seeds(names, point, 4)
    p = c[0] * x ** 4 + c[1] * x ** 2 * y * z + c[2] * y ** 3 + c[3] * x * y * z \
        + c[4] * z ** 2 + c[5]
    a, b, d = point
    expected = {
        (): c[0] * a ** 4 + c[1] * a ** 2 * b * d + c[2] * b ** 3 + c[3] * a * b * d
            + c[4] * d ** 2 + c[5],
        ('x1',): 4 * c[0] * a ** 3 + 2 * c[1] * a * b * d + c[3] * b * d,
        ('x1', 'x1', 'x2', 'x3'): 2 * c[1],
        ('x1', 'x2', 'x3'): 2 * c[1] * a + c[3],
        ('x1', 'x1', 'x1', 'x1'): 24 * c[0],
        ('x2', 'x2', 'x2'): 6 * c[2],
        ('x3', 'x3'): 2 * c[4],
    }
    for idx, value in expected.items():
        assert jets.extract(p, idx) == pytest.approx(value, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(_points)
def test_smooth_partials_match_finite_differences(point):
    names = ('x1', 'x2', 'x3')

    def f(a, b, d, lib):
        return lib.exp(0.3 * a) * lib.sin(b) + lib.sqrt(2.0 + a * a + d * d)

    seeds = _seeds(names, point, 2)
    jet = f(*seeds, lib=jets)
    h = 1e-4
    for i, name in enumerate(names):
        up, down = list(point), list(point)
        up[i] += h
        down[i] -= h
        fd = (f(*up, lib=math) - f(*down, lib=math)) / (2 * h)
        assert jets.extract(jet, (name,)) == pytest.approx(fd, rel=1e-5, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(_points, _points)
def test_arithmetic_is_distributive(p, q):
    names = ('x1', 'v1')
    a, b = _seeds(names, p[:2], 3)
    c = jets.sin(a) + q[0] * b
    left = (a + b) * c
    right = a * c + b * c
    np.testing.assert_allclose(left.coeffs, right.coeffs, rtol=1e-13, atol=1e-13)
