import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wagner import expr, jets
from wagner.errors import (DomainError, ExprSyntaxError, UnboundVariableError,
                           UnknownIdentifierError)


def test_parse_sum_of_squares():
    tree = expr.parse('v1^2 + v2^2', m=2)
    assert tree == expr.BinOp('+', expr.BinOp('^', expr.Var('v1'), expr.Num(2.0)),
                              expr.BinOp('^', expr.Var('v2'), expr.Num(2.0)))
    assert expr.free_variables(tree) == {'v1', 'v2'}


def test_parse_negated_variable():
    assert expr.parse('-x2', m=2) == expr.Neg(expr.Var('x2'))


def test_precedence():
    # ^ binds tighter than unary minus, which binds tighter than * and +
    assert expr.parse('-x1^2') == expr.Neg(expr.BinOp('^', expr.Var('x1'), expr.Num(2.0)))
    assert expr.parse('2^3^2') == expr.BinOp(
        '^', expr.Num(2.0), expr.BinOp('^', expr.Num(3.0), expr.Num(2.0)))
    assert expr.parse('x1 - x2 - x3') == expr.BinOp(
        '-', expr.BinOp('-', expr.Var('x1'), expr.Var('x2')), expr.Var('x3'))
    assert expr.evaluate(expr.parse('2 + 3 * 4 ^ 2 / 8'), {}) == 8.0
    assert expr.evaluate(expr.parse('(2 + 3) * 2'), {}) == 10.0
    assert expr.evaluate(expr.parse('2^-1'), {}) == 0.5
    assert expr.evaluate(expr.parse('pi'), {}) == math.pi


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as info:
        expr.parse('v1 + * v2')
    assert info.value.offset == 5
    assert '-' in info.value.expected
    with pytest.raises(ExprSyntaxError):
        expr.parse('(v1 + v2')
    with pytest.raises(ExprSyntaxError):
        expr.parse('v1 $ v2')
    with pytest.raises(ExprSyntaxError):
        expr.parse('')


def test_unknown_identifiers():
    with pytest.raises(UnknownIdentifierError) as info:
        expr.parse('v5^2', m=2)
    assert info.value.name == 'v5'
    assert 'v4' in info.value.permitted
    with pytest.raises(UnknownIdentifierError) as info:
        expr.parse('abs(v1)')
    assert info.value.name == 'abs'
    with pytest.raises(UnknownIdentifierError):
        expr.parse('tanh(x1)')
    with pytest.raises(UnknownIdentifierError):
        expr.parse('x1 * t', variables=('t',))


def test_evaluate_floats():
    assert expr.evaluate(expr.parse('v1^2+v2^2+v3^2+v4^2'),
                         {'v1': 1.0, 'v2': 0.0, 'v3': 0.0, 'v4': 0.0}) == 1.0
    assert expr.evaluate(expr.parse('exp(2*x2)*v1^2'), {'x2': 0.0, 'v1': 3.0}) == 9.0


def test_evaluate_jets():
    v1 = jets.seed_variable('v1', 3.0, 2)
    value = expr.evaluate(expr.parse('v1^2'), {'v1': v1})
    assert jets.extract(value, ('v1', 'v1')) == 2.0


def test_evaluate_errors():
    with pytest.raises(UnboundVariableError):
        expr.evaluate(expr.parse('x1 + x2'), {'x1': 1.0})
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse('log(x1)'), {'x1': -1.0})
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse('1 / x1'), {'x1': 0.0})
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse('x1^0.5'), {'x1': -2.0})


def test_substitute():
    tree = expr.substitute(expr.parse('sin(t) + t^2', variables=('t',)),
                           {'t': expr.parse('1 - t', variables=('t',))})
    assert expr.evaluate(tree, {'t': 0.25}) == pytest.approx(math.sin(0.75) + 0.5625)


_leaves = st.one_of(
    st.sampled_from(['x1', 'x2', 'v1', 'v2']).map(expr.Var),
    st.floats(0, 10, allow_nan=False).map(expr.Num),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(['+', '-', '*', '/', '^']), children, children)
          .map(lambda t: expr.BinOp(*t)),
        children.map(expr.Neg),
        st.tuples(st.sampled_from(sorted(expr.FUNCTIONS)), children)
          .map(lambda t: expr.Call(*t)),
    )


_trees = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=200)
@given(_trees)
def test_print_parse_round_trip(tree):
    text = expr.to_text(tree)
    assert expr.parse(text) == tree
    assert expr.to_text(expr.parse(text)) == text


_names = ('x1', 'v1')


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 1.5), st.floats(-1.0, 1.0))
def test_jet_derivatives_match_finite_differences(a, b):
    tree = expr.parse('sqrt(x1^2 + v1^2 + 1) * exp(-x1 * v1) + sin(x1) / (1 + x1^2)')
    seeds = {n: jets.seed_variable(n, val, 1, directions=_names)
             for n, val in zip(_names, (a, b))}
    value = expr.evaluate(tree, seeds)
    h = 1e-5
    for name, point in zip(_names, (a, b)):
        up = {'x1': a, 'v1': b}
        down = dict(up)
        up[name] = point + h
        down[name] = point - h
        fd = (expr.evaluate(tree, up) - expr.evaluate(tree, down)) / (2 * h)
        assert jets.extract(value, (name,)) == pytest.approx(fd, rel=1e-6, abs=1e-8)
