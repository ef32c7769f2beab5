"""Truncated multivariate Taylor jets.

A :class:`Jet` holds the Taylor coefficients of a smooth function around a
point, over the directions declared by its :class:`JetSpace`, truncated at
total order ``space.order``. A space may carry a nested first-order layer: one
further derivative along any single direction on top of ``order``, which is
what lets a fourth-order pipeline also report the gradient of its result.

Directions are named after the coordinates they differentiate: ``x1..xn`` are
base directions, ``v1..v2m`` fiber directions, anything else (the curve
parameter ``t``) is a parameter direction.
"""

import functools
import itertools
import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, OrderOverflowError

MAX_ORDER = 4

BASE = 'base'
FIBER = 'fiber'
PARAMETER = 'parameter'
_KIND_RANK = {BASE: 0, FIBER: 1, PARAMETER: 2}


def direction_kind(name):
    if name[1:].isdigit():
        if name[0] == 'x':
            return BASE
        if name[0] == 'v':
            return FIBER
    return PARAMETER


def _direction_key(name):
    kind = direction_kind(name)
    index = int(name[1:]) if kind != PARAMETER else 0
    return (_KIND_RANK[kind], index, name)


def canonical_directions(names):
    return tuple(sorted(set(names), key=_direction_key))


# Monomials are exponent tuples of width 2d: d primary exponents followed by d
# exponents of the nested layer (all zero unless the space is nested).

@functools.lru_cache(maxsize=None)
def _monomials(d, order, nested):
    width = 2 * d
    monos = []
    for degree in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(d), degree):
            alpha = [0] * width
            for i in combo:
                alpha[i] += 1
            monos.append(tuple(alpha))
    if nested:
        primary = list(monos)
        for j in range(d):
            for alpha in primary:
                mono = list(alpha)
                mono[d + j] = 1
                monos.append(tuple(mono))
    return tuple(monos)


@functools.lru_cache(maxsize=None)
def _index(d, order, nested):
    return {mono: k for k, mono in enumerate(_monomials(d, order, nested))}


@functools.lru_cache(maxsize=None)
def _product_table(d, order, nested):
    monos = _monomials(d, order, nested)
    index = _index(d, order, nested)
    left, right, target = [], [], []
    for k, gamma in enumerate(monos):
        support = [i for i, e in enumerate(gamma) if e]
        for parts in itertools.product(*[range(gamma[i] + 1) for i in support]):
            alpha = list(gamma)
            beta = list(gamma)
            for i, e in zip(support, parts):
                alpha[i] = e
                beta[i] = gamma[i] - e
            left.append(index[tuple(alpha)])
            right.append(index[tuple(beta)])
            target.append(k)
    return (np.array(left, dtype=np.intp),
            np.array(right, dtype=np.intp),
            np.array(target, dtype=np.intp))


@functools.lru_cache(maxsize=None)
def _shift_map(d, order, nested, slot):
    if slot < d:
        target = (d, order - 1, nested)
    else:
        target = (d, order, False)
    source_index = _index(d, order, nested)
    sources, factors = [], []
    for gamma in _monomials(*target):
        mono = list(gamma)
        mono[slot] += 1
        sources.append(source_index[tuple(mono)])
        factors.append(float(mono[slot]))
    return np.array(sources, dtype=np.intp), np.array(factors)


@functools.lru_cache(maxsize=None)
def _restriction_map(d, order, nested, target_order, target_nested):
    source_index = _index(d, order, nested)
    return np.array([source_index[mono]
                     for mono in _monomials(d, target_order, target_nested)],
                    dtype=np.intp)


@functools.lru_cache(maxsize=None)
def _embedding_map(source_dirs, target_dirs, order, nested):
    ds, dt = len(source_dirs), len(target_dirs)
    position = {name: k for k, name in enumerate(target_dirs)}
    target_index = _index(dt, order, nested)
    mapped = []
    for mono in _monomials(ds, order, nested):
        image = [0] * (2 * dt)
        for i, name in enumerate(source_dirs):
            image[position[name]] = mono[i]
            image[dt + position[name]] = mono[ds + i]
        mapped.append(target_index[tuple(image)])
    return np.array(mapped, dtype=np.intp)


def _multiply(space, a, b):
    left, right, target = _product_table(space.dimension, space.order, space.nested)
    return np.bincount(target, weights=a[left] * b[right], minlength=space.size)


@dataclass(frozen=True)
class JetSpace:
    """Active directions and truncation of a family of jets.

    Args:
        directions (tuple): Names of the active directions, canonically ordered.
        order (int): Truncation order of the primary layer.
        nested (bool): Whether a nested first-order layer is carried.
    """
    directions: tuple
    order: int
    nested: bool = False

    def __post_init__(self):
        if self.order < 0:
            raise ConfigurationError('jet order must be non-negative, got %r' % self.order)
        if len(set(self.directions)) != len(self.directions):
            raise ConfigurationError('duplicate jet directions in %r' % (self.directions,))

    @property
    def dimension(self):
        return len(self.directions)

    @property
    def degree(self):
        """Highest total degree a monomial of this space can have."""
        return self.order + (1 if self.nested else 0)

    @property
    def size(self):
        return len(_monomials(self.dimension, self.order, self.nested))

    @functools.cached_property
    def _positions(self):
        return {name: k for k, name in enumerate(self.directions)}

    def position(self, name):
        return self._positions.get(name)

    def lowered(self):
        return make_space(self.directions, self.order - 1, self.nested)

    def meet(self, other):
        """Largest space both jets can be represented in exactly."""
        if self.directions == other.directions:
            directions = self.directions
        else:
            directions = canonical_directions(self.directions + other.directions)
        return make_space(directions, min(self.order, other.order),
                          self.nested and other.nested)

    def constant(self, value):
        coeffs = np.zeros(self.size)
        coeffs[0] = value
        return Jet(self, coeffs)

    def zeros(self):
        return Jet(self, np.zeros(self.size))

    def seed(self, name, value):
        """Jet of the coordinate function ``name`` at ``value``."""
        pos = self.position(name)
        if pos is None:
            raise ConfigurationError('%r is not a direction of this space' % name)
        if self.order < 1:
            raise ConfigurationError('cannot seed a variable in an order-0 space')
        d = self.dimension
        index = _index(d, self.order, self.nested)
        coeffs = np.zeros(self.size)
        coeffs[0] = value
        mono = [0] * (2 * d)
        mono[pos] = 1
        coeffs[index[tuple(mono)]] = 1.0
        if self.nested:
            mono[pos] = 0
            mono[d + pos] = 1
            coeffs[index[tuple(mono)]] = 1.0
        return Jet(self, coeffs)


@functools.lru_cache(maxsize=None)
def make_space(directions, order, nested=False):
    """Shared :class:`JetSpace` for the given directions and truncation."""
    return JetSpace(canonical_directions(directions), int(order), bool(nested))


class Jet(object):
    """Truncated Taylor expansion of a scalar function around a point.

    Jets are immutable values; every operation returns a new jet. Arithmetic
    between jets of different spaces happens in their meet, so a product of
    an order-3 and an order-1 jet is an order-1 jet.
    """
    __slots__ = ('space', 'coeffs')
    __array_priority__ = 1000

    def __init__(self, space, coeffs):
        self.space = space
        self.coeffs = coeffs

    @property
    def value(self):
        return float(self.coeffs[0])

    @property
    def order(self):
        return self.space.order

    def __repr__(self):
        return 'Jet(value=%r, directions=%r, order=%d%s)' % (
            self.value, self.space.directions, self.space.order,
            ', nested' if self.space.nested else '')

    def _coeffs_in(self, space):
        own = self.space
        if own is space:
            return self.coeffs
        if own.directions == space.directions:
            if own.order == space.order and own.nested == space.nested:
                return self.coeffs
            return self.coeffs[_restriction_map(own.dimension, own.order, own.nested,
                                                space.order, space.nested)]
        restricted = self.coeffs
        if own.order != space.order or own.nested != space.nested:
            restricted = restricted[_restriction_map(own.dimension, own.order, own.nested,
                                                     space.order, space.nested)]
        coeffs = np.zeros(space.size)
        coeffs[_embedding_map(own.directions, space.directions,
                              space.order, space.nested)] = restricted
        return coeffs

    def in_space(self, space):
        return Jet(space, self._coeffs_in(space))

    def _pair(self, other):
        if other.space is self.space:
            return self.space, self.coeffs, other.coeffs
        space = self.space.meet(other.space)
        return space, self._coeffs_in(space), other._coeffs_in(space)

    def __add__(self, other):
        if isinstance(other, Jet):
            space, a, b = self._pair(other)
            return Jet(space, a + b)
        if isinstance(other, numbers.Real):
            coeffs = self.coeffs.copy()
            coeffs[0] += other
            return Jet(self.space, coeffs)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            space, a, b = self._pair(other)
            return Jet(space, a - b)
        if isinstance(other, numbers.Real):
            coeffs = self.coeffs.copy()
            coeffs[0] -= other
            return Jet(self.space, coeffs)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Real):
            coeffs = -self.coeffs
            coeffs[0] += other
            return Jet(self.space, coeffs)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            space, a, b = self._pair(other)
            return Jet(space, _multiply(space, a, b))
        if isinstance(other, numbers.Real):
            return Jet(self.space, self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, numbers.Real):
            if other == 0:
                raise DomainError('division of a jet by zero')
            return Jet(self.space, self.coeffs / float(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Real):
            return self.reciprocal() * other
        return NotImplemented

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        if isinstance(exponent, numbers.Real):
            if float(exponent).is_integer():
                return self._integer_power(int(exponent))
            return self._real_power(float(exponent))
        return NotImplemented

    def __rpow__(self, base):
        if isinstance(base, numbers.Real):
            if base <= 0:
                raise DomainError('non-positive base %r raised to a jet power' % base)
            return exp(self * math.log(base))
        return NotImplemented

    def _nilpotent(self):
        coeffs = self.coeffs.copy()
        coeffs[0] = 0.0
        return coeffs

    def _compose(self, derivatives):
        """f(self) from the derivatives f(a0), f'(a0), ... of a univariate f."""
        space = self.space
        tail = self._nilpotent()
        top = len(derivatives) - 1
        coeffs = np.zeros(space.size)
        coeffs[0] = derivatives[top] / math.factorial(top)
        for k in range(top - 1, -1, -1):
            coeffs = _multiply(space, coeffs, tail)
            coeffs[0] += derivatives[k] / math.factorial(k)
        return Jet(space, coeffs)

    def _integer_power(self, k):
        if k < 0:
            return self._integer_power(-k).reciprocal()
        result = self.space.constant(1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _real_power(self, p):
        a0 = self.value
        if a0 <= 0:
            raise DomainError('non-integer power %r of non-positive value %r' % (p, a0))
        derivatives = []
        falling = 1.0
        for k in range(self.space.degree + 1):
            derivatives.append(falling * a0 ** (p - k))
            falling *= (p - k)
        return self._compose(derivatives)

    def reciprocal(self):
        a0 = self.value
        if a0 == 0:
            raise DomainError('division by a jet with zero value')
        return self._compose([(-1) ** k * math.factorial(k) / a0 ** (k + 1)
                              for k in range(self.space.degree + 1)])

    def partial(self, name):
        """Jet of the partial derivative along ``name``, one order lower."""
        space = self.space
        if space.order == 0:
            raise OrderOverflowError(
                'cannot differentiate an order-0 jet along %r' % name)
        target = space.lowered()
        pos = space.position(name)
        if pos is None:
            return target.zeros()
        sources, factors = _shift_map(space.dimension, space.order, space.nested, pos)
        return Jet(target, self.coeffs[sources] * factors)

    def nested_partial(self, name):
        """Derivative along ``name`` carried by the nested layer."""
        space = self.space
        if not space.nested:
            raise OrderOverflowError('jet has no nested layer to differentiate along %r' % name)
        target = make_space(space.directions, space.order, False)
        pos = space.position(name)
        if pos is None:
            return target.zeros()
        sources, factors = _shift_map(space.dimension, space.order, True,
                                      space.dimension + pos)
        return Jet(target, self.coeffs[sources] * factors)

    def truncate(self, order, nested=None):
        if nested is None:
            nested = self.space.nested
        if order > self.space.order or (nested and not self.space.nested):
            raise OrderOverflowError('cannot raise the truncation of a jet')
        return self.in_space(make_space(self.space.directions, order, nested))


def seed_variable(index, value, order=1, directions=None, nested=False):
    """Jet of the coordinate function ``index`` at ``value``.

    Args:
        index (str): Direction name, e.g. ``'x1'`` or ``'v2'``.
        value (float): Point of expansion.
        order (int): Truncation order, between 1 and ``MAX_ORDER``.
        directions (iterable): Other active directions of the evaluation
            context; defaults to ``index`` alone.
        nested (bool): Carry the nested first-order layer.
    """
    if isinstance(order, bool) or not isinstance(order, numbers.Integral) \
            or not 1 <= order <= MAX_ORDER:
        raise ConfigurationError(
            'seed order must be an integer in [1, %d], got %r' % (MAX_ORDER, order))
    names = (index,) if directions is None else tuple(directions) + (index,)
    return make_space(names, order, nested).seed(index, float(value))


def extract(jet, idx=()):
    """Mixed partial derivative of ``jet`` along the directions in ``idx``.

    The result is the derivative itself, not the Taylor coefficient.
    """
    if not isinstance(jet, Jet):
        if len(idx):
            return 0.0
        return float(jet)
    space = jet.space
    if len(idx) > space.order:
        raise OrderOverflowError('derivative of order %d requested from an order-%d jet'
                                 % (len(idx), space.order))
    d = space.dimension
    mono = [0] * (2 * d)
    for name in idx:
        pos = space.position(name)
        if pos is None:
            return 0.0
        mono[pos] += 1
    k = _index(d, space.order, space.nested)[tuple(mono)]
    scale = 1
    for e in mono:
        scale *= math.factorial(e)
    return float(jet.coeffs[k]) * scale


def is_jet(x):
    return isinstance(x, Jet)


def value_of(x):
    return x.value if isinstance(x, Jet) else float(x)


def values(array):
    """Float array of the values of an array of jets or reals."""
    array = np.asarray(array, dtype=object)
    return np.array([value_of(e) for e in array.flat], dtype=float).reshape(array.shape)


def _degree(x):
    return x.space.degree if isinstance(x, Jet) else 0


def inv(matrix):
    """Inverse of a square matrix whose entries may be jets.

    Uses the terminating Neumann series around the value matrix, which is
    exact in truncated arithmetic.
    """
    matrix = np.asarray(matrix, dtype=object)
    degree = max(_degree(e) for e in matrix.flat)
    base = values(matrix)
    try:
        base_inv = np.linalg.inv(base)
    except np.linalg.LinAlgError:
        raise DomainError('matrix is singular at the expansion point')
    if degree == 0:
        return base_inv
    step = np.dot(-base_inv.astype(object), matrix - base.astype(object))
    term = base_inv.astype(object)
    result = term
    for _ in range(degree):
        term = np.dot(step, term)
        result = result + term
    return result


def _float_domain(name, x, ok):
    if not ok:
        raise DomainError('%s is not smooth at %r' % (name, x))


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.value)
        return x._compose([e] * (x.space.degree + 1))
    return math.exp(x)


def log(x):
    if isinstance(x, Jet):
        a0 = x.value
        _float_domain('log', a0, a0 > 0)
        derivatives = [math.log(a0)]
        for k in range(1, x.space.degree + 1):
            derivatives.append((-1) ** (k - 1) * math.factorial(k - 1) / a0 ** k)
        return x._compose(derivatives)
    _float_domain('log', x, x > 0)
    return math.log(x)


def sqrt(x):
    if isinstance(x, Jet):
        _float_domain('sqrt', x.value, x.value > 0)
        return x._real_power(0.5)
    _float_domain('sqrt', x, x > 0)
    return math.sqrt(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.value), math.cos(x.value)
        cycle = (s, c, -s, -c)
        return x._compose([cycle[k % 4] for k in range(x.space.degree + 1)])
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.value), math.cos(x.value)
        cycle = (c, -s, -c, s)
        return x._compose([cycle[k % 4] for k in range(x.space.degree + 1)])
    return math.cos(x)


def power(base, exponent):
    """``base ** exponent`` for reals or jets with the smoothness checks."""
    if isinstance(base, Jet) or isinstance(exponent, Jet):
        if not isinstance(base, Jet):
            return exponent.__rpow__(base)
        return base ** exponent
    if float(exponent).is_integer():
        k = int(exponent)
        if k < 0 and base == 0:
            raise DomainError('zero raised to the negative power %d' % k)
        return float(base) ** k
    _float_domain('non-integer power', base, base > 0)
    return float(base) ** float(exponent)


def divide(a, b):
    if not isinstance(b, Jet) and b == 0:
        raise DomainError('division by zero')
    return a / b


def partial(x, name):
    """``x.partial(name)`` for jets; constants differentiate to zero."""
    if isinstance(x, Jet):
        return x.partial(name)
    return 0.0


def nested_partial(x, name):
    if isinstance(x, Jet):
        return x.nested_partial(name)
    return 0.0
