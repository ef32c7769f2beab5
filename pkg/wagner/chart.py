"""Adapted coordinates of a contact structure.

A chart of dimension ``n = 2m+1`` is described by the coefficients
``gamma[a]`` of its contact form ``dx^n + gamma[a] dx^a``. The adapted frame
is ``e_a = d/dx^a - gamma[a] d/dx^n`` and the fundamental 2-form is read off
the frame bracket ``[e_a, e_b] = omega[b][a] d/dx^n``.

Indices of arrays are 0-based; the ``a`` arguments of the public functions
are 1-based like the coordinate names.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import expr, jets
from .errors import ConfigurationError, DegenerateContactError, ShapeMismatchError
from .options import EngineOptions

logger = logging.getLogger(__name__)

PRESETS = {
    'HEIS5': (2, ('-x2', '0', '-x4', '0')),
}


def base_name(i):
    """Name of the 1-based base coordinate ``i``."""
    return 'x%d' % i


def fiber_name(a):
    return 'v%d' % a


@dataclass(frozen=True)
class Chart:
    """Contact structure in adapted coordinates.

    Args:
        m (int): Half-rank; the base has dimension ``2m+1``.
        gamma (tuple): ``2m`` expression trees of the contact form
            coefficients, in the base variables only.
        domain_hint (tuple): Optional ``(lo, hi)`` pairs bounding the sampling
            box of each base coordinate.
        name (str): Preset name or a label.
        allow_m1 (bool): Accept ``m = 1``.
    """
    m: int
    gamma: tuple
    domain_hint: tuple = None
    name: str = 'inline'
    allow_m1: bool = False

    def __post_init__(self):
        minimum = 1 if self.allow_m1 else 2
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < minimum:
            raise ConfigurationError(
                'chart half-rank m must be an integer >= %d, got %r' % (minimum, self.m))
        if len(self.gamma) != 2 * self.m:
            raise ConfigurationError('a chart with m=%d needs %d gamma coefficients, got %d'
                                     % (self.m, 2 * self.m, len(self.gamma)))
        permitted = set(self.base_names)
        for a, tree in enumerate(self.gamma, 1):
            stray = expr.free_variables(tree) - permitted
            if stray:
                raise ConfigurationError('gamma[%d] may only use %s, found %s'
                                         % (a, ', '.join(self.base_names),
                                            ', '.join(sorted(stray))))
        if self.domain_hint is not None and len(self.domain_hint) != self.n:
            raise ConfigurationError('domain_hint needs %d intervals, got %d'
                                     % (self.n, len(self.domain_hint)))

    @classmethod
    def from_expressions(cls, m, gamma, domain_hint=None, name='inline', allow_m1=False):
        names = tuple(base_name(i) for i in range(1, 2 * m + 2))
        trees = tuple(expr.parse(g, variables=names) if isinstance(g, str) else g
                      for g in gamma)
        if domain_hint is not None:
            domain_hint = tuple((float(lo), float(hi)) for lo, hi in domain_hint)
        return cls(m, trees, domain_hint, name, allow_m1)

    @classmethod
    def preset(cls, name, allow_m1=False):
        try:
            m, gamma = PRESETS[name]
        except KeyError:
            raise ConfigurationError('unknown chart preset %r; known: %s'
                                     % (name, ', '.join(sorted(PRESETS))))
        return cls.from_expressions(m, gamma, name=name, allow_m1=allow_m1)

    @property
    def n(self):
        return 2 * self.m + 1

    @property
    def reeb_name(self):
        return base_name(self.n)

    @property
    def base_names(self):
        return tuple(base_name(i) for i in range(1, self.n + 1))

    @property
    def fiber_names(self):
        return tuple(fiber_name(a) for a in range(1, 2 * self.m + 1))

    @property
    def gamma_variables(self):
        """Base variables the contact form actually depends on."""
        names = set()
        for tree in self.gamma:
            names |= expr.free_variables(tree)
        return names

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ShapeMismatchError('base point must have %d coordinates, got shape %s'
                                     % (self.n, x.shape))
        return x

    def gamma_values(self, bindings):
        return [expr.evaluate(tree, bindings) for tree in self.gamma]


@dataclass(frozen=True)
class FiberPoint:
    """Point of the slit bundle: base point ``x`` and admissible vector ``v``."""
    x: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, 'x', tuple(float(c) for c in self.x))
        object.__setattr__(self, 'v', tuple(float(c) for c in self.v))
        if not any(self.v):
            raise ConfigurationError('fiber vector must be nonzero at x=%s' % (list(self.x),))

    @property
    def x_array(self):
        return np.array(self.x)

    @property
    def v_array(self):
        return np.array(self.v)

    def scaled(self, factor):
        return FiberPoint(self.x, tuple(factor * c for c in self.v))

    def check(self, chart):
        if len(self.x) != chart.n or len(self.v) != 2 * chart.m:
            raise ShapeMismatchError(
                'fiber point (%d, %d) does not fit a chart with n=%d'
                % (len(self.x), len(self.v), chart.n))
        return self


def seed_bindings(names, values, active, order, nested=False):
    """Bindings with jets for the ``active`` names and floats for the rest."""
    active = tuple(name for name in names if name in active)
    bindings = {}
    if active:
        space = jets.make_space(active, order, nested)
    for name, value in zip(names, values):
        if name in active:
            bindings[name] = space.seed(name, float(value))
        else:
            bindings[name] = float(value)
    return bindings


def apply_frame(f, a, gammas, reeb_name):
    """``e_a f`` for a jet ``f`` with 0-based frame index ``a``."""
    return jets.partial(f, base_name(a + 1)) - gammas[a] * jets.partial(f, reeb_name)


def omega_lower(chart, gammas):
    """Matrix ``lower[b][a] = e_b gamma[a] - e_a gamma[b]`` from gamma jets."""
    size = 2 * chart.m
    reeb = chart.reeb_name
    lower = np.empty((size, size), dtype=object)
    frames = [[apply_frame(gammas[a], b, gammas, reeb) for a in range(size)]
              for b in range(size)]
    for b in range(size):
        for a in range(size):
            lower[b, a] = frames[b][a] - frames[a][b]
    return lower


def omega_upper(lower, options=None):
    options = options or EngineOptions()
    upper = jets.inv(lower)
    if options.omega_inverse_transpose:
        upper = upper.T.copy()
    return upper


def _check_rank(chart, x, lower_values):
    rank = np.linalg.matrix_rank(lower_values)
    if rank < 2 * chart.m:
        raise DegenerateContactError(x, rank)


def frame_derivative(chart, f, a, x, v=None, order=0):
    """``(d_a f - gamma[a] d_n f)`` at ``x``.

    Args:
        chart (Chart): Adapted chart.
        f: Expression tree or text in the chart's variables.
        a (int): 1-based frame index.
        x: Base point.
        v: Fiber vector, required when ``f`` uses fiber variables.
        order (int): With ``order > 0`` the jet of ``e_a f`` of that order is
            returned, over every variable ``f`` and gamma depend on.

    Returns:
        float or Jet
    """
    if isinstance(f, str):
        f = expr.parse(f, chart.m)
    if not 1 <= a <= 2 * chart.m:
        raise ConfigurationError('frame index must be in [1, %d], got %r' % (2 * chart.m, a))
    x = chart.check_point(x)
    names = chart.base_names
    values = list(x)
    if v is not None:
        names = names + chart.fiber_names
        values += list(np.asarray(v, dtype=float))
    active = expr.free_variables(f) | chart.gamma_variables | {base_name(a), chart.reeb_name}
    bindings = seed_bindings(names, values, active, order + 1)
    gammas = chart.gamma_values(bindings)
    result = apply_frame(expr.evaluate(f, bindings), a - 1, gammas, chart.reeb_name)
    if order == 0:
        return jets.value_of(result)
    return result


def omega(chart, x, options=None):
    """Fundamental 2-form at ``x`` and its inverse.

    Returns:
        tuple: ``(lower, upper)`` float matrices, ``lower[b][a] = omega_ba``
        and ``upper`` normalized by ``upper @ lower = identity`` (or its
        transpose with ``omega_inverse_transpose``).

    Raises:
        DegenerateContactError: omega has rank below ``2m`` at ``x``.
    """
    x = chart.check_point(x)
    bindings = seed_bindings(chart.base_names, x, chart.gamma_variables, 1)
    lower = jets.values(omega_lower(chart, chart.gamma_values(bindings)))
    _check_rank(chart, x, lower)
    return lower, omega_upper(lower, options)


def dlambda(chart, x):
    """Components ``dlambda(e_a, e_b)`` from the coordinate derivatives of the
    contact form; equals ``omega(chart, x)[0]`` on a consistent chart."""
    x = chart.check_point(x)
    n, size = chart.n, 2 * chart.m
    bindings = seed_bindings(chart.base_names, x, chart.gamma_variables, 1)
    gammas = chart.gamma_values(bindings)
    # coefficients of lambda in coordinates; the last one is the constant 1
    coeffs = list(gammas) + [1.0]
    grad = np.array([[jets.extract(c, (base_name(i + 1),)) for i in range(n)]
                     for c in coeffs])
    full = grad.T - grad
    g = np.array([jets.value_of(c) for c in gammas])
    lower = np.empty((size, size))
    for a in range(size):
        for b in range(size):
            lower[a, b] = (full[a, b] - g[b] * full[a, n - 1]
                           - g[a] * full[n - 1, b])
    return lower


def reeb_defect(chart, x):
    """``(d_n gamma[a])(x)``; all zero iff ``d/dx^n`` is the Reeb field at ``x``."""
    x = chart.check_point(x)
    bindings = seed_bindings(chart.base_names, x, (chart.reeb_name,), 1)
    return np.array([jets.extract(g, (chart.reeb_name,))
                     for g in chart.gamma_values(bindings)])


def validate_chart(chart, points, options=None):
    """Contact rank and Reeb defect at every base point.

    Returns:
        list of dict: one entry per point with ``x``, ``rank``,
        ``reeb_defect`` and ``passed``.
    """
    results = []
    for x in points:
        x = chart.check_point(x)
        bindings = seed_bindings(chart.base_names, x, chart.gamma_variables, 1)
        lower = jets.values(omega_lower(chart, chart.gamma_values(bindings)))
        rank = int(np.linalg.matrix_rank(lower))
        passed = rank == 2 * chart.m
        if not passed:
            logger.warning('omega has rank %d at x=%s', rank, list(x))
        results.append({'x': list(x), 'rank': rank,
                        'reeb_defect': list(reeb_defect(chart, x)),
                        'passed': passed})
    return results


def reeb_derivative(field, x, reeb_index):
    """``d/dx^n`` of the components of a field given as a callable.

    Args:
        field: Callable taking the list of base coordinates (floats and one
            jet) and returning an array of components.
        x: Base point.
        reeb_index (int): 1-based index ``n`` of the Reeb coordinate.

    Returns:
        numpy.ndarray: float components of the derivative.
    """
    x = np.asarray(x, dtype=float)
    name = base_name(reeb_index)
    coords = list(x)
    coords[reeb_index - 1] = jets.seed_variable(name, x[reeb_index - 1], 1)
    components = np.asarray(field(coords), dtype=object)
    return np.array([jets.extract(c, (name,)) for c in components.flat]).reshape(
        components.shape)


def _tensor_apply(matrix, t, axis):
    moved = np.tensordot(matrix, t, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


@dataclass(frozen=True, eq=False)
class AdaptedTransition:
    """Affine adapted transition ``x^a -> A x + b``, ``x^n -> x^n + c``."""
    A: np.ndarray
    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ShapeMismatchError('transition needs a square A and matching b, got %s and %s'
                                     % (A.shape, b.shape))
        if abs(np.linalg.det(A)) < 1e-12:
            raise ConfigurationError('transition matrix A is singular')
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'c', float(self.c))

    @classmethod
    def identity(cls, m):
        return cls(np.eye(2 * m), np.zeros(2 * m), 0.0)

    @classmethod
    def random(cls, m, rng, max_condition=10.0):
        """Well-conditioned random transition drawn from a numpy Generator."""
        size = 2 * m
        while True:
            A = np.eye(size) + rng.uniform(-0.5, 0.5, (size, size))
            if np.linalg.cond(A) <= max_condition:
                break
        return cls(A, rng.uniform(-1, 1, size), float(rng.uniform(-1, 1)))

    @property
    def m(self):
        return self.A.shape[0] // 2

    def inverse(self):
        A_inv = np.linalg.inv(self.A)
        return AdaptedTransition(A_inv, -A_inv.dot(self.b), -self.c)

    def apply(self, x):
        """Image of a base point; entries may be jets."""
        x = np.asarray(x, dtype=object if any(jets.is_jet(c) for c in x) else float)
        size = 2 * self.m
        if x.shape != (size + 1,):
            raise ShapeMismatchError('base point must have %d coordinates, got shape %s'
                                     % (size + 1, x.shape))
        head = self.A.dot(x[:size]) + self.b
        return np.concatenate([head, [x[size] + self.c]])

    def apply_inverse(self, x):
        return self.inverse().apply(x)


def pushforward_admissible(t, tr, p, q, x=None):
    """Components of an admissible ``(p, q)`` tensor in the image chart.

    Contravariant slots come first and transform with ``A``; covariant slots
    transform with the inverse Jacobian.

    Returns:
        The transformed components, or ``(components, image point)`` when the
        base point ``x`` is given.
    """
    t = np.asarray(t)
    size = tr.A.shape[0]
    if t.shape != (size,) * (p + q):
        raise ShapeMismatchError('components of shape %s do not match a (%d, %d) tensor '
                                 'over %d indices' % (t.shape, p, q, size))
    if t.dtype == object:
        A, A_inv_T = tr.A.astype(object), np.linalg.inv(tr.A).T.astype(object)
    else:
        A, A_inv_T = tr.A, np.linalg.inv(tr.A).T
    for axis in range(p):
        t = _tensor_apply(A, t, axis)
    for axis in range(p, p + q):
        t = _tensor_apply(A_inv_T, t, axis)
    if x is None:
        return t
    return t, tr.apply(x)
