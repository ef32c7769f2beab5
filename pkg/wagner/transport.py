"""Parallel transport of admissible vectors along curves.

The velocity of a curve splits as ``xdot = u^a e_a + theta d/dx^n`` with
``u^a = xdot^a`` and ``theta = xdot^n + gamma_a xdot^a``. Transport solves

    vdot^b = -G^b_a(x, v) u^a - theta G^b_n(x, v)

with the classical fourth-order Runge-Kutta scheme at a fixed step. In
``interior`` mode the curve must be admissible and the second term is absent.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import expr, jets
from .chart import FiberPoint
from .connection import solver_for
from .errors import ConfigurationError, DomainError, InadmissibleCurveError

logger = logging.getLogger(__name__)

MODES = ('interior', 'extended')
ADMISSIBILITY_TOLERANCE = 1e-8
# transport aborts once F falls below this fraction of its initial value
COLLAPSE_RATIO = 1e-12


@dataclass(frozen=True)
class Curve:
    """Curve ``t -> x(t)`` in the base, one expression of ``t`` per coordinate."""
    components: tuple
    t_span: tuple
    samples: int
    label: str = 'curve'

    def __post_init__(self):
        t0, t1 = self.t_span
        if not t0 < t1:
            raise ConfigurationError('curve %s needs t0 < t1, got %r' % (self.label, self.t_span))
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) \
                or self.samples < 1:
            raise ConfigurationError('curve %s needs a positive integer sample count, got %r'
                                     % (self.label, self.samples))
        for tree in self.components:
            stray = expr.free_variables(tree) - {'t'}
            if stray:
                raise ConfigurationError('curve %s may only use t, found %s'
                                         % (self.label, ', '.join(sorted(stray))))

    @classmethod
    def from_expressions(cls, components, t_span, samples, label='curve'):
        trees = tuple(expr.parse(c, variables=('t',)) if isinstance(c, str) else c
                      for c in components)
        return cls(trees, (float(t_span[0]), float(t_span[1])), int(samples), label)

    @property
    def dimension(self):
        return len(self.components)

    def with_samples(self, samples):
        return Curve(self.components, self.t_span, samples, self.label)

    def reversed(self):
        """The same path traversed from ``t1`` back to ``t0``."""
        t0, t1 = self.t_span
        flip = {'t': expr.BinOp('-', expr.Num(t0 + t1), expr.Var('t'))}
        return Curve(tuple(expr.substitute(c, flip) for c in self.components),
                     self.t_span, self.samples, self.label + ' reversed')

    def state(self, t):
        """Position and velocity at ``t``."""
        seed = jets.seed_variable('t', t, 1)
        position = np.empty(self.dimension)
        velocity = np.empty(self.dimension)
        for i, tree in enumerate(self.components):
            value = expr.evaluate(tree, {'t': seed})
            position[i] = jets.value_of(value)
            velocity[i] = jets.extract(value, ('t',)) if jets.is_jet(value) else 0.0
        return position, velocity

    def grid(self):
        t0, t1 = self.t_span
        step = (t1 - t0) / self.samples
        return [t0 + k * step for k in range(self.samples)] + [t1], step


def _check_curve(chart, curve):
    if curve.dimension != chart.n:
        raise ConfigurationError('curve %s has %d components, the chart needs %d'
                                 % (curve.label, curve.dimension, chart.n))


def _theta(chart, x, xdot):
    bindings = dict(zip(chart.base_names, x))
    gammas = np.array([jets.value_of(g) for g in chart.gamma_values(bindings)])
    return xdot[chart.n - 1] + gammas.dot(xdot[:chart.n - 1])


def admissibility_defect(chart, curve, t):
    """``theta(xdot(t)) = xdot^n + gamma_a(x(t)) xdot^a``; zero iff admissible at ``t``."""
    _check_curve(chart, curve)
    x, xdot = curve.state(t)
    return float(_theta(chart, x, xdot))


@dataclass
class TransportResult:
    """Trace of a transport, one row ``(t, x, v, F)`` per grid point."""
    mode: str
    trace: list = field(default_factory=list)
    F_drift: float = 0.0

    @property
    def final_v(self):
        return np.array(self.trace[-1][2])


def _worst_defect(chart, curve):
    grid, step = curve.grid()
    probes = grid + [t + 0.5 * step for t in grid[:-1]]
    worst, worst_t = 0.0, probes[0]
    for t in probes:
        defect = abs(admissibility_defect(chart, curve, t))
        if defect > worst:
            worst, worst_t = defect, t
    return worst, worst_t


def transport(fm, chart, curve, v0, mode='interior', tol=ADMISSIBILITY_TOLERANCE,
              options=None):
    """Transport ``v0`` along ``curve``.

    Args:
        fm (FinslerMetric): The energy.
        chart (Chart): The adapted chart.
        curve (Curve): Path and step count.
        v0: Initial admissible vector, nonzero.
        mode (str): ``'interior'`` or ``'extended'``.
        tol (float): Largest admissibility defect accepted in interior mode.
        options (EngineOptions): Conventions.

    Returns:
        TransportResult

    Raises:
        InadmissibleCurveError: interior mode on a curve leaving the distribution.
        DomainError: ``F`` collapsed towards the zero section.
    """
    if mode not in MODES:
        raise ConfigurationError('transport mode must be one of %s, got %r'
                                 % (', '.join(MODES), mode))
    _check_curve(chart, curve)
    v = np.asarray(v0, dtype=float)
    if v.shape != (2 * chart.m,) or not np.any(v):
        raise ConfigurationError('initial vector must be a nonzero vector of length %d'
                                 % (2 * chart.m))
    if mode == 'interior':
        worst, worst_t = _worst_defect(chart, curve)
        if worst > tol:
            raise InadmissibleCurveError(worst, worst_t)
    solver = solver_for(fm, chart, options)
    size = 2 * chart.m

    def rate(t, w):
        x, xdot = curve.state(t)
        u = xdot[:size]
        evaluation = solver.evaluate(FiberPoint(x, w), 'interior')
        change = -evaluation.G.dot(u)
        if mode == 'extended':
            theta = xdot[chart.n - 1] + evaluation.gamma.dot(u)
            if theta != 0.0:
                G_n = solver.evaluate(FiberPoint(x, w), 'full').G_n
                change = change - theta * G_n
        return change

    grid, h = curve.grid()
    x0, _ = curve.state(grid[0])
    F0 = fm.energy(x0, v)
    result = TransportResult(mode)
    result.trace.append((grid[0], tuple(x0), tuple(v), F0))
    drift = 0.0
    for t in grid[:-1]:
        k1 = rate(t, v)
        k2 = rate(t + 0.5 * h, v + 0.5 * h * k1)
        k3 = rate(t + 0.5 * h, v + 0.5 * h * k2)
        k4 = rate(t + h, v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_next = t + h
        x, _ = curve.state(t_next)
        F = fm.energy(x, v)
        if F < COLLAPSE_RATIO * F0:
            raise DomainError('transported vector collapsed at t=%.17g (F=%g)' % (t_next, F))
        drift = max(drift, abs(F - F0) / F0)
        result.trace.append((t_next, tuple(x), tuple(v), F))
    result.F_drift = drift
    logger.debug('%s transport of %s along %s: %d steps, F drift %g',
                 mode, list(v0), curve.label, curve.samples, drift)
    return result


def convergence_order(fm, chart, curve, v0, mode='interior', options=None):
    """Observed order of the integrator from two step halvings.

    Runs ``curve.samples``, twice and four times as many steps and returns
    ``log2(|v_N - v_2N| / |v_2N - v_4N|)`` on the final vectors.
    """
    finals = [transport(fm, chart, curve.with_samples(curve.samples * k), v0, mode,
                        options=options).final_v
              for k in (1, 2, 4)]
    coarse = np.max(np.abs(finals[0] - finals[1]))
    fine = np.max(np.abs(finals[1] - finals[2]))
    if fine == 0.0:
        return math.inf
    return math.log2(coarse / fine)
