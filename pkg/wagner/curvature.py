"""Curvature of the extended horizontal distribution.

``R_hor[c][a][b]`` and ``R_mixed[c][a]`` are the vertical components of the
brackets ``[eps_a, eps_b]`` and ``[eps_a, U]`` of the frame fields

    eps_a = e_a - G^b_a d/dv^b,        U = d/dx^n - G^b_n d/dv^b

on the total space. :func:`lie_bracket_oracle` recovers the same components
by differencing the frame fields, without going through the jet formulas.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chart import FiberPoint
from .connection import solver_for
from .errors import ConfigurationError, DomainError, StepUnderflowError

logger = logging.getLogger(__name__)

FLAT_TOLERANCE = 1e-8
# values below this, relative to the size of G, are rounding noise
NOISE_FLOOR = 1e-13

REEB = 'n'


@dataclass
class CurvatureEvaluation:
    point: FiberPoint
    R_hor: np.ndarray
    R_mixed: np.ndarray
    K_trace: np.ndarray
    max_abs: float
    trace_residual: np.ndarray = None


def _negligible(values, scale):
    return values is not None and np.max(np.abs(values)) <= NOISE_FLOOR * scale


def _scale(evaluation):
    return max(1.0, float(np.max(np.abs(evaluation.G))))


def _horizontal(evaluation):
    K, G_n = evaluation.K, evaluation.G_n
    scale = _scale(evaluation)
    if _negligible(K, scale) and _negligible(G_n, scale):
        return np.zeros_like(K)
    return K + np.einsum('ba,c->cab', evaluation.omega_lower, G_n)


def _mixed(evaluation):
    G_n = evaluation.G_n
    scale = _scale(evaluation)
    if _negligible(evaluation.K, scale) and _negligible(G_n, scale) \
            and _negligible(evaluation.P, scale):
        return np.zeros_like(evaluation.P)
    return (evaluation.P + np.outer(G_n, evaluation.reeb_defect) - evaluation.eps_G_n
            - np.einsum('cad,d->ca', evaluation.G_vert, G_n))


def _k_trace(evaluation):
    return np.einsum('ij,cij->c', evaluation.omega_upper, evaluation.K)


def wagner_horizontal(fm, chart, p, options=None):
    """``R^c_ab = K^c_ab + omega_ba G^c_n`` at ``p``."""
    return _horizontal(solver_for(fm, chart, options).evaluate(p, 'full'))


def wagner_mixed(fm, chart, p, options=None):
    """``R^c_na = P^c_a + d_n gamma_a G^c_n - eps_a G^c_n - G^c_ad G^d_n`` at ``p``."""
    return _mixed(solver_for(fm, chart, options).evaluate(p, 'nested'))


def curvature_at(fm, chart, p, options=None):
    evaluation = solver_for(fm, chart, options).evaluate(p, 'nested')
    R_hor, R_mixed = _horizontal(evaluation), _mixed(evaluation)
    return CurvatureEvaluation(p, R_hor, R_mixed, _k_trace(evaluation),
                               float(max(np.max(np.abs(R_hor)), np.max(np.abs(R_mixed)))),
                               _trace(evaluation)['residual'])


def trace_identity(fm, chart, p, options=None):
    """Both sides of ``omega^ab R^c_ab = omega^ab K^c_ab + (omega^ab omega_ba) K_trace^c``.

    The identity depends on the omega-inverse convention and on sigma; it is
    reported, not asserted.

    Returns:
        dict: ``lhs``, ``rhs`` and ``residual`` arrays over ``c``.
    """
    evaluation = solver_for(fm, chart, options).evaluate(p, 'full')
    return _trace(evaluation)


def _trace(evaluation):
    upper, lower = evaluation.omega_upper, evaluation.omega_lower
    lhs = np.einsum('ab,cab->c', upper, _horizontal(evaluation))
    rhs = (np.einsum('ab,cab->c', upper, evaluation.K)
           + np.einsum('ab,ba->', upper, lower) * _k_trace(evaluation))
    return {'lhs': lhs, 'rhs': rhs, 'residual': lhs - rhs}


@dataclass
class BracketResult:
    """Frame decomposition of a numerically differenced bracket.

    Args:
        pair (tuple): 1-based ``(a, b)`` or ``(a, 'n')``.
        components (numpy.ndarray): Vertical components, the curvature estimate.
        u_component (float): Coefficient of ``U``.
        u_residual (float): ``u_component`` minus ``omega_ba`` or ``d_n gamma_a``.
        eps_components (numpy.ndarray): Coefficients of ``eps_c``; must vanish.
    """
    pair: tuple
    components: np.ndarray
    u_component: float
    u_residual: float
    eps_components: np.ndarray

    @property
    def structure_residual(self):
        return float(max(abs(self.u_residual), np.max(np.abs(self.eps_components))))


def _parse_pair(pair, size):
    a, b = pair
    if not (isinstance(a, int) and 1 <= a <= size):
        raise ConfigurationError('bracket index must be in [1, %d], got %r' % (size, a))
    if b == REEB:
        return a - 1, None
    if not (isinstance(b, int) and 1 <= b <= size):
        raise ConfigurationError("second bracket index must be in [1, %d] or 'n', got %r"
                                 % (size, b))
    return a - 1, b - 1


class _FrameFields(object):
    """Frame vector fields on the total space, evaluated through the solver."""

    def __init__(self, solver, m):
        self.solver = solver
        self.n = 2 * m + 1
        self.size = 2 * m

    def evaluation(self, z):
        if not np.all(np.isfinite(z)):
            raise DomainError('bracket probe left the finite domain at %s' % list(z))
        return self.solver.evaluate(FiberPoint(z[:self.n], z[self.n:]), 'full')

    def eps(self, a, z):
        evaluation = self.evaluation(z)
        vector = np.zeros(self.n + self.size)
        vector[a] = 1.0
        vector[self.n - 1] = -evaluation.gamma[a]
        vector[self.n:] = -evaluation.G[:, a]
        return vector

    def u(self, z):
        evaluation = self.evaluation(z)
        vector = np.zeros(self.n + self.size)
        vector[self.n - 1] = 1.0
        vector[self.n:] = -evaluation.G_n
        return vector

    def frame(self, z):
        columns = [self.eps(c, z) for c in range(self.size)] + [self.u(z)]
        for c in range(self.size):
            unit = np.zeros(self.n + self.size)
            unit[self.n + c] = 1.0
            columns.append(unit)
        return np.column_stack(columns)


def _directional(field, direction, z, h):
    forward = field(z + h * direction)
    backward = field(z - h * direction)
    return (forward - backward) / (2.0 * h)


def _richardson(field, direction, z, h):
    return (4.0 * _directional(field, direction, z, 0.5 * h)
            - _directional(field, direction, z, h)) / 3.0


def lie_bracket_oracle(fm, chart, p, pair, options=None, h=None):
    """Bracket of two frame fields by central differences, decomposed in the frame.

    Args:
        fm (FinslerMetric): The energy.
        chart (Chart): The adapted chart.
        p (FiberPoint): Where the bracket is taken.
        pair (tuple): 1-based ``(a, b)`` for ``[eps_a, eps_b]`` or ``(a, 'n')``
            for ``[eps_a, U]``.
        options (EngineOptions): Conventions; ``fd_step`` is the default step.
        h (float): Step overriding ``options.fd_step``.

    Returns:
        BracketResult

    Raises:
        StepUnderflowError: the step vanishes against the coordinates of ``p``.
    """
    solver = solver_for(fm, chart, options)
    size = 2 * chart.m
    a, b = _parse_pair(pair, size)
    h = solver.options.fd_step if h is None else float(h)
    p.check(chart)
    z = np.concatenate([p.x_array, p.v_array])
    if not h > 0 or 0.5 * h <= 16 * np.finfo(float).eps * max(1.0, np.max(np.abs(z))):
        raise StepUnderflowError('finite-difference step %r underflows at %s' % (h, list(z)))
    fields = _FrameFields(solver, chart.m)

    def X(w):
        return fields.eps(a, w)

    if b is None:
        Y = fields.u
    else:
        def Y(w):
            return fields.eps(b, w)

    bracket = _richardson(Y, X(z), z, h) - _richardson(X, Y(z), z, h)
    if not np.all(np.isfinite(bracket)):
        raise DomainError('bracket %r is not finite at x=%s, v=%s' % (pair, p.x, p.v))
    coefficients = np.linalg.solve(fields.frame(z), bracket)
    evaluation = fields.evaluation(z)
    u_component = float(coefficients[size])
    if b is None:
        expected = evaluation.reeb_defect[a]
    else:
        expected = evaluation.omega_lower[b, a]
    return BracketResult(tuple(pair), coefficients[size + 1:], u_component,
                         u_component - expected, coefficients[:size])


def agrees(formula, oracle, rel=1e-6, small=1e-2, abs_tol=1e-8):
    """Whether formula and oracle components agree within the curvature tolerances."""
    formula, oracle = np.asarray(formula), np.asarray(oracle)
    for f, o in zip(formula.flat, oracle.flat):
        magnitude = max(abs(f), abs(o))
        tol = abs_tol if magnitude < small else rel * magnitude
        if abs(f - o) > tol:
            return False
    return True


def bracket_table(fm, chart, p, options=None, h=None):
    """Oracle against formula for every bracket pair at ``p``.

    Returns:
        list of dict: ``pair``, ``oracle``, ``formula``, ``deviation``,
        ``structure_residual`` and ``passed`` per pair, ``(a, b)`` pairs with
        ``a < b`` first, then the ``(a, 'n')`` pairs.
    """
    curvature = curvature_at(fm, chart, p, options)
    size = 2 * chart.m
    pairs = [(a, b) for a in range(1, size + 1) for b in range(a + 1, size + 1)]
    pairs += [(a, REEB) for a in range(1, size + 1)]
    rows = []
    for pair in pairs:
        result = lie_bracket_oracle(fm, chart, p, pair, options, h)
        a = pair[0] - 1
        if pair[1] == REEB:
            formula = curvature.R_mixed[:, a]
        else:
            formula = curvature.R_hor[:, a, pair[1] - 1]
        deviation = float(np.max(np.abs(formula - result.components)))
        passed = agrees(formula, result.components) and result.structure_residual <= 1e-6
        if not passed:
            logger.warning('bracket %s disagrees at x=%s, v=%s: deviation %g, structure %g',
                           pair, p.x, p.v, deviation, result.structure_residual)
        rows.append({'pair': pair, 'oracle': result.components, 'formula': formula,
                     'deviation': deviation,
                     'structure_residual': result.structure_residual,
                     'u_residual': result.u_residual,
                     'passed': passed})
    return rows


@dataclass
class FlatnessReport:
    count: int
    max_R_hor: float
    argmax_R_hor: FiberPoint
    max_R_mixed: float
    argmax_R_mixed: FiberPoint
    per_sample: list = None

    @property
    def classification(self):
        if self.max_R_hor <= FLAT_TOLERANCE and self.max_R_mixed <= FLAT_TOLERANCE:
            return 'flat'
        return 'non-flat'


def flatness_scan(fm, chart, samples, options=None, threads=1):
    """Largest curvature components over sample points.

    Args:
        fm (FinslerMetric): The energy.
        chart (Chart): The adapted chart.
        samples (list): Fiber points, e.g. from :func:`wagner.sampling.sample_points`.
        options (EngineOptions): Conventions.
        threads (int): Worker threads; results keep the sample order.

    Returns:
        FlatnessReport
    """
    samples = list(samples)
    if not samples:
        raise ConfigurationError('flatness scan needs at least one sample')

    def one(p):
        return curvature_at(fm, chart, p, options)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, samples))
    else:
        results = [one(p) for p in samples]
    hor = [float(np.max(np.abs(r.R_hor))) for r in results]
    mixed = [float(np.max(np.abs(r.R_mixed))) for r in results]
    i, j = int(np.argmax(hor)), int(np.argmax(mixed))
    report = FlatnessReport(len(samples), hor[i], samples[i], mixed[j], samples[j],
                            list(zip(hor, mixed)))
    logger.info('flatness scan of %s over %d samples: %s (max |R_hor| %g, max |R_mixed| %g)',
                fm.label, report.count, report.classification, report.max_R_hor,
                report.max_R_mixed)
    return report
