"""The truncated metric connection of a contact sub-Finsler structure.

Everything is computed by one jet pipeline seeded at a fiber point::

    F -> F_a = dF/dv^a -> g_ab = 1/2 dF_a/dv^b -> g^ab
      -> S^c = 1/2 g^bc (v^a e_a F_b - e_b F)          (spray)
      -> G^c_d = 1/2 dS^c/dv^d,  G^c_db = dG^c_d/dv^b   (interior coefficients)
      -> K^c_ab, P^c_a = d_n G^c_a                      (Schouten tensors)
      -> G^d_n = sigma omega^ba K^d_ab                  (extension coefficients)

The depth of an evaluation fixes the jet order: ``interior`` stops at the
values of ``G``, ``full`` reaches ``K`` and ``P``, ``nested`` additionally
carries the first derivatives of ``G_n`` needed by the mixed curvature.
"""

import functools
import logging
from dataclasses import dataclass

import numpy as np

from . import expr, jets
from .chart import apply_frame, omega_lower, omega_upper, seed_bindings
from .errors import (ConfigurationError, DegenerateContactError, DomainError,
                     MetricDegeneracyError, OracleInapplicableError)
from .options import EngineOptions

logger = logging.getLogger(__name__)

DEPTHS = {'interior': 3, 'full': 4, 'nested': 4}


@dataclass
class ConnectionEvaluation:
    """Connection data at one fiber point.

    Arrays put the upper index first: ``G[c][d]``, ``G_vert[c][d][b]``,
    ``K[c][a][b]``, ``P[c][a]``. Fields beyond the depth of the evaluation
    are ``None``.
    """
    point: object
    depth: str
    F_value: float
    F_grad_fiber: np.ndarray
    g_lower: np.ndarray
    g_upper: np.ndarray
    omega_lower: np.ndarray
    omega_upper: np.ndarray
    S: np.ndarray
    G: np.ndarray
    metrizability: np.ndarray
    euler_spray: float
    gamma: np.ndarray
    reeb_defect: np.ndarray
    G_vert: np.ndarray = None
    symmetry: float = None
    K: np.ndarray = None
    P: np.ndarray = None
    G_n: np.ndarray = None
    reeb_metrizability: float = None
    eps_G_n: np.ndarray = None


class ConnectionSolver(object):
    """Evaluates the connection of one metric on one chart.

    Solvers are immutable and keep a small cache of evaluations, so a single
    instance can be shared by threads sweeping different points.

    Args:
        fm (FinslerMetric): The energy.
        chart (Chart): The adapted chart.
        options (EngineOptions): Conventions; defaults apply when omitted.
        cache_size (int): Number of evaluations kept.
    """

    def __init__(self, fm, chart, options=None, cache_size=256):
        if fm.m != chart.m:
            raise ConfigurationError('metric for m=%d used with a chart with m=%d'
                                     % (fm.m, chart.m))
        self.fm = fm
        self.chart = chart
        self.options = options or EngineOptions()
        self.size = 2 * chart.m
        base = set(chart.base_names)
        self.base_active = frozenset(chart.gamma_variables | (fm.variables & base)
                                     | {chart.reeb_name})
        self.active = self.base_active | frozenset(chart.fiber_names)
        self._cached = functools.lru_cache(maxsize=cache_size)(self._evaluate)

    def evaluate(self, p, depth='full'):
        if depth not in DEPTHS:
            raise ConfigurationError('unknown evaluation depth %r; known: %s'
                                     % (depth, ', '.join(DEPTHS)))
        p.check(self.chart)
        return self._cached(p, depth)

    def _evaluate(self, p, depth):
        chart, size, options = self.chart, self.size, self.options
        order, nested = DEPTHS[depth], depth == 'nested'
        logger.debug('evaluating %s connection at x=%s, v=%s', depth, p.x, p.v)
        names = chart.base_names + chart.fiber_names
        bindings = seed_bindings(names, p.x + p.v, self.active, order, nested)
        fibers = chart.fiber_names
        reeb = chart.reeb_name
        space = bindings[fibers[0]].space

        F = expr.evaluate(self.fm.F, bindings)
        if not jets.is_jet(F):
            F = space.constant(F)
        gammas = chart.gamma_values(bindings)

        def frame(f, a):
            return apply_frame(f, a, gammas, reeb)

        lower = omega_lower(chart, gammas)
        lower_values = jets.values(lower)
        rank = np.linalg.matrix_rank(lower_values)
        if rank < size:
            raise DegenerateContactError(p.x, rank)
        upper = omega_upper(lower, options)

        Fv = [F.partial(name) for name in fibers]
        g = np.empty((size, size), dtype=object)
        for a in range(size):
            for b in range(size):
                g[a, b] = 0.5 * Fv[a].partial(fibers[b])
        g_values = jets.values(g)
        if not (np.isfinite(F.value) and np.all(np.isfinite(g_values))):
            raise DomainError('energy is not finite at x=%s, v=%s' % (list(p.x), list(p.v)))
        try:
            np.linalg.cholesky(g_values)
        except np.linalg.LinAlgError:
            raise MetricDegeneracyError(p.x, p.v, np.linalg.eigvalsh(g_values)[0])
        g_inv = jets.inv(g)

        vs = [bindings[name] for name in fibers]
        eF = [frame(F, a) for a in range(size)]
        W = [sum(vs[a] * frame(Fv[b], a) for a in range(size)) - eF[b]
             for b in range(size)]
        S = [0.5 * sum(g_inv[b, c] * W[b] for b in range(size)) for c in range(size)]
        G = np.empty((size, size), dtype=object)
        for c in range(size):
            for d in range(size):
                G[c, d] = 0.5 * S[c].partial(fibers[d])

        v = p.v_array
        S_values = jets.values(S)
        G_values = jets.values(G)
        Fv_values = jets.values(Fv)
        metrizability = jets.values(eF) - G_values.T.dot(Fv_values)
        euler_spray = np.max(np.abs(G_values.dot(v) - S_values)) / max(1.0, np.max(np.abs(S_values)))

        evaluation = ConnectionEvaluation(
            point=p, depth=depth, F_value=F.value, F_grad_fiber=Fv_values,
            g_lower=g_values, g_upper=np.linalg.inv(g_values),
            omega_lower=lower_values, omega_upper=jets.values(upper),
            S=S_values, G=G_values, metrizability=metrizability,
            euler_spray=float(euler_spray),
            gamma=jets.values(gammas),
            reeb_defect=np.array([jets.extract(gm, (reeb,)) if jets.is_jet(gm) else 0.0
                                  for gm in gammas]))
        if depth == 'interior':
            return evaluation

        G_vert = np.empty((size, size, size), dtype=object)
        for c in range(size):
            for d in range(size):
                for b in range(size):
                    G_vert[c, d, b] = G[c, d].partial(fibers[b])
        G_vert_values = jets.values(G_vert)
        evaluation.G_vert = G_vert_values
        evaluation.symmetry = float(np.max(np.abs(G_vert_values - G_vert_values.transpose(0, 2, 1))))

        sign = options.schouten_quadratic_sign
        K = np.empty((size, size, size), dtype=object)
        zero = G[0, 0].partial(fibers[0]).space.zeros()
        for c in range(size):
            for a in range(size):
                K[c, a, a] = zero
                for b in range(a + 1, size):
                    quadratic = sum(G[d, a] * G_vert[c, b, d] - G[d, b] * G_vert[c, a, d]
                                    for d in range(size))
                    k = frame(G[c, a], b) - frame(G[c, b], a) + sign * quadratic
                    K[c, a, b] = k
                    K[c, b, a] = -k
        sigma = options.eq22_sigma
        G_n = [sigma * sum(upper[b, a] * K[d, a, b]
                           for a in range(size) for b in range(size))
               for d in range(size)]
        evaluation.K = jets.values(K)
        evaluation.P = np.array([[jets.extract(G[c, a], (reeb,)) for a in range(size)]
                                 for c in range(size)])
        evaluation.G_n = jets.values(G_n)
        evaluation.reeb_metrizability = float(
            jets.extract(F, (reeb,)) - evaluation.G_n.dot(Fv_values))
        if depth == 'full':
            return evaluation

        gamma_values = evaluation.gamma
        eps = np.empty((size, size))
        for c in range(size):
            for a in range(size):
                gn = G_n[c]
                eps[c, a] = (jets.value_of(jets.nested_partial(gn, 'x%d' % (a + 1)))
                             - gamma_values[a] * jets.value_of(jets.nested_partial(gn, reeb))
                             - sum(G_values[b, a] * jets.value_of(jets.nested_partial(gn, fibers[b]))
                                   for b in range(size)))
        evaluation.eps_G_n = eps
        return evaluation


@functools.lru_cache(maxsize=32)
def solver_for(fm, chart, options=None):
    """Shared solver for a metric, chart and options triple."""
    return ConnectionSolver(fm, chart, options)


def spray(fm, chart, p, options=None):
    """``S^c = 1/2 g^bc (v^a e_a F_b - e_b F)`` at ``p``."""
    return solver_for(fm, chart, options).evaluate(p, 'interior').S


def interior_coefficients(fm, chart, p, options=None):
    """``(G, G_vert)`` at ``p``; ``G[c][d] = 1/2 dS^c/dv^d``."""
    evaluation = solver_for(fm, chart, options).evaluate(p, 'full')
    return evaluation.G, evaluation.G_vert


def frame_christoffel(fm, chart, p):
    """Christoffel symbols ``[c][a][b]`` of a quadratic metric in the adapted frame.

    ``Gamma^c_ab = 1/2 g^cd (e_a g_bd + e_b g_ad - e_d g_ab)``.
    """
    p.check(chart)
    if not fm.is_quadratic_at(p.x, p.v):
        raise OracleInapplicableError('metric %s is not quadratic in the fiber at x=%s'
                                      % (fm.label, list(p.x)))
    size = 2 * chart.m
    names = chart.base_names + chart.fiber_names
    active = (fm.variables | chart.gamma_variables | {chart.reeb_name}
              | set(chart.fiber_names))
    bindings = seed_bindings(names, p.x + p.v, active, 3)
    F = expr.evaluate(fm.F, bindings)
    gammas = chart.gamma_values(bindings)
    fibers = chart.fiber_names
    g = [[0.5 * jets.partial(jets.partial(F, fibers[a]), fibers[b]) for b in range(size)]
         for a in range(size)]
    g_inv = np.linalg.inv(jets.values(g))
    eg = np.array([[[jets.value_of(apply_frame(g[b][d], a, gammas, chart.reeb_name))
                     for d in range(size)] for b in range(size)] for a in range(size)])
    lowered = eg + eg.transpose(1, 0, 2) - eg.transpose(2, 1, 0)
    return 0.5 * np.einsum('cd,abd->cab', g_inv, lowered)


def riemannian_reduction_oracle(fm, chart, p):
    """``Gamma^c_ab v^b`` for a quadratic metric; equals the interior coefficients.

    Raises:
        OracleInapplicableError: the energy is not quadratic in the fiber.
    """
    return np.einsum('cab,b->ca', frame_christoffel(fm, chart, p), p.v_array)


def metrizability_residual(fm, chart, p, options=None):
    """``e_a F - G^c_a F_c``, which the connection makes vanish."""
    return solver_for(fm, chart, options).evaluate(p, 'interior').metrizability


def schouten_tensors(fm, chart, p, options=None):
    """Second and first Schouten tensors ``(K, P)`` at ``p``."""
    evaluation = solver_for(fm, chart, options).evaluate(p, 'full')
    return evaluation.K, evaluation.P


def extension_coefficients(fm, chart, p, options=None):
    """``G^d_n = sigma omega^ba K^d_ab`` at ``p``."""
    return solver_for(fm, chart, options).evaluate(p, 'full').G_n


def reeb_metrizability_residual(fm, chart, p, options=None):
    """``d_n F - G^c_n F_c``; reported, not enforced."""
    return solver_for(fm, chart, options).evaluate(p, 'full').reeb_metrizability


def linear_coefficients_check(fm, chart, p, options=None):
    """Largest deviation of a quadratic metric's connection from ``Gamma(x) v``.

    Compares ``G_vert`` with the frame Christoffel symbols and ``G`` with
    their contraction against ``v``.
    """
    christoffel = frame_christoffel(fm, chart, p)
    G, G_vert = interior_coefficients(fm, chart, p, options)
    return float(max(np.max(np.abs(G_vert - christoffel)),
                     np.max(np.abs(G - christoffel.dot(p.v_array)))))
