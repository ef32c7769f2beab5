"""Sub-Finsler energy ``F = L^2`` and its fundamental tensor."""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import expr, jets
from .chart import seed_bindings
from .errors import ConfigurationError, DomainError, MetricDegeneracyError

logger = logging.getLogger(__name__)

EULER_TOLERANCE = 1e-8


def _euclidean(m):
    return ' + '.join('v%d^2' % a for a in range(1, 2 * m + 1))


PRESETS = {
    'F_EUC': (None, _euclidean),
    'CURV5': (2, lambda m: 'exp(2*x2)*v1^2 + v2^2 + v3^2 + v4^2'),
    'WARP5': (2, lambda m: 'exp(2*x1)*v1^2 + v2^2 + v3^2 + v4^2'),
    'RAND5': (2, lambda m: '(sqrt(v1^2 + v2^2 + v3^2 + v4^2) + 0.1*v1)^2'),
}


@dataclass(frozen=True)
class FinslerMetric:
    """Energy function on the slit bundle.

    Args:
        m (int): Half-rank of the chart the metric lives on.
        F: Expression tree of the energy in ``x1..x{2m+1}``, ``v1..v{2m}``.
        label (str): Preset name or a label for reports.
    """
    m: int
    F: object
    label: str = 'inline'

    @classmethod
    def from_text(cls, m, text, label='inline', is_L=False):
        tree = expr.parse(text, m)
        if is_L:
            return cls.from_L(m, tree, label)
        return cls(m, tree, label)

    @classmethod
    def from_L(cls, m, L, label='inline'):
        """Metric whose energy is the square of the norm expression ``L``."""
        if isinstance(L, str):
            L = expr.parse(L, m)
        return cls(m, expr.BinOp('^', L, expr.Num(2.0)), label)

    @classmethod
    def preset(cls, name, m=2):
        try:
            fixed_m, text = PRESETS[name]
        except KeyError:
            raise ConfigurationError('unknown metric preset %r; known: %s'
                                     % (name, ', '.join(sorted(PRESETS))))
        if fixed_m is not None and fixed_m != m:
            raise ConfigurationError('metric preset %s needs m=%d, got m=%d'
                                     % (name, fixed_m, m))
        return cls.from_text(m, text(m), label=name)

    @property
    def variables(self):
        return expr.free_variables(self.F)

    def energy(self, x, v):
        """``F(x, v)`` as a float."""
        bindings = dict(zip(_names(self.m), list(x) + list(v)))
        value = jets.value_of(expr.evaluate(self.F, bindings))
        if not np.isfinite(value):
            raise DomainError('energy is not finite at x=%s, v=%s' % (list(x), list(v)))
        return value

    def is_quadratic_at(self, x, v, tol=1e-10):
        """Whether ``F`` restricted to the fiber over ``x`` looks quadratic.

        Third fiber derivatives must vanish at ``v`` and at a shifted vector,
        and ``F`` must equal its fiber Hessian form there.
        """
        size = 2 * self.m
        probes = [np.asarray(v, dtype=float), np.asarray(v, dtype=float) + 0.5]
        for w in probes:
            energy = self.fiber_jet(x, w, 3)
            hessian = _hessian(energy, size)
            third = [jets.extract(energy, ('v%d' % (a + 1), 'v%d' % (b + 1), 'v%d' % (c + 1)))
                     for a in range(size) for b in range(a, size) for c in range(b, size)]
            scale = max(1.0, abs(energy.value))
            if max(abs(t) for t in third) > tol * scale:
                return False
            if abs(0.5 * w.dot(hessian).dot(w) - energy.value) > tol * scale:
                return False
        return True

    def fiber_jet(self, x, v, order):
        names = _names(self.m)
        fibers = names[2 * self.m + 1:]
        bindings = seed_bindings(names, list(x) + list(v), fibers, order)
        energy = expr.evaluate(self.F, bindings)
        if not jets.is_jet(energy):
            energy = jets.make_space(fibers, order).constant(energy)
        return energy


def _names(m):
    return expr.variables_for(m)


def _hessian(energy, size):
    hessian = np.empty((size, size))
    for a in range(size):
        for b in range(a, size):
            hessian[a, b] = hessian[b, a] = jets.extract(
                energy, ('v%d' % (a + 1), 'v%d' % (b + 1)))
    return hessian


@dataclass(frozen=True)
class MetricAtPoint:
    g_lower: np.ndarray
    g_upper: np.ndarray
    F_value: float
    F_grad_fiber: np.ndarray


def metric_at(fm, chart, p):
    """Fundamental tensor ``g_ab = 1/2 d^2F/dv^a dv^b`` at a fiber point.

    Raises:
        MetricDegeneracyError: ``g`` is not positive definite at ``p``.
        DomainError: ``F`` is not finite at ``p``.
    """
    p.check(chart)
    size = 2 * chart.m
    energy = fm.fiber_jet(p.x, p.v, 2)
    grad = np.array([jets.extract(energy, ('v%d' % (a + 1),)) for a in range(size)])
    g_lower = 0.5 * _hessian(energy, size)
    if not (np.isfinite(energy.value) and np.all(np.isfinite(g_lower))):
        raise DomainError('energy is not finite at x=%s, v=%s' % (list(p.x), list(p.v)))
    try:
        np.linalg.cholesky(g_lower)
    except np.linalg.LinAlgError:
        raise MetricDegeneracyError(p.x, p.v, np.linalg.eigvalsh(g_lower)[0])
    return MetricAtPoint(g_lower, np.linalg.inv(g_lower), energy.value, grad)


@dataclass
class SampleDiagnostic:
    x: tuple
    v: tuple
    F: float
    euler_residual: float
    second_euler_residual: float
    positive: bool
    definite: bool
    min_eigenvalue: float
    passed: bool
    error: str = None


@dataclass
class MetricDiagnostics:
    samples: list = field(default_factory=list)

    @property
    def passed(self):
        return all(s.passed for s in self.samples)

    @property
    def max_euler_residual(self):
        residuals = [s.euler_residual for s in self.samples if s.euler_residual is not None]
        return max(residuals) if residuals else None

    def failures(self):
        return [s for s in self.samples if not s.passed]


def validate_metric(fm, chart, samples):
    """Homogeneity, positivity and definiteness of ``F`` at sample points.

    The Euler residual is ``|v^a dF/dv^a - 2F| / max(1, F)``; a sample passes
    when it is at most ``EULER_TOLERANCE``, ``F > 0`` and ``g`` is positive
    definite. Failures are recorded, never raised.
    """
    if not samples:
        raise ConfigurationError('validate_metric needs at least one sample')
    size = 2 * chart.m
    diagnostics = MetricDiagnostics()
    for p in samples:
        p.check(chart)
        v = p.v_array
        try:
            energy = fm.fiber_jet(p.x, p.v, 2)
        except DomainError as e:
            logger.warning('metric %s cannot be evaluated at x=%s, v=%s: %s',
                           fm.label, list(p.x), list(p.v), e)
            diagnostics.samples.append(SampleDiagnostic(
                p.x, p.v, None, None, None, False, False, None, False, str(e)))
            continue
        F = energy.value
        grad = np.array([jets.extract(energy, ('v%d' % (a + 1),)) for a in range(size)])
        g = 0.5 * _hessian(energy, size)
        scale = max(1.0, abs(F))
        euler = abs(v.dot(grad) - 2.0 * F) / scale
        second = abs(v.dot(g).dot(v) - F) / scale
        eigenvalues = np.linalg.eigvalsh(g)
        positive = bool(F > 0)
        definite = bool(eigenvalues[0] > 0)
        passed = bool(euler <= EULER_TOLERANCE and positive and definite)
        if not passed:
            logger.warning('metric %s fails at x=%s, v=%s: euler residual %g, F=%g, '
                           'smallest eigenvalue %g', fm.label, list(p.x), list(p.v),
                           euler, F, eigenvalues[0])
        diagnostics.samples.append(SampleDiagnostic(
            p.x, p.v, F, float(euler), float(second), positive, definite,
            float(eigenvalues[0]), passed))
    return diagnostics
