"""JSON manifests describing a chart, a metric and what to evaluate.

A manifest looks like::

    {
      "m": 2,
      "chart": "HEIS5",
      "metric": "CURV5",
      "options": {"eq22_sigma": 1.0, "seed": 7},
      "points": [{"x": [0, 0, 0, 0, 0], "v": [1, 0, 0, 0]}],
      "curves": [{"label": "circle", "components": ["cos(t) - 1", "sin(t)", "0", "0",
                                                     "sin(2*t)/4 - t/2"],
                  "t_span": [0, 6.283185307179586], "samples": 200,
                  "v0": [1, 0, 0, 0], "mode": "interior"}],
      "sample_box": {"bounds": null, "count": 100, "radius": [0.5, 2.0]}
    }

``chart`` is a preset name or ``{"gamma": [...], "domain_hint": [...]}``;
``metric`` is a preset name, an inline energy, or ``{"F": ...}`` /
``{"L": ...}``. The schema is in ``docs/schema/manifest.schema.json``.
"""

import dataclasses
import json
import logging
from dataclasses import dataclass, field

from . import chart as chart_module
from . import finsler
from .chart import Chart, FiberPoint
from .errors import ManifestError, WagnerError
from .finsler import FinslerMetric
from .options import EngineOptions
from .sampling import sample_points
from .transport import MODES, Curve

logger = logging.getLogger(__name__)

KEYS = ('m', 'chart', 'metric', 'metric_is_L', 'options', 'points', 'curves',
        'sample_box', 'description')
# seeded points used by validate and scan when a manifest names none
DEFAULT_SAMPLES = 32


@dataclass(frozen=True)
class CurveSpec:
    curve: Curve
    v0: tuple
    mode: str = 'interior'
    max_drift: float = None


@dataclass
class Manifest:
    """Parsed manifest.

    Args:
        m (int): Half-rank of the chart.
        chart (Chart): The adapted chart.
        metric (FinslerMetric): The energy.
        options (EngineOptions): Conventions, with command-line overrides applied.
        points (list): Explicit fiber points, in manifest order.
        curves (list): :class:`CurveSpec` entries for transport.
        sample_box (dict): ``bounds``, ``count`` and ``radius`` of the seeded
            sample set, or ``None``.
        path (str): Where the manifest was read from.
    """
    m: int
    chart: Chart
    metric: FinslerMetric
    options: EngineOptions
    points: list = field(default_factory=list)
    curves: list = field(default_factory=list)
    sample_box: dict = None
    path: str = None

    def samples(self):
        """Seeded sample points of ``sample_box``; empty without one."""
        if self.sample_box is None:
            return []
        box = self.sample_box['bounds'] or self.chart.domain_hint
        return sample_points(self.m, self.sample_box['count'], seed=self.options.seed,
                             box=box, radius=self.sample_box['radius'])

    def evaluation_points(self):
        """Explicit points followed by the seeded samples."""
        return list(self.points) + self.samples()

    def sweep_points(self):
        """Evaluation points, or a default seeded sample set when there are none."""
        points = self.evaluation_points()
        if points:
            return points
        return sample_points(self.m, DEFAULT_SAMPLES, seed=self.options.seed,
                             box=self.chart.domain_hint)


def _require(doc, key, kind, where='manifest'):
    if key not in doc:
        raise ManifestError('%s is missing %r' % (where, key))
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ManifestError('%s field %r has the wrong type: %r' % (where, key, value))
    return value


def _vector(value, length, what):
    if not isinstance(value, list) or len(value) != length \
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value):
        raise ManifestError('%s must be a list of %d numbers, got %r' % (what, length, value))
    return [float(c) for c in value]


def _intervals(value, length, what):
    if not isinstance(value, list) or len(value) != length:
        raise ManifestError('%s must list %d intervals, got %r' % (what, length, value))
    intervals = []
    for pair in value:
        lo, hi = _vector(pair, 2, what + ' interval')
        if not lo <= hi:
            raise ManifestError('%s interval %r is empty' % (what, pair))
        intervals.append((lo, hi))
    return intervals


def _chart(doc, m, allow_m1):
    value = doc['chart'] if 'chart' in doc else None
    if isinstance(value, str):
        chart = Chart.preset(value, allow_m1=allow_m1)
    elif isinstance(value, dict):
        gamma = _require(value, 'gamma', list, 'chart')
        if not all(isinstance(g, str) for g in gamma):
            raise ManifestError('chart gamma entries must be expressions, got %r' % (gamma,))
        hint = value.get('domain_hint')
        if hint is not None:
            hint = _intervals(hint, 2 * m + 1, 'chart domain_hint')
        chart = Chart.from_expressions(m, gamma, hint, value.get('name', 'inline'), allow_m1)
    else:
        raise ManifestError('chart must be a preset name (%s) or an object with gamma, got %r'
                            % (', '.join(sorted(chart_module.PRESETS)), value))
    if chart.m != m:
        raise ManifestError('chart %s has m=%d but the manifest says m=%d'
                            % (chart.name, chart.m, m))
    return chart


def _metric(doc, m):
    value = doc['metric'] if 'metric' in doc else None
    is_L = doc.get('metric_is_L', False)
    if not isinstance(is_L, bool):
        raise ManifestError('metric_is_L must be a boolean, got %r' % (is_L,))
    if isinstance(value, str):
        if value in finsler.PRESETS:
            return FinslerMetric.preset(value, m)
        return FinslerMetric.from_text(m, value, is_L=is_L)
    if isinstance(value, dict):
        label = value.get('label', 'inline')
        if 'L' in value:
            return FinslerMetric.from_text(m, _require(value, 'L', str, 'metric'), label,
                                           is_L=True)
        return FinslerMetric.from_text(m, _require(value, 'F', str, 'metric'), label,
                                       is_L=is_L)
    raise ManifestError('metric must be a preset name (%s), an expression or an object, '
                        'got %r' % (', '.join(sorted(finsler.PRESETS)), value))


def _points(doc, m):
    points = []
    for i, item in enumerate(doc.get('points', [])):
        where = 'points[%d]' % i
        if not isinstance(item, dict):
            raise ManifestError('%s must be an object with x and v, got %r' % (where, item))
        x = _vector(_require(item, 'x', list, where), 2 * m + 1, where + '.x')
        v = _vector(_require(item, 'v', list, where), 2 * m, where + '.v')
        points.append(FiberPoint(x, v))
    return points


def _curves(doc, m):
    curves = []
    for i, item in enumerate(doc.get('curves', [])):
        where = 'curves[%d]' % i
        if not isinstance(item, dict):
            raise ManifestError('%s must be an object, got %r' % (where, item))
        components = _require(item, 'components', list, where)
        if len(components) != 2 * m + 1 or not all(isinstance(c, str) for c in components):
            raise ManifestError('%s.components must be %d expressions of t'
                                % (where, 2 * m + 1))
        t_span = _vector(_require(item, 't_span', list, where), 2, where + '.t_span')
        samples = _require(item, 'samples', int, where)
        v0 = _vector(_require(item, 'v0', list, where), 2 * m, where + '.v0')
        mode = item.get('mode', 'interior')
        if mode not in MODES:
            raise ManifestError('%s.mode must be one of %s, got %r'
                                % (where, ', '.join(MODES), mode))
        label = item.get('label', 'curve%d' % (i + 1))
        curve = Curve.from_expressions(components, t_span, samples, label)
        max_drift = item.get('max_drift')
        if max_drift is not None and (isinstance(max_drift, bool)
                                      or not isinstance(max_drift, (int, float))
                                      or max_drift < 0):
            raise ManifestError('%s.max_drift must be a non-negative number, got %r'
                                % (where, max_drift))
        curves.append(CurveSpec(curve, tuple(v0), mode, max_drift))
    return curves


def _sample_box(doc, m):
    value = doc.get('sample_box')
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ManifestError('sample_box must be an object, got %r' % (value,))
    count = _require(value, 'count', int, 'sample_box')
    if count < 1:
        raise ManifestError('sample_box.count must be positive, got %d' % count)
    bounds = value.get('bounds')
    if bounds is not None:
        bounds = _intervals(bounds, 2 * m + 1, 'sample_box.bounds')
    radius = _vector(value.get('radius', [0.5, 2.0]), 2, 'sample_box.radius')
    if not 0 < radius[0] <= radius[1]:
        raise ManifestError('sample_box.radius must satisfy 0 < lo <= hi, got %r' % (radius,))
    return {'bounds': bounds, 'count': count, 'radius': tuple(radius)}


def parse_manifest(doc, path=None, allow_m1=False):
    """Manifest from a decoded JSON document.

    Args:
        doc (dict): The decoded document.
        path (str): Echoed in reports.
        allow_m1 (bool): Command-line override of ``options.allow_m1``.

    Raises:
        ManifestError: any malformed part; errors of the expression parser and
            of the option checks are re-raised as ``ManifestError`` with the
            original message.
    """
    if not isinstance(doc, dict):
        raise ManifestError('manifest must be a JSON object')
    unknown = sorted(set(doc) - set(KEYS))
    if unknown:
        raise ManifestError('unknown manifest field(s): %s' % ', '.join(unknown))
    try:
        m = _require(doc, 'm', int)
        options = doc.get('options', {})
        if not isinstance(options, dict):
            raise ManifestError('options must be an object, got %r' % (options,))
        options = EngineOptions.from_mapping(options)
        if allow_m1 and not options.allow_m1:
            options = dataclasses.replace(options, allow_m1=True)
        chart = _chart(doc, m, options.allow_m1)
        return Manifest(m, chart, _metric(doc, m), options, _points(doc, m),
                        _curves(doc, m), _sample_box(doc, m), path)
    except ManifestError:
        raise
    except WagnerError as e:
        raise ManifestError('%s: %s' % (type(e).__name__, e), e.fields())


def load_manifest(path, allow_m1=False):
    """Read and parse the manifest at ``path``."""
    try:
        with open(path, encoding='utf-8') as f:
            doc = json.load(f)
    except OSError as e:
        raise ManifestError('cannot read manifest %s: %s' % (path, e.strerror))
    except ValueError as e:
        raise ManifestError('manifest %s is not valid JSON: %s' % (path, e))
    manifest = parse_manifest(doc, path, allow_m1)
    logger.info('loaded manifest %s: chart %s, metric %s, %d point(s), %d curve(s)',
                path, manifest.chart.name, manifest.metric.label, len(manifest.points),
                len(manifest.curves))
    return manifest
