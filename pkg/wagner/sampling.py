"""Reproducible sample points.

Points come from a SplitMix64 stream so that any implementation can rebuild
the same sample set from a seed; the constants are listed in
``docs/sampling.md``.
"""

import math

from .chart import FiberPoint
from .errors import ConfigurationError

MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MIN_DIRECTION_NORM = 1e-3


class SplitMix64(object):
    """Counter-based 64-bit generator."""

    def __init__(self, seed=0):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * MIX_1) & MASK
        z = ((z ^ (z >> 27)) * MIX_2) & MASK
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0):
        """Float in ``[lo, hi)`` from the top 53 bits of the next draw."""
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + (hi - lo) * u


def unit_box(m):
    return [(0.0, 1.0)] * (2 * m + 1)


def sample_points(m, count, seed=0, box=None, radius=(0.5, 2.0)):
    """``count`` fiber points with ``x`` uniform in ``box`` and ``|v|`` in ``radius``.

    Each point draws its base coordinates in order, then fiber directions
    uniform in ``[-1, 1]^2m`` until one has norm at least 1e-3, then a radius
    uniform in the given range.
    """
    if count < 1:
        raise ConfigurationError('sample count must be positive, got %r' % count)
    box = unit_box(m) if box is None else [tuple(b) for b in box]
    if len(box) != 2 * m + 1:
        raise ConfigurationError('sample box needs %d intervals, got %d' % (2 * m + 1, len(box)))
    r_lo, r_hi = radius
    if not 0 < r_lo <= r_hi:
        raise ConfigurationError('radius range must satisfy 0 < lo <= hi, got %r' % (radius,))
    rng = SplitMix64(seed)
    points = []
    for _ in range(count):
        x = [rng.uniform(lo, hi) for lo, hi in box]
        while True:
            w = [rng.uniform(-1.0, 1.0) for _ in range(2 * m)]
            norm = math.sqrt(sum(c * c for c in w))
            if norm >= MIN_DIRECTION_NORM:
                break
        r = rng.uniform(r_lo, r_hi)
        points.append(FiberPoint(x, [r * c / norm for c in w]))
    return points
