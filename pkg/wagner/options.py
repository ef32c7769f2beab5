"""Engine options shared by every evaluation."""

import os
from dataclasses import asdict, dataclass, fields

from .errors import ConfigurationError

THREADS_ENV = 'WAGNER_THREADS'


@dataclass(frozen=True)
class EngineOptions:
    """Numerical conventions and switches of the engine.

    Args:
        eq22_sigma (float): Normalization multiplying the contraction that
            defines the extension coefficients.
        omega_inverse_transpose (bool): Use the transpose of the inverse of
            omega instead of the convention ``upper @ lower = identity``.
        fd_step (float): Finite-difference step of the bracket oracle.
        seed (int): Seed of the sample generator.
        allow_m1 (bool): Accept three-dimensional charts.
        schouten_quadratic_sign (int): Sign of the quadratic term of the
            second Schouten tensor; +1 matches the frame bracket.
    """
    eq22_sigma: float = 1.0
    omega_inverse_transpose: bool = False
    fd_step: float = 1e-4
    seed: int = 0
    allow_m1: bool = False
    schouten_quadratic_sign: int = 1

    def __post_init__(self):
        if not isinstance(self.eq22_sigma, (int, float)) or isinstance(self.eq22_sigma, bool) \
                or not self.eq22_sigma > 0:
            raise ConfigurationError('eq22_sigma must be a positive real, got %r'
                                     % (self.eq22_sigma,))
        if not isinstance(self.fd_step, (int, float)) or not self.fd_step > 0:
            raise ConfigurationError('fd_step must be positive, got %r' % (self.fd_step,))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError('seed must be a non-negative integer, got %r'
                                     % (self.seed,))
        if self.schouten_quadratic_sign not in (1, -1):
            raise ConfigurationError('schouten_quadratic_sign must be +1 or -1, got %r'
                                     % (self.schouten_quadratic_sign,))
        for name in ('omega_inverse_transpose', 'allow_m1'):
            if not isinstance(getattr(self, name), bool):
                raise ConfigurationError('%s must be a boolean, got %r'
                                         % (name, getattr(self, name)))

    @classmethod
    def from_mapping(cls, mapping):
        """Options from a manifest ``options`` object; unknown keys are errors."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigurationError('unknown option(s): %s' % ', '.join(unknown))
        return cls(**mapping)

    def to_dict(self):
        return asdict(self)


def thread_count(environ=None):
    """Worker count allowed by ``WAGNER_THREADS`` (default 1)."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw == '':
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigurationError('%s must be a positive integer, got %r' % (THREADS_ENV, raw))
    if count < 1:
        raise ConfigurationError('%s must be a positive integer, got %r' % (THREADS_ENV, raw))
    return count
