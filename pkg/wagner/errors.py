"""Exceptions raised by the engine.

Every class derives from :class:`WagnerError` and from the builtin a generic
caller would catch, so ``except ValueError`` keeps working around numerical
code.
"""


class WagnerError(Exception):
    """Root of the engine's exception hierarchy."""

    def fields(self):
        """Structured fields serialized next to the message in CLI reports."""
        return {}


class ConfigurationError(WagnerError, ValueError):
    pass


class ManifestError(WagnerError, ValueError):
    """A manifest that cannot be turned into a chart, a metric and a workload."""

    def __init__(self, message, details=None):
        super(ManifestError, self).__init__(message)
        self.details = dict(details or {})

    def fields(self):
        return self.details


class ShapeMismatchError(WagnerError, ValueError):
    pass


class OrderOverflowError(WagnerError, ArithmeticError):
    """A derivative beyond the truncation order of a jet was requested."""


class DomainError(WagnerError, ArithmeticError):
    """A function was evaluated outside the domain where it is smooth."""


class UnboundVariableError(WagnerError, KeyError):

    def __init__(self, name):
        super(UnboundVariableError, self).__init__(name)
        self.name = name

    def __str__(self):
        return 'variable %r is not bound' % self.name

    def fields(self):
        return {'name': self.name}


class ExprSyntaxError(WagnerError, ValueError):

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        if self.expected:
            message = '%s at byte %d (expected %s)' % (
                message, offset, ', '.join(self.expected))
        else:
            message = '%s at byte %d' % (message, offset)
        super(ExprSyntaxError, self).__init__(message)

    def fields(self):
        return {'offset': self.offset, 'expected': list(self.expected)}


class UnknownIdentifierError(WagnerError, ValueError):

    def __init__(self, name, permitted, offset=None, reason=None):
        self.name = name
        self.permitted = tuple(permitted)
        self.offset = offset
        message = reason or 'unknown identifier %r' % name
        if self.permitted:
            message += '; permitted: %s' % ', '.join(self.permitted)
        super(UnknownIdentifierError, self).__init__(message)

    def fields(self):
        return {'name': self.name, 'permitted': list(self.permitted),
                'offset': self.offset}


class DegenerateContactError(WagnerError, ValueError):

    def __init__(self, point, rank):
        self.point = tuple(float(c) for c in point)
        self.rank = int(rank)
        super(DegenerateContactError, self).__init__(
            'degenerate contact structure at x=%s: rank of omega is %d'
            % (list(self.point), self.rank))

    def fields(self):
        return {'point': list(self.point), 'rank': self.rank}


class MetricDegeneracyError(WagnerError, ValueError):

    def __init__(self, x, v, min_eigenvalue):
        self.x = tuple(float(c) for c in x)
        self.v = tuple(float(c) for c in v)
        self.min_eigenvalue = float(min_eigenvalue)
        super(MetricDegeneracyError, self).__init__(
            'fundamental tensor is not positive definite at x=%s, v=%s '
            '(smallest eigenvalue %.17g)'
            % (list(self.x), list(self.v), self.min_eigenvalue))

    def fields(self):
        return {'x': list(self.x), 'v': list(self.v),
                'min_eigenvalue': self.min_eigenvalue}


class OracleInapplicableError(WagnerError, ValueError):
    pass


class InadmissibleCurveError(WagnerError, ValueError):

    def __init__(self, defect, t):
        self.defect = float(defect)
        self.t = float(t)
        super(InadmissibleCurveError, self).__init__(
            'curve is not admissible: defect %.17g at t=%.17g'
            % (self.defect, self.t))

    def fields(self):
        return {'defect': self.defect, 't': self.t}


class StepUnderflowError(WagnerError, ArithmeticError):
    pass
