"""Exception hierarchy shared by all metricroom modules."""


class MetricRoomError(Exception):
    """Base class for every error raised by metricroom."""


class InvalidDomain(MetricRoomError, ValueError):
    pass


class UnsupportedDomain(MetricRoomError, ValueError):
    pass


class PointNotInDomain(MetricRoomError, ValueError):
    pass


class DuplicatePuncture(MetricRoomError, ValueError):
    pass


class EmptySet(MetricRoomError, ValueError):
    pass


class NonConvergence(MetricRoomError, ArithmeticError):
    pass


class BranchCut(MetricRoomError, ValueError):
    pass


class PunctureValue(MetricRoomError, ValueError):
    """Evaluation requested at one of the omitted points."""


class DegeneratePair(MetricRoomError, ValueError):
    pass


class NewtonDivergence(MetricRoomError, ArithmeticError):
    pass


class ResolutionError(MetricRoomError, ValueError):
    pass


class OutOfField(MetricRoomError, ValueError):
    pass


class NotSimplyConnected(MetricRoomError, ValueError):
    pass


class RadiusOutOfField(MetricRoomError, ValueError):
    pass


class NegativeDensity(MetricRoomError, ArithmeticError):
    pass


class InsufficientComplementSamples(MetricRoomError, ValueError):
    pass
