"""Exception types raised by the numerical routines."""


class PulseError(Exception):
    """Base class; the CLI maps any subclass to exit status 3."""


class AliasingError(PulseError):
    pass


class BoundStateOnBoundary(PulseError):
    pass


class DegenerateBoundState(PulseError):
    pass


class FlipAngleOverflow(PulseError):
    pass


class NonSimpleZero(PulseError):
    pass


class FullInversionUnrepresentable(PulseError):
    pass


class IllConditionedBoundState(PulseError):
    pass


class RemezDiverged(PulseError):
    def __init__(self, msg, last=None):
        super().__init__(msg)
        self.last = last


class DistBreakdown(PulseError):
    def __init__(self, msg, j=None):
        super().__init__(msg)
        self.j = j


class TruncationInsufficient(PulseError):
    pass


class BoundStateRangeOverflow(PulseError):
    pass


class FrtBreakdown(PulseError):
    def __init__(self, msg, j=None):
        super().__init__(msg)
        self.j = j


class NotUnitary(PulseError):
    pass


class FactorizationSingular(PulseError):
    pass


class InfeasibleHalfPulse(PulseError):
    pass


class EnergyNotInUpperHalfPlane(PulseError):
    pass
