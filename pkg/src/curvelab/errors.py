"""Exception types shared across the package."""


class CurveLabError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(CurveLabError, ValueError):
    """An objective or configuration description violates its invariants."""


class InvalidScheduleError(CurveLabError, ValueError):
    """A noise schedule has a multiplier outside [-delta, delta]."""


class InsufficientDataError(CurveLabError, ValueError):
    pass


class OutOfRegimeError(CurveLabError, ValueError):
    """A stepsize lies outside the range where an operation is defined."""


class DegenerateStartError(CurveLabError, ValueError):
    pass


class InapplicableError(CurveLabError, ValueError):
    """The operation's hypotheses cannot be met by the given inputs."""


class UnboundedStepsizeError(CurveLabError, ValueError):
    """Effective smoothness is zero, so every stepsize is admissible."""


class InconsistentWitnessError(CurveLabError):
    """A witness trajectory contradicts gradient-norm monotonicity."""
