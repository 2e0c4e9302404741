"""Exception types shared by the momfix modules."""


class MomfixError(Exception):
    """Base class for all library errors."""


class PoleError(MomfixError, ZeroDivisionError):
    """An argument sits on (or numerically at) a pole."""


class PoleEncounteredError(PoleError):
    """An intermediate iterate vanished during repeated application of psi.

    Attributes
    ----------
    step : int
        1-based index of the application that received a zero argument.
    """

    def __init__(self, step, value=0.0):
        super().__init__(f"intermediate iterate {value!r} vanished at step {step}")
        self.step = step
        self.value = value


class NearPoleError(PoleError):
    """Evaluation requested too close to a pole of a meromorphic extension."""

    def __init__(self, message, intermediate=None):
        super().__init__(message)
        self.intermediate = intermediate


class DomainError(MomfixError, ValueError):
    """Argument outside the documented domain."""


class CapExceededError(MomfixError, ValueError):
    """A size or precision cap would be exceeded."""


class PrecisionLossError(MomfixError, ArithmeticError):
    """Propagated error estimate exceeds the acceptable threshold."""


class BracketError(MomfixError, RuntimeError):
    """No sign change where a bracketed root was expected."""


class CountMismatchError(MomfixError, RuntimeError):
    """A shell did not contain the expected number of zeros."""


class InvariantError(MomfixError, RuntimeError):
    """A computed object violates a structural invariant."""


class AccuracyWarning(UserWarning):
    """Result is computed but its error estimate exceeds the nominal budget."""
