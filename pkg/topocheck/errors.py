"""
Error hierarchy.
Input errors map to CLI exit code 2; ConstructionError maps to exit code 1.
Axiom violations are reported as values, not raised.
"""


class TopocheckError(Exception):
    """Root of all engine errors."""


class CarrierError(TopocheckError, ValueError):
    """Carrier size outside 0..MAX_CARRIER, or a point outside the carrier."""


class CarrierMismatchError(TopocheckError, ValueError):
    """Operands live over different carriers."""


class PreconditionError(TopocheckError, ValueError):
    """An operation was called outside its precondition."""


class NotRelativelyOpenError(PreconditionError):
    """The set is not the trace of any open set."""


class PartialTableError(TopocheckError, ValueError):
    """A lookup table (closure or function) is missing entries."""


class LimitExceededError(TopocheckError, ValueError):
    """A census was requested beyond the method's carrier limit."""


class FormatError(TopocheckError, ValueError):
    """A file or token could not be parsed."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ConstructionError(TopocheckError, AssertionError):
    """A construction broke its own postcondition."""


INPUT_ERRORS = (
    CarrierError,
    CarrierMismatchError,
    PreconditionError,
    PartialTableError,
    LimitExceededError,
    FormatError,
)
