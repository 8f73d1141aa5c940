"""Exception types raised across the package."""


class NharmError(Exception):
    """Base class for every error raised by nharm."""


class DomainError(NharmError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionExhausted(NharmError, ArithmeticError):
    """The working precision cannot certify the requested phase accuracy."""


class BudgetExceeded(NharmError, RuntimeError):
    """An adaptive routine ran out of its work budget.

    ``estimate`` carries the best value reached before giving up.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InvalidSequence(NharmError, ValueError):
    """A coefficient sequence produced a non-positive or missing value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SequenceFileError(InvalidSequence):
    """A custom sequence file could not be parsed; ``index`` is the line number."""


class PreconditionViolated(NharmError, ValueError):
    """A documented precondition of the operation does not hold."""


class WitnessNotFound(NharmError, LookupError):
    """A search finished its range without producing a valid witness."""
