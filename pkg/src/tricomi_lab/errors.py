"""Exception types shared across the package.

ValueError subclasses mean the caller handed us something outside a contract
(bad arguments, bad config, data violating a precondition); RuntimeError
subclasses mean the computation itself went wrong.  The CLI maps the former
to exit code 1 and the latter to exit code 2.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """Inconsistent or unknown configuration."""


class SupportViolationError(ValueError):
    """Field support touches the box boundary or leaves the light cone."""


class UncalibratedError(RuntimeError):
    """Kernel constants requested before calibration."""


class BracketError(RuntimeError):
    """Root bracketing failed (threshold outside the searched range)."""


class IterationDivergedError(RuntimeError):
    """An iteration produced non-finite values."""

    def __init__(self, message: str, last_finite: int = -1):
        super().__init__(message)
        self.last_finite = last_finite


class NumericalFailureError(RuntimeError):
    """Non-finite values or a numerical scheme breakdown mid-computation."""


class MeanHandlingWarning(UserWarning):
    """A negative-order norm was asked for a field with nonzero mean.

    The zero frequency is excluded from the sum in that case, so the value
    reported ignores part of the field.
    """
