"""Exception hierarchy shared by every errstat app."""


class ErrstatError(Exception):
    """Base class for all domain errors raised by errstat."""


class InvalidInput(ErrstatError, ValueError):
    """Input data or parameters violate a documented precondition."""


class DatasetError(InvalidInput):
    """A benchmark table could not be ingested or validated."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DegenerateUncertainty(InvalidInput):
    """An uncertainty used as a divisor is null, negative or not finite."""


class UndefinedCorrelation(InvalidInput):
    """A correlation coefficient was requested on a constant input."""


class RenderError(InvalidInput):
    """A matrix does not satisfy the invariants of its render kind."""
