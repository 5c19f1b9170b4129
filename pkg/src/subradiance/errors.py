"""Exception types shared across the package."""


class SubradianceError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SubradianceError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidDimensionError(DomainError):
    """Requested Hilbert space is empty, malformed, or larger than the cap."""


class NumericalError(SubradianceError, RuntimeError):
    """A numerical routine failed its own accuracy check.

    Attributes
    ----------
    residual : float or None
        The offending residual, when one was measured.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
