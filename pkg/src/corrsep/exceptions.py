"""Exception types raised across the package."""


class CorrsepError(Exception):
    """Base class for all package errors."""


class DimensionError(CorrsepError, ValueError):
    """Subsystem dimensions do not match the operand shape."""


class DomainError(CorrsepError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(CorrsepError, RuntimeError):
    """A numerical routine failed to converge."""


class UnsupportedDimensionError(CorrsepError, ValueError):
    """No construction is available for the requested Hilbert-space dimension."""


class PreconditionError(CorrsepError, ValueError):
    """The input violates a documented precondition of the operation."""
