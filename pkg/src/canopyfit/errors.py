"""Exception hierarchy shared by all modules."""


class CanopyFitError(Exception):
    """Base class for all package errors."""


class DomainError(CanopyFitError, ValueError):
    """Input outside the domain of an operation (bounds, shapes, empties)."""


class ConfigError(CanopyFitError, ValueError):
    """Invalid or inconsistent configuration."""


class FormatError(CanopyFitError, ValueError):
    """A file could not be parsed."""


class NumericError(CanopyFitError, ArithmeticError):
    """Numerical failure, e.g. a kernel matrix that is not positive definite."""
