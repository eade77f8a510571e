"""Inverse procedural modeling of crop canopies.

Procedural soybean/maize generators are fitted to observed depth maps by
matching histogram statistics with Gaussian-process Bayesian optimization.
"""

from canopyfit.errors import (
    CanopyFitError,
    ConfigError,
    DomainError,
    FormatError,
    NumericError,
)

__version__ = "0.1.0"

__all__ = [
    "CanopyFitError",
    "ConfigError",
    "DomainError",
    "FormatError",
    "NumericError",
    "__version__",
]
