"""Matérn covariance functions with closed forms for half-integer orders."""

from __future__ import annotations

import numpy as np

from canopyfit.errors import ConfigError, DomainError

SUPPORTED_NU = (0.5, 1.5, 2.5)


def check_nu(nu: float) -> float:
    nu = float(nu)
    if nu not in SUPPORTED_NU:
        raise ConfigError(f"unsupported Matern order nu={nu}; choose one of {SUPPORTED_NU}")
    return nu


def squared_differences(x1, x2) -> np.ndarray:
    """Per-dimension squared differences, shape ``(n1, n2, d)``."""
    x1 = np.atleast_2d(np.asarray(x1, dtype=float))
    x2 = np.atleast_2d(np.asarray(x2, dtype=float))
    if x1.shape[1] != x2.shape[1]:
        raise DomainError(f"input dimensions differ: {x1.shape[1]} vs {x2.shape[1]}")
    diff = x1[:, None, :] - x2[None, :, :]
    return diff * diff


def distance_from_sq(sq: np.ndarray, length_scales) -> np.ndarray:
    ls = np.broadcast_to(np.asarray(length_scales, dtype=float), (sq.shape[-1],))
    if np.any(ls <= 0):
        raise DomainError("length scales must be positive")
    return np.sqrt(sq @ (1.0 / (ls * ls)))


def scaled_distance(x1, x2, length_scales) -> np.ndarray:
    """Pairwise anisotropic Euclidean distance ``|(a - b) / l|``."""
    return distance_from_sq(squared_differences(x1, x2), length_scales)


def matern_from_distance(r, variance: float, nu: float) -> np.ndarray:
    nu = check_nu(nu)
    r = np.asarray(r, dtype=float)
    if nu == 0.5:
        return variance * np.exp(-r)
    if nu == 1.5:
        s = np.sqrt(3.0) * r
        return variance * (1.0 + s) * np.exp(-s)
    s = np.sqrt(5.0) * r
    return variance * (1.0 + s + s * s / 3.0) * np.exp(-s)


def matern_cov(x1, x2, length_scales, variance: float = 1.0, nu: float = 2.5) -> np.ndarray:
    """Covariance matrix between the rows of ``x1`` and ``x2``.

    Examples
    --------
    >>> float(matern_cov([[0.0]], [[1.0]], [1.0], 1.0, 0.5)[0, 0])  # doctest: +ELLIPSIS
    0.36787944...
    """
    check_nu(nu)
    return matern_from_distance(scaled_distance(x1, x2, length_scales), variance, nu)
