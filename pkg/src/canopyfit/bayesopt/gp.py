"""Gaussian-process regression with a Matérn kernel and learned noise.

Inputs are expected in the unit box. Targets are standardized internally;
``posterior`` reports mean and standard deviation in the original units.
Hyperparameters are chosen by maximizing the log marginal likelihood with
a coarse log-space grid followed by coordinate refinement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from canopyfit.bayesopt.kernels import (
    check_nu,
    distance_from_sq,
    matern_cov,
    matern_from_distance,
    squared_differences,
)
from canopyfit.errors import DomainError, NumericError

MAX_JITTER = 1e-4
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class KernelConfig:
    """Matérn order and the box searched for hyperparameters (all positive)."""

    nu: float = 2.5
    length_scale_bounds: tuple = (1e-2, 1e1)
    noise_bounds: tuple = (1e-8, 1e-1)
    variance_bounds: tuple = (5e-2, 2e1)
    grid_length_scales: int = 7
    grid_noises: int = 5
    grid_variances: int = 3
    refine_passes: int = 3

    def __post_init__(self):
        check_nu(self.nu)
        for name in ("length_scale_bounds", "noise_bounds", "variance_bounds"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise DomainError(f"{name} must satisfy 0 < lower <= upper")


@dataclass(frozen=True)
class Hyperparameters:
    length_scales: np.ndarray
    variance: float
    noise: float

    def to_log(self) -> np.ndarray:
        return np.log(np.concatenate([self.length_scales, [self.variance, self.noise]]))

    @classmethod
    def from_log(cls, theta) -> "Hyperparameters":
        theta = np.exp(np.asarray(theta, dtype=float))
        return cls(theta[:-2].copy(), float(theta[-2]), float(theta[-1]))


@dataclass
class GaussianProcess:
    X: np.ndarray
    y: np.ndarray
    y_mean: float
    y_scale: float
    hyper: Hyperparameters
    nu: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float
    log_likelihood: float

    @property
    def noise_variance(self) -> float:
        """Noise variance in the original target units."""
        return self.hyper.noise * self.y_scale ** 2


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(y.mean())
    scale = float(y.std())
    if not scale > 0 or not np.isfinite(scale):
        scale = 1.0
    return (y - mean) / scale, mean, scale


def _factor(K: np.ndarray, jitter: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``K + jitter I``, growing jitter on failure."""
    n = len(K)
    j = jitter
    while True:
        try:
            return np.linalg.cholesky(K + j * np.eye(n)), j
        except np.linalg.LinAlgError:
            if j >= MAX_JITTER:
                raise NumericError(f"kernel matrix not positive definite with jitter {j:g}") from None
            j = min(MAX_JITTER, max(10.0 * j, 1e-12))


def log_marginal_likelihood(X, y, hyper: Hyperparameters, nu: float = 2.5,
                            jitter: float = 1e-10) -> float:
    """``log p(y | X)`` for targets ``y`` taken as given (no standardization)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    K = matern_cov(X, X, hyper.length_scales, hyper.variance, nu) + hyper.noise * np.eye(len(X))
    L, _ = _factor(K, jitter)
    a = cho_solve((L, True), y)
    return float(-0.5 * y @ a - np.log(np.diag(L)).sum() - 0.5 * len(y) * _LOG_2PI)


def _lml_from_sq(sq, y, hyper: Hyperparameters, nu, jitter) -> float:
    K = matern_from_distance(distance_from_sq(sq, hyper.length_scales), hyper.variance, nu)
    K[np.diag_indices_from(K)] += hyper.noise
    L, _ = _factor(K, jitter)
    a = cho_solve((L, True), y)
    return float(-0.5 * y @ a - np.log(np.diag(L)).sum() - 0.5 * len(y) * _LOG_2PI)


def _lml_or_neg_inf(sq, y, theta, nu, jitter) -> float:
    try:
        value = _lml_from_sq(sq, y, Hyperparameters.from_log(theta), nu, jitter)
    except NumericError:
        return -np.inf
    return value if np.isfinite(value) else -np.inf


def _log_bounds(cfg: KernelConfig, dim: int) -> np.ndarray:
    rows = [cfg.length_scale_bounds] * dim + [cfg.variance_bounds, cfg.noise_bounds]
    return np.log(np.asarray(rows, dtype=float))


def _grid_search(sq, y, cfg: KernelConfig, jitter: float) -> tuple[np.ndarray, float]:
    dim = sq.shape[-1]
    bounds = _log_bounds(cfg, dim)
    ls_grid = np.linspace(*bounds[0], cfg.grid_length_scales)
    var_grid = np.linspace(*bounds[dim], cfg.grid_variances)
    noise_grid = np.linspace(*bounds[dim + 1], cfg.grid_noises)
    best_theta, best = None, -np.inf
    for ls, var, noise in itertools.product(ls_grid, var_grid, noise_grid):
        theta = np.concatenate([np.full(dim, ls), [var, noise]])
        value = _lml_or_neg_inf(sq, y, theta, cfg.nu, jitter)
        if value > best:
            best_theta, best = theta, value
    if best_theta is None:
        raise NumericError("no hyperparameter setting gave a finite marginal likelihood")
    return best_theta, best


def _refine(sq, y, theta, value, cfg: KernelConfig, jitter: float, step: float,
            passes: int) -> tuple[np.ndarray, float]:
    """Coordinate ascent in log space, halving the step after each pass."""
    bounds = _log_bounds(cfg, sq.shape[-1])
    theta = theta.copy()
    for _ in range(passes):
        for k in range(len(theta)):
            for sign in (1.0, -1.0):
                trial = theta.copy()
                trial[k] = np.clip(trial[k] + sign * step, *bounds[k])
                if trial[k] == theta[k]:
                    continue
                v = _lml_or_neg_inf(sq, y, trial, cfg.nu, jitter)
                if v > value:
                    theta, value = trial, v
                    break
        step *= 0.5
    return theta, value


def gp_fit(X, y, config: KernelConfig = KernelConfig(), jitter: float = 1e-10,
           warm_start: Hyperparameters | None = None,
           hyper: Hyperparameters | None = None) -> GaussianProcess:
    """Fit a GP to unit-box inputs ``X`` and raw targets ``y``.

    Parameters
    ----------
    warm_start : Hyperparameters, optional
        Skip the grid and run a short refinement from these values.
    hyper : Hyperparameters, optional
        Use these values as-is (standardized-target units), no search.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if len(X) != len(y):
        raise DomainError(f"{len(X)} inputs but {len(y)} targets")
    if len(y) < 2:
        raise DomainError("GP fitting needs at least 2 points")
    if not np.all(np.isfinite(y)) or not np.all(np.isfinite(X)):
        raise DomainError("GP training data must be finite")
    ys, mean, scale = _standardize(y)
    sq = squared_differences(X, X)
    if hyper is None:
        if warm_start is None:
            theta, value = _grid_search(sq, ys, config, jitter)
            theta, value = _refine(sq, ys, theta, value, config, jitter, 0.5, config.refine_passes)
        else:
            bounds = _log_bounds(config, X.shape[1])
            theta = np.clip(warm_start.to_log(), bounds[:, 0], bounds[:, 1])
            value = _lml_or_neg_inf(sq, ys, theta, config.nu, jitter)
            theta, value = _refine(sq, ys, theta, value, config, jitter, 0.25, 1)
            if not np.isfinite(value):
                return gp_fit(X, y, config, jitter)
        hyper = Hyperparameters.from_log(theta)
    K = matern_from_distance(distance_from_sq(sq, hyper.length_scales), hyper.variance, config.nu)
    K[np.diag_indices_from(K)] += hyper.noise
    L, used = _factor(K, jitter)
    alpha = cho_solve((L, True), ys)
    lml = float(-0.5 * ys @ alpha - np.log(np.diag(L)).sum() - 0.5 * len(ys) * _LOG_2PI)
    return GaussianProcess(X, y, mean, scale, hyper, config.nu, L, alpha, used, lml)


def posterior(gp: GaussianProcess, x) -> tuple[np.ndarray, np.ndarray]:
    """Predictive mean and standard deviation of the latent function."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ks = matern_cov(x, gp.X, gp.hyper.length_scales, gp.hyper.variance, gp.nu)
    mu = ks @ gp.alpha
    v = solve_triangular(gp.chol, ks.T, lower=True, check_finite=False)
    var = np.maximum(gp.hyper.variance - np.einsum("ij,ij->j", v, v), 0.0)
    return mu * gp.y_scale + gp.y_mean, np.sqrt(var) * gp.y_scale

