"""Expected improvement and its maximization over a box."""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from canopyfit.bayesopt.gp import GaussianProcess, posterior

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def expected_improvement(mu, sigma, best) -> np.ndarray:
    """EI for minimization, ``E[max(best - f, 0)]`` with ``f ~ N(mu, sigma^2)``."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    gain = best - mu
    safe = np.where(sigma > 0, sigma, 1.0)
    z = gain / safe
    ei = gain * ndtr(z) + sigma * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    ei = np.where(sigma > 0, ei, np.maximum(gain, 0.0))
    return np.maximum(ei, 0.0)


def ei_at(gp: GaussianProcess, x, best: float) -> np.ndarray:
    mu, sigma = posterior(gp, x)
    return expected_improvement(mu, sigma, best)


def propose_next(gp: GaussianProcess, rng: np.random.Generator, candidate_count: int = 1000,
                 best: float | None = None, candidates=None, refine_passes: int = 3,
                 initial_step: float = 0.1) -> tuple[np.ndarray, float]:
    """Maximize EI over the unit box; returns ``(x_unit, ei)``.

    The best of ``candidate_count`` uniform draws (or of the given
    ``candidates``) is refined coordinate-wise: each pass tries moving every
    coordinate by ``+-step`` and keeps strict improvements, then halves the
    step. ``best`` defaults to the smallest observed target.
    """
    dim = gp.X.shape[1]
    if best is None:
        best = float(gp.y.min())
    if candidates is None:
        candidates = rng.uniform(size=(candidate_count, dim))
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    scores = ei_at(gp, candidates, best)
    k = int(np.argmax(scores))
    x, value = candidates[k].copy(), float(scores[k])
    step = initial_step
    for _ in range(refine_passes):
        for d in range(dim):
            trials = np.repeat(x[None], 2, axis=0)
            trials[0, d] = min(x[d] + step, 1.0)
            trials[1, d] = max(x[d] - step, 0.0)
            ei = ei_at(gp, trials, best)
            j = int(np.argmax(ei))
            if ei[j] > value:
                x, value = trials[j], float(ei[j])
        step *= 0.5
    return x, value
