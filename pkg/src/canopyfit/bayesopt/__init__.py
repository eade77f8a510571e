"""Gaussian-process Bayesian optimization over a parameter box."""

from canopyfit.bayesopt.acquisition import expected_improvement, propose_next
from canopyfit.bayesopt.gp import (
    GaussianProcess,
    Hyperparameters,
    KernelConfig,
    gp_fit,
    log_marginal_likelihood,
    posterior,
)
from canopyfit.bayesopt.kernels import matern_cov
from canopyfit.bayesopt.optimizer import (
    OptConfig,
    OptimizationError,
    OptRunResult,
    RunFailure,
    SearchSpace,
    TraceEntry,
    average_solutions,
    iteration_seed,
    optimize,
    read_trace,
    run_many,
    run_seed,
    worker_count,
)

__all__ = [
    "GaussianProcess",
    "Hyperparameters",
    "KernelConfig",
    "OptConfig",
    "OptRunResult",
    "OptimizationError",
    "RunFailure",
    "SearchSpace",
    "TraceEntry",
    "average_solutions",
    "expected_improvement",
    "gp_fit",
    "iteration_seed",
    "log_marginal_likelihood",
    "matern_cov",
    "optimize",
    "posterior",
    "propose_next",
    "read_trace",
    "run_many",
    "run_seed",
    "worker_count",
]
