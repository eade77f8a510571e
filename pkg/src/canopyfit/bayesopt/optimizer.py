"""Bayesian-optimization loop, run traces, and multi-run averaging."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from canopyfit.bayesopt.acquisition import propose_next
from canopyfit.bayesopt.gp import KernelConfig, gp_fit
from canopyfit.errors import CanopyFitError, ConfigError, DomainError, FormatError

THREADS_ENV = "CANOPYFIT_THREADS"


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box with named dimensions."""

    bounds: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float).reshape(-1, 2)
        if not np.all(b[:, 0] < b[:, 1]):
            raise DomainError("each search dimension needs lower < upper")
        object.__setattr__(self, "bounds", b)
        names = tuple(self.names) or tuple(f"x{i}" for i in range(len(b)))
        if len(names) != len(b):
            raise DomainError(f"{len(names)} names for {len(b)} dimensions")
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]

    def to_unit(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u) -> np.ndarray:
        x = self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)
        return np.clip(x, self.lower, self.upper)

    def clamp(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)


@dataclass(frozen=True)
class OptConfig:
    """Budget and surrogate settings of one optimization run.

    ``refit_every`` sets how often hyperparameters are searched from
    scratch; in between they are refined from the previous iteration.
    """

    n_initial: int = 200
    n_total: int = 500
    n_runs: int = 10
    candidate_count: int = 1000
    seed: int = 0
    nu: float = 2.5
    refit_every: int = 25
    refine_passes: int = 3

    def __post_init__(self):
        if min(self.n_initial, self.n_total, self.n_runs, self.candidate_count, self.refit_every) < 1:
            raise ConfigError("optimizer counts must be at least 1")
        if self.n_initial > self.n_total:
            raise ConfigError(f"n_initial ({self.n_initial}) exceeds n_total ({self.n_total})")
        if self.n_initial < 2 and self.n_total > self.n_initial:
            raise ConfigError("GP-guided search needs n_initial >= 2")
        KernelConfig(nu=self.nu)

    @property
    def kernel(self) -> KernelConfig:
        return KernelConfig(nu=self.nu)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class TraceEntry:
    iter: int
    x: list
    loss: float
    wallclock_ms: float
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps({"iter": self.iter, "x": [float(v) for v in self.x], "loss": float(self.loss),
                           "wallclock_ms": float(self.wallclock_ms), "seed": int(self.seed)})


@dataclass
class OptRunResult:
    best_x: np.ndarray
    best_loss: float
    trace: list = field(default_factory=list)
    run_index: int = 0
    seed: int = 0

    @property
    def X(self) -> np.ndarray:
        return np.array([e.x for e in self.trace], dtype=float)

    @property
    def losses(self) -> np.ndarray:
        return np.array([e.loss for e in self.trace], dtype=float)

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.losses)

    def to_dict(self) -> dict:
        return {"run_index": self.run_index, "seed": int(self.seed),
                "best_x": [float(v) for v in self.best_x], "best_loss": float(self.best_loss),
                "n_evaluations": len(self.trace)}


class OptimizationError(CanopyFitError):
    """An objective evaluation failed; ``partial`` holds the trace so far."""

    def __init__(self, message: str, partial: OptRunResult):
        super().__init__(message)
        self.partial = partial


def iteration_seed(run_seed: int, iteration: int) -> int:
    """Generation seed handed to the objective at ``iteration``."""
    ss = np.random.SeedSequence(run_seed, spawn_key=(iteration,))
    return int(ss.generate_state(1, np.uint32)[0])


def run_seed(seed: int, run_index: int) -> int:
    """Seed of run ``run_index`` derived from a master seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(1 << 20, run_index))
    return int(ss.generate_state(1, np.uint32)[0])


def read_trace(path) -> list[TraceEntry]:
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                entries.append(TraceEntry(int(d["iter"]), list(d["x"]), float(d["loss"]),
                                           float(d.get("wallclock_ms", 0.0)), int(d.get("seed", 0))))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: bad trace line ({exc})") from None
    return entries


def _result(trace: list, run_index: int, seed: int) -> OptRunResult:
    if not trace:
        return OptRunResult(np.zeros(0), math.inf, [], run_index, seed)
    k = int(np.argmin([e.loss for e in trace]))
    return OptRunResult(np.asarray(trace[k].x, dtype=float), float(trace[k].loss), trace, run_index, seed)


def optimize(objective: Callable, space: SearchSpace, cfg: OptConfig = OptConfig(),
             trace_path=None, resume: bool = False, run_index: int = 0) -> OptRunResult:
    """Minimize ``objective(x, seed)`` over ``space``.

    The first ``n_initial`` points are uniform draws; the rest maximize
    expected improvement of a GP fitted to all evaluations so far. Each call
    receives a generation seed derived from ``(cfg.seed, iteration)``.

    With ``trace_path`` every evaluation is appended as one JSON line. With
    ``resume=True`` the recorded evaluations are replayed in place of objective
    calls; proposals are recomputed, so the continued run is identical to an
    uninterrupted one. A mismatch between the trace and the replay raises
    ``FormatError``.

    Raises
    ------
    OptimizationError
        If the objective raises or returns a non-finite loss.
    """
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    kernel = cfg.kernel
    recorded = []
    if trace_path is not None and resume and Path(trace_path).exists():
        recorded = read_trace(trace_path)
    elif trace_path is not None:
        Path(trace_path).write_text("")
    trace: list[TraceEntry] = []
    U = np.empty((cfg.n_total, space.dim))
    y = np.empty(cfg.n_total)
    hyper = None
    t_start = time.perf_counter()
    for it in range(cfg.n_total):
        if it < cfg.n_initial:
            u = rng.uniform(size=space.dim)
        else:
            guided = it - cfg.n_initial
            warm = hyper if guided % cfg.refit_every else None
            gp = gp_fit(U[:it], y[:it], kernel, warm_start=warm)
            hyper = gp.hyper
            u, _ = propose_next(gp, rng, cfg.candidate_count, refine_passes=cfg.refine_passes)
        x = space.from_unit(u)
        seed = iteration_seed(cfg.seed, it)
        if it < len(recorded):
            entry = recorded[it]
            if entry.iter != it or not np.allclose(entry.x, x, rtol=0, atol=1e-12):
                raise FormatError(f"trace entry {it} does not match the replayed proposal")
        else:
            try:
                loss = float(objective(x, seed))
            except Exception as exc:
                raise OptimizationError(f"objective failed at iteration {it}: {exc}",
                                        _result(trace, run_index, cfg.seed)) from exc
            if not math.isfinite(loss):
                raise OptimizationError(f"objective returned non-finite loss {loss} at iteration {it}",
                                        _result(trace, run_index, cfg.seed))
            entry = TraceEntry(it, [float(v) for v in x], loss,
                               1000.0 * (time.perf_counter() - t_start), seed)
            if trace_path is not None:
                with open(trace_path, "a") as fh:
                    fh.write(entry.to_json() + "\n")
        trace.append(entry)
        U[it] = u
        y[it] = entry.loss
    return _result(trace, run_index, cfg.seed)


def average_solutions(results: list, space: Optional[SearchSpace] = None) -> np.ndarray:
    """Per-dimension mean of each run's best point, clamped to ``space``."""
    if not results:
        raise DomainError("cannot average an empty list of runs")
    mean = np.mean([np.asarray(r.best_x, dtype=float) for r in results], axis=0)
    return space.clamp(mean) if space is not None else mean


def worker_count(requested: Optional[int] = None) -> int:
    """Worker processes: ``requested``, else ``$CANOPYFIT_THREADS``, else the CPU count."""
    if requested is not None:
        n = int(requested)
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise ConfigError("worker count must be at least 1")
    return n


@dataclass
class RunFailure:
    run_index: int
    message: str
    partial: Optional[OptRunResult] = None


def _run_one(objective, space, cfg, run_index, trace_dir, resume):
    trace_path = None if trace_dir is None else Path(trace_dir) / f"run_{run_index:02d}.jsonl"
    try:
        return optimize(objective, space, cfg, trace_path, resume, run_index)
    except OptimizationError as exc:
        return RunFailure(run_index, str(exc), exc.partial)


def run_many(objective: Callable, space: SearchSpace, cfg: OptConfig = OptConfig(),
             workers: Optional[int] = None, trace_dir=None,
             resume: bool = False) -> tuple[list[OptRunResult], list[RunFailure]]:
    """Run ``cfg.n_runs`` independent optimizations, concurrently if possible.

    Run ``r`` uses the seed ``run_seed(cfg.seed, r)``. Results are returned
    ordered by run index. ``objective`` must be picklable when more than one
    worker is used.
    """
    configs = [replace(cfg, seed=run_seed(cfg.seed, r)) for r in range(cfg.n_runs)]
    n_workers = min(worker_count(workers), cfg.n_runs)
    if trace_dir is not None:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    if n_workers == 1:
        outcomes = [_run_one(objective, space, c, r, trace_dir, resume) for r, c in enumerate(configs)]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_run_one, objective, space, c, r, trace_dir, resume)
                       for r, c in enumerate(configs)]
            outcomes = [f.result() for f in futures]
    results = [o for o in outcomes if isinstance(o, OptRunResult)]
    failures = [o for o in outcomes if isinstance(o, RunFailure)]
    return results, failures
