"""End-to-end fitting of a scene and its result record."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from canopyfit.bayesopt.optimizer import SearchSpace, average_solutions, run_many
from canopyfit.errors import NumericError
from canopyfit.loss import HistogramSet, compute_histograms, total_loss
from canopyfit.metrics import CanopyMetrics, compute_metrics
from canopyfit.morphology.mesh import LabeledMesh, write_obj
from canopyfit.morphology.params import param_bounds, param_names
from canopyfit.morphology.profile import MorphologyProfile, resolve_profile
from canopyfit.pipeline.config import SceneConfig
from canopyfit.pipeline.scene import CanopyObjective, load_observation, scene_camera


def search_space(species: str) -> SearchSpace:
    return SearchSpace(param_bounds(species), tuple(param_names(species)))


def observation_statistics(cfg: SceneConfig, profile: Optional[MorphologyProfile] = None):
    """Observed scene and its histogram statistics."""
    scene = load_observation(cfg, profile)
    return scene, compute_histograms(scene.depth, scene.mask, scene.camera, cfg.specs)


@dataclass
class FitResult:
    species: str
    averaged: np.ndarray
    runs: list
    failures: list
    observed: HistogramSet
    predicted: HistogramSet
    metrics: CanopyMetrics
    loss: dict
    run_metrics: list = field(default_factory=list)
    truth_metrics: Optional[CanopyMetrics] = None
    names: tuple = ()
    elapsed_s: float = 0.0

    def to_dict(self) -> dict:
        out = {
            "species": self.species,
            "parameter_names": list(self.names),
            "averaged_parameters": [float(v) for v in self.averaged],
            "runs": [r.to_dict() for r in self.runs],
            "failures": [{"run_index": f.run_index, "message": f.message} for f in self.failures],
            "observed": self.observed.to_dict(),
            "predicted": self.predicted.to_dict(),
            "metrics": self.metrics.to_dict(),
            "loss": self.loss,
            "run_metrics": [m.to_dict() for m in self.run_metrics],
            "truth_metrics": None if self.truth_metrics is None else self.truth_metrics.to_dict(),
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def fit_scene(cfg: SceneConfig, profile: Optional[MorphologyProfile] = None,
              output_dir=None, resume: bool = False) -> FitResult:
    """Fit the scene's morphology parameters and evaluate the averaged solution.

    Observation statistics are computed once and shared by every run. Failed
    runs are reported in ``failures``; the fit proceeds while at least one
    run succeeds. Files are written only after all runs have finished.
    """
    t0 = time.perf_counter()
    profile = resolve_profile(cfg.species, profile)
    scene, observed = observation_statistics(cfg, profile)
    camera = scene_camera(cfg)
    objective = CanopyObjective(cfg.species, cfg.layout, camera, cfg.specs, cfg.weights, observed, profile)
    space = search_space(cfg.species)
    output_dir = output_dir if output_dir is not None else cfg.output_dir
    trace_dir = None if output_dir is None else Path(output_dir) / "traces"
    runs, failures = run_many(objective, space, cfg.opt, cfg.workers, trace_dir, resume)
    if not runs:
        detail = "; ".join(f"run {f.run_index}: {f.message}" for f in failures)
        raise NumericError(f"all optimization runs failed ({detail})")
    averaged = average_solutions(runs, space)

    mesh = objective.canopy(averaged, cfg.report_seed)
    predicted = objective.statistics(averaged, cfg.report_seed)
    loss = total_loss(observed, predicted, cfg.weights).to_dict()
    ground = cfg.layout.ground_area
    metrics = compute_metrics(mesh, ground)
    run_metrics = [compute_metrics(objective.canopy(r.best_x, cfg.report_seed), ground) for r in runs]
    truth = compute_metrics(scene.mesh, ground) if scene.mesh is not None else None
    result = FitResult(cfg.species, averaged, runs, failures, observed, predicted, metrics, loss,
                       run_metrics, truth, space.names, time.perf_counter() - t0)
    if output_dir is not None:
        write_fit_outputs(result, mesh, cfg, output_dir)
    return result


def write_fit_outputs(result: FitResult, mesh: LabeledMesh, cfg: SceneConfig, output_dir) -> None:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "fit.json").write_text(result.to_json() + "\n")
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    params = dict(zip(result.names, (float(v) for v in result.averaged)))
    (out / "params.json").write_text(json.dumps({"species": cfg.species, "params": params}, indent=2) + "\n")
    write_obj(mesh, out / "solution.obj")
    result.observed.save(out / "observed_stats.json")
    result.predicted.save(out / "predicted_stats.json")


def load_fit(path) -> dict:
    """Parsed ``fit.json`` (accepts the file or its directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / "fit.json"
    return json.loads(path.read_text())

