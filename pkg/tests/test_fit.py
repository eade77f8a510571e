import json

import numpy as np
import pytest

from canopyfit.bayesopt.optimizer import OptConfig
from canopyfit.errors import NumericError
from canopyfit.loss import HistogramSet
from canopyfit.morphology.canopy import CanopyLayout
from canopyfit.morphology.mesh import read_obj
from canopyfit.pipeline import fit as fit_module
from canopyfit.pipeline.config import Observation, SceneConfig
from canopyfit.pipeline.fit import fit_scene, load_fit, search_space


def small_config(**kw):
    base = dict(observation=Observation(params={"num_nodes": 10.0}, seed=1), width=120, height=90,
                layout=CanopyLayout(num_rows=2, plants_per_row=4),
                opt=OptConfig(n_initial=4, n_total=6, n_runs=2, seed=3), workers=1)
    base.update(kw)
    return SceneConfig(**base)


def test_search_space_names():
    s = search_space("maize")
    assert s.names == ("leaf_length_mult", "leaf_order_shift", "internode_length_mult", "num_nodes")


def test_fit_outputs(tmp_path):
    result = fit_scene(small_config(), output_dir=tmp_path)
    for name in ("fit.json", "config.json", "params.json", "solution.obj", "observed_stats.json",
                 "predicted_stats.json"):
        assert (tmp_path / name).exists(), name
    assert sorted(p.name for p in (tmp_path / "traces").iterdir()) == ["run_00.jsonl", "run_01.jsonl"]
    data = load_fit(tmp_path)
    assert data["averaged_parameters"] == pytest.approx(list(result.averaged))
    assert data["truth_metrics"]["lai"] > 0
    assert HistogramSet.load(tmp_path / "observed_stats.json").to_dict() == result.observed.to_dict()
    mesh = read_obj(tmp_path / "solution.obj")
    assert mesh.leaf_area() == pytest.approx(result.metrics.total_leaf_area, rel=1e-6)
    assert len(result.run_metrics) == 2
    np.testing.assert_allclose(result.averaged, np.mean([r.best_x for r in result.runs], axis=0))


def test_single_run_average_is_best():
    result = fit_scene(small_config(opt=OptConfig(n_initial=4, n_total=5, n_runs=1)))
    np.testing.assert_array_equal(result.averaged, result.runs[0].best_x)


def test_fit_deterministic():
    a = fit_scene(small_config())
    b = fit_scene(small_config())
    assert a.to_json() == b.to_json()


def test_observation_computed_once(monkeypatch):
    calls = []
    original = fit_module.load_observation

    def counting(cfg, profile=None):
        calls.append(1)
        return original(cfg, profile)

    monkeypatch.setattr(fit_module, "load_observation", counting)
    fit_scene(small_config())
    assert len(calls) == 1


def test_metrics_use_report_seed():
    cfg = small_config()
    result = fit_scene(cfg)
    from canopyfit.metrics import compute_metrics
    from canopyfit.pipeline.scene import CanopyObjective, scene_camera

    obj = CanopyObjective("soybean", cfg.layout, scene_camera(cfg), cfg.specs, cfg.weights, result.observed)
    again = compute_metrics(obj.canopy(result.averaged, cfg.report_seed), cfg.layout.ground_area)
    assert again == result.metrics


def test_all_runs_failing(monkeypatch):
    def broken(self, x, seed):
        raise ValueError("nope")

    monkeypatch.setattr(fit_module.CanopyObjective, "__call__", broken)
    with pytest.raises(NumericError, match="all optimization runs failed"):
        fit_scene(small_config())


def test_resume_reproduces(tmp_path):
    cfg = small_config(opt=OptConfig(n_initial=4, n_total=6, n_runs=1, seed=3))
    full = fit_scene(cfg, output_dir=tmp_path / "a")
    trace = tmp_path / "a" / "traces" / "run_00.jsonl"
    lines = trace.read_text().splitlines()
    (tmp_path / "b" / "traces").mkdir(parents=True)
    (tmp_path / "b" / "traces" / "run_00.jsonl").write_text("\n".join(lines[:3]) + "\n")
    resumed = fit_scene(cfg, output_dir=tmp_path / "b", resume=True)
    np.testing.assert_array_equal(full.averaged, resumed.averaged)
    assert json.loads((tmp_path / "b" / "fit.json").read_text())["runs"][0]["n_evaluations"] == 6
