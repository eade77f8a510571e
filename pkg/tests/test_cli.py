import json
import subprocess
import sys

import numpy as np
import pytest

from canopyfit.loss import HistogramSet, compute_histograms, species_specs
from canopyfit.morphology.canopy import CanopyLayout, build_canopy
from canopyfit.morphology.params import SoybeanParams
from canopyfit.pipeline.cli import main
from canopyfit.render.camera import load_camera
from canopyfit.render.cloud import PointCloud, sample_surface_points
from canopyfit.render.formats import read_cdm, read_pgm, write_ply

SMALL_LAYOUT = ["--rows", "2", "--plants-per-row", "3"]


def run(*args):
    return main([str(a) for a in args])


def test_generate_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert run("generate", "--seed", 7, "--out", tmp_path / f"{name}.obj", *SMALL_LAYOUT) == 0
    assert (tmp_path / "a.obj").read_bytes() == (tmp_path / "b.obj").read_bytes()
    rec = json.loads((tmp_path / "a.params.json").read_text())
    assert rec["seed"] == 7 and rec["species"] == "soybean"
    assert rec["values"] == list(rec["params"].values())


def test_generate_group_count(tmp_path):
    assert run("generate", "--param", "num_nodes=14", "--out", tmp_path / "m.obj", *SMALL_LAYOUT) == 0
    mesh = build_canopy("soybean", SoybeanParams(num_nodes=14.0), CanopyLayout(num_rows=2, plants_per_row=3), seed=0)
    keys = set(zip(mesh.face_plant.tolist(), mesh.face_class.tolist(), mesh.face_organ.tolist()))
    side = json.loads((tmp_path / "m.groups.json").read_text())
    assert len(side) == len(keys)


def test_invalid_species_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("generate", "--species", "wheat", "--out", tmp_path / "x.obj")
    assert info.value.code == 2


def test_bad_param_is_config_error(tmp_path):
    assert run("generate", "--param", "bogus=1", "--out", tmp_path / "x.obj") == 2


def test_render_then_stats_matches_in_process(tmp_path):
    run("generate", "--out", tmp_path / "m.obj", *SMALL_LAYOUT)
    assert run("render", "--mesh", tmp_path / "m.obj", "--out-prefix", tmp_path / "r", "--width", 160,
               "--height", 120, "--rgb") == 0
    assert run("stats", "--depth", tmp_path / "r.cdm", "--mask", tmp_path / "r.pgm", "--camera",
               tmp_path / "r.camera.json", "--out", tmp_path / "s.json") == 0
    depth, mask = read_cdm(tmp_path / "r.cdm"), read_pgm(tmp_path / "r.pgm")
    cam = load_camera(tmp_path / "r.camera.json")
    expected = compute_histograms(depth, mask, cam, species_specs("soybean")).to_json() + "\n"
    assert (tmp_path / "s.json").read_text() == expected
    # an RGB render gives the same foreground as the mask file inside the lateral band
    assert run("stats", "--depth", tmp_path / "r.cdm", "--rgb", tmp_path / "r.ppm", "--camera",
               tmp_path / "r.camera.json", "--out", tmp_path / "s2.json") == 0
    assert HistogramSet.load(tmp_path / "s2.json").mask_area <= mask.sum()


def test_stats_maize_bins(tmp_path, capsys):
    run("generate", "--species", "maize", "--out", tmp_path / "m.obj", *SMALL_LAYOUT)
    run("render", "--species", "maize", "--mesh", tmp_path / "m.obj", "--out-prefix", tmp_path / "r",
        "--width", 80, "--height", 60)
    capsys.readouterr()
    assert run("stats", "--species", "maize", "--depth", tmp_path / "r.cdm", "--camera",
               tmp_path / "r.camera.json") == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["depth_hist"]) == 10


def test_stats_corrupted_magic(tmp_path, capsys):
    (tmp_path / "bad.cdm").write_bytes(b"NOPE" + bytes(20))
    run("generate", "--out", tmp_path / "m.obj", *SMALL_LAYOUT)
    run("render", "--mesh", tmp_path / "m.obj", "--out-prefix", tmp_path / "r", "--width", 8, "--height", 6)
    assert run("stats", "--depth", tmp_path / "bad.cdm", "--camera", tmp_path / "r.camera.json") == 3
    assert "offset 0" in capsys.readouterr().err


def test_stats_dimension_mismatch(tmp_path):
    run("generate", "--out", tmp_path / "m.obj", *SMALL_LAYOUT)
    run("render", "--mesh", tmp_path / "m.obj", "--out-prefix", tmp_path / "a", "--width", 8, "--height", 6)
    run("render", "--mesh", tmp_path / "m.obj", "--out-prefix", tmp_path / "b", "--width", 10, "--height", 6)
    assert run("stats", "--depth", tmp_path / "a.cdm", "--camera", tmp_path / "b.camera.json") == 3


@pytest.fixture(scope="module")
def cloud_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cloud") / "c.ply"
    mesh = build_canopy("soybean", SoybeanParams(num_nodes=6.0), CanopyLayout(num_rows=2, plants_per_row=15), seed=3)
    write_ply(sample_surface_points(mesh, 60000, seed=2, ground_extent=(-1.2, 1.2, -1.2, 1.2)), path)
    return path


def test_rowfit_cli(tmp_path, cloud_file, capsys):
    assert run("rowfit", "--cloud", cloud_file, "--out", tmp_path / "cam.json",
               "--sample_box_center=[0, 0, 0.5]") == 0
    cam = load_camera(tmp_path / "cam.json")
    assert np.degrees(np.arccos(abs(cam.rotation[0, 0]))) < 2.0
    diag = json.loads((tmp_path / "cam.json").read_text())["diagnostics"]
    assert diag["rows_found"] >= 2 and "plane_rms_residual" in diag


def test_rowfit_maize_height(tmp_path, cloud_file):
    assert run("rowfit", "--species", "maize", "--cloud", cloud_file, "--out", tmp_path / "cam.json",
               "--sample_box_center=[0, 0, 0.5]", "--sample_count=200000") == 0
    cam = load_camera(tmp_path / "cam.json")
    ground = json.loads((tmp_path / "cam.json").read_text())["diagnostics"]
    height = cam.center @ np.asarray(ground["plane_normal"]) + ground["plane_offset"]
    assert height == pytest.approx(5.0, abs=1e-9)


def test_rowfit_missing_colors(tmp_path, capsys):
    write_ply(PointCloud(np.random.default_rng(0).normal(size=(50, 3))), tmp_path / "nc.ply")
    assert run("rowfit", "--cloud", tmp_path / "nc.ply", "--out", tmp_path / "cam.json") == 3
    assert "colors" in capsys.readouterr().err


def test_rowfit_bad_override(tmp_path, cloud_file):
    assert run("rowfit", "--cloud", cloud_file, "--out", tmp_path / "c.json", "--voxel_size=-1") == 2
    assert run("rowfit", "--cloud", cloud_file, "--out", tmp_path / "c.json", "--nonsense=1") == 2


def test_overrides_rejected_elsewhere(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("generate", "--out", tmp_path / "x.obj", "--foo=1")
    assert info.value.code == 2


def test_fit_metrics_export(tmp_path, capsys):
    cfg = {"species": "soybean", "width": 100, "height": 75, "workers": 1,
           "layout": {"num_rows": 2, "plants_per_row": 4},
           "observation": {"params": {"num_nodes": 9.0}, "seed": 2},
           "opt": {"n_initial": 3, "n_total": 4, "n_runs": 1}}
    (tmp_path / "scene.json").write_text(json.dumps(cfg))
    assert run("fit", "--config", tmp_path / "scene.json", "--out", tmp_path / "fit", "--opt.seed=5") == 0
    summary = json.loads(capsys.readouterr().out)
    assert set(summary["averaged_parameters"]) == {"leaf_length_mult", "petiole_length_mult",
                                                   "petiole_angle_mult", "internode_length_mult", "num_nodes"}
    saved = json.loads((tmp_path / "fit" / "config.json").read_text())
    assert saved["opt"]["seed"] == 5
    assert run("metrics", "--mesh", tmp_path / "fit" / "solution.obj", "--rows", 2, "--plants-per-row", 4,
               "--out", tmp_path / "m.json") == 0
    mesh_metrics = json.loads((tmp_path / "m.json").read_text())
    fit_metrics = json.loads((tmp_path / "fit" / "fit.json").read_text())["metrics"]
    assert mesh_metrics["lai"] == pytest.approx(fit_metrics["lai"], rel=1e-6)
    capsys.readouterr()
    assert run("metrics", "--pred", tmp_path / "fit" / "fit.json", "--truth", tmp_path / "m.json",
               "--out", tmp_path / "report.json") == 0
    assert capsys.readouterr().out.splitlines()[0].split() == ["method", "LAIE", "LAIPE", "AME", "ASDE"]
    assert run("export", "--fit", tmp_path / "fit", "--out-prefix", tmp_path / "exp", "--points", 1000) == 0
    for ext in ("obj", "cdm", "pgm", "camera.json", "ply"):
        assert (tmp_path / f"exp.{ext}").exists()
    assert (tmp_path / "exp.obj").read_bytes() == (tmp_path / "fit" / "solution.obj").read_bytes()


def test_fit_config_error(tmp_path):
    (tmp_path / "bad.json").write_text(json.dumps({"opt": {"n_initial": 10, "n_total": 2}}))
    assert run("fit", "--config", tmp_path / "bad.json") == 2


def test_metrics_requires_inputs():
    assert run("metrics") == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "canopyfit", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "canopyfit" in out.stdout
