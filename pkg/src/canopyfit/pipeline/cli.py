"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 data or format
error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from canopyfit import __version__
from canopyfit.errors import ConfigError, DomainError, FormatError, NumericError
from canopyfit.loss import compute_histograms, species_specs
from canopyfit.metrics import CanopyMetrics, compute_metrics, score
from canopyfit.morphology.canopy import CanopyLayout, build_canopy
from canopyfit.morphology.mesh import read_obj, write_obj
from canopyfit.morphology.params import SPECIES, param_names, params_class
from canopyfit.pipeline.config import DEFAULT_RENDER_HEIGHT, MaskRule, apply_overrides, load_config
from canopyfit.pipeline.fit import fit_scene, load_fit
from canopyfit.pipeline.scene import observation_mask, render_rgb
from canopyfit.render.camera import canonical_camera, load_camera, save_camera
from canopyfit.render.cloud import sample_surface_points
from canopyfit.render.formats import read_cdm, read_pgm, read_ply, read_ppm, write_cdm, write_pgm, write_ply, write_ppm
from canopyfit.render.raster import render_depth
from canopyfit.rowfit.config import RowFitConfig, rowfit_preset
from canopyfit.rowfit.fit import run_rowfit

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _params_from_args(species: str, params_json, pairs):
    values = {}
    if params_json:
        data = json.loads(Path(params_json).read_text())
        values.update(data.get("params", data))
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"parameter {item!r} is not of the form name=value")
        k, v = item.split("=", 1)
        values[k] = float(v)
    try:
        return params_class(species)(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _layout(args) -> CanopyLayout:
    return CanopyLayout(args.row_spacing, args.plant_spacing, args.rows, args.plants_per_row, args.jitter)


def _add_layout_args(p):
    d = CanopyLayout()
    p.add_argument("--rows", type=int, default=d.num_rows)
    p.add_argument("--plants-per-row", type=int, default=d.plants_per_row)
    p.add_argument("--row-spacing", type=float, default=d.row_spacing)
    p.add_argument("--plant-spacing", type=float, default=d.plant_spacing)
    p.add_argument("--jitter", type=float, default=d.position_jitter_std)


def cmd_generate(args, extra) -> int:
    params = _params_from_args(args.species, args.params, args.param)
    layout = _layout(args)
    mesh = build_canopy(args.species, params, layout, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    groups = write_obj(mesh, out)
    names = param_names(args.species)
    record = {"species": args.species, "params": {k: float(getattr(params, k)) for k in names},
              "values": [float(getattr(params, k)) for k in names],
              "seed": args.seed, "layout": layout.to_dict()}
    out.with_suffix(".params.json").write_text(json.dumps(record, indent=2) + "\n")
    print(f"wrote {out} ({mesh.n_faces} faces, {len(groups)} groups)")
    return EXIT_OK


def _camera_from_args(args):
    if args.camera:
        return load_camera(args.camera)
    height = args.render_height if args.render_height is not None else DEFAULT_RENDER_HEIGHT[args.species]
    return canonical_camera(height, args.width, args.height, args.vfov)


def cmd_render(args, extra) -> int:
    mesh = read_obj(args.mesh)
    camera = _camera_from_args(args)
    out = Path(args.out_prefix)
    out.parent.mkdir(parents=True, exist_ok=True)
    depth, mask = render_depth(mesh, camera)
    write_cdm(depth, f"{out}.cdm")
    write_pgm(mask, f"{out}.pgm")
    save_camera(camera, f"{out}.camera.json")
    if args.rgb:
        rgb, _ = render_rgb(mesh, camera)
        write_ppm(rgb, f"{out}.ppm")
    print(f"wrote {out}.cdm, {out}.pgm, {out}.camera.json (foreground {mask.mean():.3f})")
    return EXIT_OK


def cmd_rowfit(args, extra) -> int:
    base = rowfit_preset(args.species).to_dict()
    cfg = RowFitConfig.from_dict(apply_overrides(base, extra))
    cloud = read_ply(args.cloud)
    result = run_rowfit(cloud, cfg, seed=args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_camera(result.camera, args.out, diagnostics=result.diagnostics)
    print(json.dumps(result.diagnostics, indent=2))
    return EXIT_OK


def cmd_stats(args, extra) -> int:
    depth = read_cdm(args.depth).astype(float)
    camera = load_camera(args.camera)
    if depth.shape != (camera.height, camera.width):
        raise DomainError(f"depth map {depth.shape} does not match camera {camera.height}x{camera.width}")
    height = args.render_height if args.render_height is not None else DEFAULT_RENDER_HEIGHT[args.species]
    if args.mask:
        mask = read_pgm(args.mask)
        if mask.shape != depth.shape:
            raise DomainError(f"mask {mask.shape} and depth {depth.shape} sizes differ")
    elif args.rgb:
        mask = observation_mask(depth, read_ppm(args.rgb), camera, MaskRule.for_species(args.species), height)
    else:
        mask = np.isfinite(depth)
    stats = compute_histograms(depth, mask, camera, species_specs(args.species, height))
    text = stats.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fit(args, extra) -> int:
    overrides = list(extra)
    if args.species:
        overrides.append(f"species={args.species}")
    if args.preset:
        overrides.append(f"preset={args.preset}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    cfg = load_config(args.config, overrides)
    result = fit_scene(cfg, output_dir=args.out, resume=args.resume)
    summary = {"averaged_parameters": dict(zip(result.names, map(float, result.averaged))),
               "metrics": result.metrics.to_dict(), "loss": result.loss,
               "failed_runs": len(result.failures)}
    if result.truth_metrics is not None:
        summary["truth_metrics"] = result.truth_metrics.to_dict()
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _load_metrics(path) -> CanopyMetrics:
    data = json.loads(Path(path).read_text())
    if "metrics" in data:
        data = data["metrics"]
    return CanopyMetrics.from_dict(data)


def cmd_metrics(args, extra) -> int:
    if args.mesh:
        mesh = read_obj(args.mesh)
        ground = args.ground_area if args.ground_area is not None else _layout(args).ground_area
        text = json.dumps(compute_metrics(mesh, ground).to_dict(), indent=2)
        print(text)
        if args.out:
            Path(args.out).write_text(text + "\n")
        return EXIT_OK
    if not args.pred or not args.truth:
        raise ConfigError("metrics needs --mesh, or --pred and --truth lists")
    report = score([_load_metrics(p) for p in args.pred], [_load_metrics(p) for p in args.truth])
    print(report.to_table(args.label), end="")
    if args.out:
        report.save(args.out)
    return EXIT_OK


def cmd_export(args, extra) -> int:
    fit = load_fit(args.fit)
    species = fit["species"]
    params = params_class(species)(**dict(zip(fit["parameter_names"], fit["averaged_parameters"])))
    config_path = Path(args.fit) / "config.json" if Path(args.fit).is_dir() else Path(args.fit).parent / "config.json"
    cfg = load_config(config_path if config_path.exists() else None, [f"species={species}"])
    seed = cfg.report_seed if args.seed is None else args.seed
    mesh = build_canopy(species, params, cfg.layout, seed=seed)
    out = Path(args.out_prefix)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_obj(mesh, f"{out}.obj")
    camera = canonical_camera(cfg.render_height, cfg.width, cfg.height, cfg.vfov_deg)
    depth, mask = render_depth(mesh, camera)
    write_cdm(depth, f"{out}.cdm")
    write_pgm(mask, f"{out}.pgm")
    save_camera(camera, f"{out}.camera.json")
    write_ply(sample_surface_points(mesh, args.points, seed=seed), f"{out}.ply")
    print(f"wrote {out}.obj, {out}.cdm, {out}.pgm, {out}.camera.json, {out}.ply")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="canopyfit", description="Fit procedural crop canopies to depth maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a procedural canopy mesh")
    p.add_argument("--species", choices=SPECIES, default="soybean")
    p.add_argument("--params", help="JSON file with parameter values")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_layout_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="render depth, mask and camera from a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--species", choices=SPECIES, default="soybean")
    p.add_argument("--camera", help="camera JSON; default is the canonical downward camera")
    p.add_argument("--render-height", type=float)
    p.add_argument("--width", type=int, default=994)
    p.add_argument("--height", type=int, default=738)
    p.add_argument("--vfov", type=float, default=50.0)
    p.add_argument("--rgb", action="store_true", help="also write an organ-colored PPM")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("rowfit", help="fit ground and rows in a PLY cloud, write a camera")
    p.add_argument("--cloud", required=True)
    p.add_argument("--species", choices=SPECIES, default="soybean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rowfit, accepts_overrides=True)

    p = sub.add_parser("stats", help="histogram statistics of a depth map")
    p.add_argument("--depth", required=True)
    p.add_argument("--camera", required=True)
    p.add_argument("--mask")
    p.add_argument("--rgb")
    p.add_argument("--species", choices=SPECIES, default="soybean")
    p.add_argument("--render-height", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fit", help="fit morphology parameters to an observation")
    p.add_argument("--config")
    p.add_argument("--species", choices=SPECIES)
    p.add_argument("--preset", choices=("desk", "full"))
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_fit, accepts_overrides=True)

    p = sub.add_parser("metrics", help="canopy metrics of a mesh or scores over scenes")
    p.add_argument("--mesh")
    p.add_argument("--ground-area", type=float)
    p.add_argument("--pred", nargs="+")
    p.add_argument("--truth", nargs="+")
    p.add_argument("--label", default="fit")
    p.add_argument("--out")
    _add_layout_args(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export", help="regenerate and export a fitted canopy")
    p.add_argument("--fit", required=True, help="fit output directory or fit.json")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--seed", type=int, help="generation seed; default is the fit's report seed")
    p.add_argument("--points", type=int, default=200_000)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and not getattr(args, "accepts_overrides", False):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    bad = [e for e in extra if not (e.startswith("--") and "=" in e)]
    if bad:
        parser.error(f"overrides must look like --key=value: {' '.join(bad)}")
    try:
        return args.func(args, extra)
    except ConfigError as exc:
        print(f"canopyfit: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"canopyfit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, ArithmeticError) as exc:
        print(f"canopyfit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
