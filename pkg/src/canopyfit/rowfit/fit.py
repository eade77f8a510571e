"""Standardized camera placement and the end-to-end row-fitting procedure."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.render.camera import PinholeCamera
from canopyfit.render.cloud import PointCloud
from canopyfit.rowfit.config import RowFitConfig
from canopyfit.rowfit.ransac import LineModel, PlaneModel, fit_rows, ransac_plane
from canopyfit.rowfit.segment import sample_in_box, segment_cloud, voxel_downsample


def standardized_camera(plane: PlaneModel, best_row: LineModel, cfg: RowFitConfig = RowFitConfig(),
                        render_height: float | None = None) -> PinholeCamera:
    """Downward camera ``render_height`` above the row center, x axis along the row.

    The row direction sign is chosen so the camera x axis points toward world
    +x (toward +y when the row is exactly perpendicular to x).
    """
    height = cfg.render_height if render_height is None else render_height
    n = plane.normal / np.linalg.norm(plane.normal)
    x = best_row.direction - (best_row.direction @ n) * n
    x /= np.linalg.norm(x)
    if x[0] < -1e-12 or (abs(x[0]) <= 1e-12 and x[1] < 0):
        x = -x
    z = -n
    y = np.cross(z, x)
    center = plane.project(np.asarray(best_row.point, float)[None])[0] + height * n
    return PinholeCamera(np.vstack([x, y, z]), center, cfg.width, cfg.height, cfg.vfov_deg)


@dataclass
class RowFitResult:
    plane: PlaneModel
    rows: list
    camera: PinholeCamera
    diagnostics: dict = field(default_factory=dict)


def run_rowfit(cloud: PointCloud, cfg: RowFitConfig = RowFitConfig(), seed: int = 0) -> RowFitResult:
    """Sample, downsample, segment, fit ground and rows, and place the camera."""
    if cloud.colors is None:
        raise DomainError("point cloud has no colors (missing property 'red'/'green'/'blue')")
    sampled = sample_in_box(cloud, cfg.sample_box_center, cfg.sample_box_size, cfg.sample_count, seed)
    reduced = voxel_downsample(sampled, cfg.voxel_size)
    ground, plant = segment_cloud(reduced, cfg)
    if len(ground) < 3:
        raise DomainError(f"segmentation left {len(ground)} ground points; need at least 3")
    if len(plant) < 2:
        raise DomainError(f"segmentation left {len(plant)} plant points; need at least 2")
    plane = ransac_plane(ground.points, cfg.plane_inlier, cfg.plane_max_iters, seed)

    dense = len(plant) > cfg.dense_fraction_trigger * (len(plant) + len(ground))
    percentile = cfg.dense_percentile if dense else cfg.slice_percentile
    inlier = cfg.dense_row_inlier if dense else cfg.row_inlier
    height = cfg.dense_render_height if dense else cfg.render_height

    plant_pts = plant.points
    if cfg.roi_radius is not None:
        rel = plane.project(plant_pts) - plane.project(np.asarray(cfg.sample_box_center, float)[None])
        plant_pts = plant_pts[np.linalg.norm(rel, axis=1) <= cfg.roi_radius]
    rows = fit_rows(plant_pts, plane, cfg, seed, percentile=percentile, inlier_thresh=inlier)
    if not rows:
        raise DomainError("row fitting found no rows")
    best = max(rows, key=lambda r: r.n_inliers)
    camera = standardized_camera(plane, best, cfg, render_height=height)
    inl = ground.points[plane.inliers]
    residual = float(np.sqrt(np.mean(plane.distance(inl) ** 2))) if len(inl) else 0.0
    diagnostics = {
        "points_sampled": len(sampled),
        "points_voxelized": len(reduced),
        "ground_points": len(ground),
        "plant_points": len(plant),
        "dense_canopy": bool(dense),
        "plane_normal": [float(v) for v in plane.normal],
        "plane_offset": float(plane.offset),
        "plane_inliers": int(len(plane.inliers)),
        "plane_rms_residual": residual,
        "rows_found": len(rows),
        "row_inlier_counts": [r.n_inliers for r in rows],
        "best_row_direction": [float(v) for v in best.direction],
        "render_height": float(height),
    }
    return RowFitResult(plane, rows, camera, diagnostics)
