"""Point-cloud preparation: box sampling, voxel downsampling, color segmentation."""

from __future__ import annotations

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.render.cloud import PointCloud
from canopyfit.rowfit.color import rgb_to_lab
from canopyfit.rowfit.config import RowFitConfig


def sample_in_box(cloud: PointCloud, center, size, count: int, seed: int = 0) -> PointCloud:
    """Keep points inside the box, then at most ``count`` of them at random."""
    lo = np.asarray(center, float) - 0.5 * np.asarray(size, float)
    hi = lo + np.asarray(size, float)
    inside = np.flatnonzero(np.all((cloud.points >= lo) & (cloud.points <= hi), axis=1))
    if len(inside) > count:
        rng = np.random.default_rng(seed)
        inside = np.sort(rng.choice(inside, size=count, replace=False))
    return cloud.subset(inside)


def voxel_downsample(cloud: PointCloud, voxel_size: float) -> PointCloud:
    """Replace the points of each occupied voxel by their centroid (and mean color)."""
    if len(cloud) == 0:
        return cloud
    keys = np.floor(cloud.points / voxel_size).astype(np.int64)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    m = len(counts)
    pts = np.column_stack([np.bincount(inverse, cloud.points[:, k], m) for k in range(3)])
    pts /= counts[:, None]
    colors = None
    if cloud.colors is not None:
        colors = np.column_stack([np.bincount(inverse, cloud.colors[:, k].astype(float), m)
                                  for k in range(3)]) / counts[:, None]
        colors = np.clip(np.rint(colors), 0, 255)
    return PointCloud(pts, colors)


def normalized_lab(rgb, cfg: RowFitConfig) -> np.ndarray:
    lab = rgb_to_lab(rgb)
    return lab * np.asarray(cfg.lab_scale) + np.asarray(cfg.lab_offset)


def segment_cloud(cloud: PointCloud, cfg: RowFitConfig) -> tuple[PointCloud, PointCloud]:
    """Split a colored cloud into ``(ground, plant)``; dark unsaturated points are dropped."""
    if cloud.colors is None:
        raise DomainError("point cloud has no colors (missing property 'red'/'green'/'blue')")
    if len(cloud) == 0:
        return cloud, cloud
    lab = normalized_lab(cloud.colors, cfg)
    l_th, a_th, b_th = cfg.lab_thresholds
    keep = ~((lab[:, 0] < l_th) & (lab[:, 2] < b_th))
    ground = keep & (lab[:, 1] < a_th)
    plant = keep & ~ground
    return cloud.subset(np.flatnonzero(ground)), cloud.subset(np.flatnonzero(plant))
