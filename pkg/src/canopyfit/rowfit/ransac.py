"""RANSAC ground-plane and sequential row-line fitting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.rowfit.config import RowFitConfig

_CHUNK = 64


@dataclass
class PlaneModel:
    """Plane ``normal . x + offset = 0`` with a unit normal pointing to +z."""

    normal: np.ndarray
    offset: float
    inliers: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    def distance(self, points) -> np.ndarray:
        """Signed distance (positive above the ground)."""
        return np.asarray(points, float) @ self.normal + self.offset

    def project(self, points) -> np.ndarray:
        points = np.asarray(points, float)
        return points - np.outer(self.distance(points), self.normal)

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal in-plane axes, the first as close to world +x as possible."""
        ref = np.array([1.0, 0.0, 0.0])
        if abs(self.normal @ ref) > 0.9:
            ref = np.array([0.0, 1.0, 0.0])
        e1 = ref - (ref @ self.normal) * self.normal
        e1 /= np.linalg.norm(e1)
        return e1, np.cross(self.normal, e1)


@dataclass
class LineModel:
    """Row line: ``point`` lies in the ground plane, ``direction`` is a unit vector."""

    point: np.ndarray
    direction: np.ndarray
    inliers: np.ndarray

    @property
    def n_inliers(self) -> int:
        return len(self.inliers)


def _oriented(normal: np.ndarray) -> np.ndarray:
    return -normal if normal[2] < 0 else normal


def fit_plane_lsq(points) -> tuple[np.ndarray, float]:
    """Total least-squares plane through ``points``."""
    points = np.asarray(points, float)
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    normal = _oriented(vt[-1] / np.linalg.norm(vt[-1]))
    return normal, float(-normal @ centroid)


def ransac_plane(points, inlier_thresh: float = 0.05, max_iters: int = 1000,
                 seed: int = 0) -> PlaneModel:
    """Fit a plane by 3-point RANSAC, then refit on the consensus set.

    Hypotheses are ranked by inlier count; ties keep the earliest hypothesis.
    Colinear draws are skipped.
    """
    points = np.asarray(points, float)
    n = len(points)
    if n < 3:
        raise DomainError(f"plane fitting needs at least 3 points, got {n}")
    if n == 3:
        normal, offset = fit_plane_lsq(points)
        return PlaneModel(normal, offset, np.arange(3))
    rng = np.random.default_rng(seed)
    draws = np.stack([rng.choice(n, size=3, replace=False) for _ in range(max_iters)])
    p0, p1, p2 = points[draws[:, 0]], points[draws[:, 1]], points[draws[:, 2]]
    normals = np.cross(p1 - p0, p2 - p0)
    norms = np.linalg.norm(normals, axis=1)
    valid = norms > 1e-12 * np.maximum(1.0, np.linalg.norm(p1 - p0, axis=1) ** 2)
    normals = normals[valid] / norms[valid, None]
    offsets = -np.einsum("ij,ij->i", normals, p0[valid])
    if len(normals) == 0:
        raise DomainError("all RANSAC plane draws were colinear")
    best_count, best = -1, 0
    for s in range(0, len(normals), _CHUNK):
        dist = np.abs(points @ normals[s:s + _CHUNK].T + offsets[s:s + _CHUNK])
        counts = (dist < inlier_thresh).sum(axis=0)
        k = int(np.argmax(counts))
        if counts[k] > best_count:
            best_count, best = int(counts[k]), s + k
    inliers = np.flatnonzero(np.abs(points @ normals[best] + offsets[best]) < inlier_thresh)
    normal, offset = fit_plane_lsq(points[inliers])
    return PlaneModel(normal, offset, inliers)


def _ransac_line_2d(xy: np.ndarray, thresh: float, iters: int, rng) -> np.ndarray:
    """Indices of the consensus set of the best 2-point line hypothesis."""
    n = len(xy)
    i = rng.integers(0, n, size=iters)
    j = (i + rng.integers(1, n, size=iters)) % n
    d = xy[j] - xy[i]
    length = np.linalg.norm(d, axis=1)
    ok = length > 1e-12
    i, d, length = i[ok], d[ok], length[ok]
    if len(i) == 0:
        return np.arange(n)
    nrm = np.column_stack([-d[:, 1], d[:, 0]]) / length[:, None]
    c = np.einsum("ij,ij->i", nrm, xy[i])
    best_count, best = -1, 0
    for s in range(0, len(i), _CHUNK):
        dist = np.abs(xy @ nrm[s:s + _CHUNK].T - c[s:s + _CHUNK])
        counts = (dist < thresh).sum(axis=0)
        k = int(np.argmax(counts))
        if counts[k] > best_count:
            best_count, best = int(counts[k]), s + k
    return np.flatnonzero(np.abs(xy @ nrm[best] - c[best]) < thresh)


def fit_rows(plant_points, plane: PlaneModel, cfg: RowFitConfig = RowFitConfig(), seed: int = 0,
             percentile: float | None = None, inlier_thresh: float | None = None) -> list[LineModel]:
    """Sequential RANSAC over the upper slice of the plant points.

    Points below the slice percentile of height above the plane are
    discarded; lines are fitted in plane coordinates and each line's inliers
    are removed before the next round. Rounds continue until fewer than
    ``cfg.row_stop_min_points`` or fewer than ``cfg.row_stop_fraction`` of the
    sliced points remain. ``percentile``/``inlier_thresh`` override the config
    values. Returned ``inliers`` index into ``plant_points``.
    """
    percentile = cfg.slice_percentile if percentile is None else percentile
    inlier_thresh = cfg.row_inlier if inlier_thresh is None else inlier_thresh
    max_iters = cfg.row_max_iters
    stop_min_points, stop_fraction = cfg.row_stop_min_points, cfg.row_stop_fraction
    pts = np.asarray(plant_points, float).reshape(-1, 3)
    if len(pts) < 2:
        return []
    height = plane.distance(pts)
    keep = np.flatnonzero(height >= np.percentile(height, percentile))
    e1, e2 = plane.basis()
    xy = np.column_stack([pts[keep] @ e1, pts[keep] @ e2])
    rng = np.random.default_rng(seed)
    start = len(keep)
    remaining = np.arange(start)
    lines = []
    while len(remaining) >= 2:
        local = _ransac_line_2d(xy[remaining], inlier_thresh, max_iters, rng)
        members = remaining[local]
        centroid = xy[members].mean(axis=0)
        if len(members) >= 2:
            _, _, vt = np.linalg.svd(xy[members] - centroid, full_matrices=False)
            d2 = vt[0]
        else:
            d2 = np.array([1.0, 0.0])
        if d2[0] < 0 or (d2[0] == 0 and d2[1] < 0):
            d2 = -d2
        direction = d2[0] * e1 + d2[1] * e2
        point = plane.project(pts[keep[members]].mean(axis=0)[None])[0]
        lines.append(LineModel(point, direction / np.linalg.norm(direction), keep[members]))
        remaining = np.delete(remaining, local)
        if len(remaining) < stop_min_points or len(remaining) < stop_fraction * start:
            break
    return lines
