"""Point clouds: unprojection, surface sampling and splatting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.morphology.mesh import LEAF, PETIOLE, STEM, LabeledMesh
from canopyfit.render.camera import PinholeCamera

GROUND = 3

DEFAULT_ORGAN_COLORS = {
    LEAF: (62, 140, 48),
    STEM: (96, 128, 58),
    PETIOLE: (84, 134, 52),
    GROUND: (140, 100, 70),
}


@dataclass
class PointCloud:
    points: np.ndarray
    colors: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.uint8).reshape(-1, 3)
            if len(self.colors) != len(self.points):
                raise DomainError(
                    f"{len(self.colors)} colors for {len(self.points)} points")

    def __len__(self) -> int:
        return len(self.points)

    def subset(self, index) -> "PointCloud":
        return PointCloud(self.points[index], None if self.colors is None else self.colors[index])


def unproject(depth: np.ndarray, camera: PinholeCamera) -> PointCloud:
    """One world point per finite depth pixel, in row-major pixel order."""
    depth = np.asarray(depth)
    if depth.shape != (camera.height, camera.width):
        raise DomainError(f"depth shape {depth.shape} does not match camera "
                          f"{camera.height}x{camera.width}")
    rx, ry = camera.pixel_rays()
    fg = np.isfinite(depth)
    z = depth[fg].astype(np.float64)
    cam = np.column_stack([rx[fg] * z, ry[fg] * z, z])
    return PointCloud(camera.to_world(cam))


def splat(cloud: PointCloud, camera: PinholeCamera):
    """Project points to their nearest pixel with a z-buffer; ``(depth, mask)``."""
    depth = np.full((camera.height, camera.width), np.inf)
    if len(cloud):
        uvz = camera.project(cloud.points)
        j = np.floor(uvz[:, 0]).astype(np.int64)
        i = np.floor(uvz[:, 1]).astype(np.int64)
        ok = (uvz[:, 2] > 0) & (i >= 0) & (i < camera.height) & (j >= 0) & (j < camera.width)
        np.minimum.at(depth, (i[ok], j[ok]), uvz[ok, 2])
    mask = np.isfinite(depth)
    return np.where(mask, depth, np.nan).astype(np.float32), mask


def ground_quad(extent) -> LabeledMesh:
    """Horizontal quad at z = 0 covering ``(xmin, xmax, ymin, ymax)``, class GROUND."""
    x0, x1, y0, y1 = extent
    verts = [[x0, y0, 0.0], [x1, y0, 0.0], [x1, y1, 0.0], [x0, y1, 0.0]]
    return LabeledMesh(verts, [[0, 1, 2], [0, 2, 3]], [GROUND, GROUND], [0, 0], [0, 0])


def sample_surface_points(mesh: LabeledMesh, n: int, seed: int = 0,
                          organ_colors: Optional[dict] = None,
                          ground_extent=None, color_noise: float = 0.0) -> PointCloud:
    """Draw ``n`` points area-uniformly over the faces of ``mesh``.

    Each point is colored by the organ class of its face. With
    ``ground_extent`` a ground quad is added to the sampled surface.
    ``color_noise`` adds Gaussian noise (in 0-255 units) to the colors.
    """
    if n <= 0:
        raise DomainError("sample count must be positive")
    colors_by_class = dict(DEFAULT_ORGAN_COLORS)
    colors_by_class.update(organ_colors or {})
    verts = mesh.vertices[mesh.triangles]
    classes = mesh.face_class.astype(np.int64)
    if ground_extent is not None:
        g = ground_quad(ground_extent)
        verts = np.concatenate([verts, g.vertices[g.triangles]])
        classes = np.concatenate([classes, g.face_class.astype(np.int64)])
    if len(verts) == 0:
        raise DomainError("cannot sample points from an empty mesh")
    areas = 0.5 * np.linalg.norm(np.cross(verts[:, 1] - verts[:, 0], verts[:, 2] - verts[:, 0]), axis=1)
    total = areas.sum()
    if total <= 0:
        raise DomainError("mesh has zero surface area")
    rng = np.random.default_rng(seed)
    face = rng.choice(len(verts), size=n, p=areas / total)
    r1 = np.sqrt(rng.uniform(size=n))
    r2 = rng.uniform(size=n)
    tri = verts[face]
    pts = ((1 - r1)[:, None] * tri[:, 0] + (r1 * (1 - r2))[:, None] * tri[:, 1]
           + (r1 * r2)[:, None] * tri[:, 2])
    palette = np.zeros((max(colors_by_class) + 1, 3))
    for cls, rgb in colors_by_class.items():
        palette[cls] = rgb
    colors = palette[classes[face]]
    if color_noise > 0:
        colors = colors + rng.normal(0.0, color_noise, size=colors.shape)
    return PointCloud(pts, np.clip(np.rint(colors), 0, 255).astype(np.uint8))
