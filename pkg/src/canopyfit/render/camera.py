"""Pinhole camera with OpenCV axis conventions (x right, y down, z forward)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from canopyfit.errors import DomainError, FormatError

DEFAULT_WIDTH = 994
DEFAULT_HEIGHT = 738
DEFAULT_VFOV = 50.0

# world -> camera rotation for a camera looking straight down with x along +x
DOWNWARD = np.diag([1.0, -1.0, -1.0])


@dataclass
class PinholeCamera:
    """``rotation`` maps world to camera axes: ``x_cam = R @ (x_world - center)``.

    Pixel ``(row i, col j)`` has its center at image coordinates
    ``(u, v) = (j + 0.5, i + 0.5)``.
    """

    rotation: np.ndarray
    center: np.ndarray
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    vfov_deg: float = DEFAULT_VFOV

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        self.center = np.asarray(self.center, dtype=float).reshape(3)
        self.width = int(self.width)
        self.height = int(self.height)
        self.vfov_deg = float(self.vfov_deg)
        if self.width <= 0 or self.height <= 0:
            raise DomainError(f"camera resolution must be positive, got {self.width}x{self.height}")
        if not 0.0 < self.vfov_deg < 180.0:
            raise DomainError(f"vertical FOV must lie in (0, 180), got {self.vfov_deg}")
        if not np.allclose(self.rotation @ self.rotation.T, np.eye(3), atol=1e-6):
            raise DomainError("camera rotation is not orthonormal")

    @property
    def focal(self) -> float:
        return 0.5 * self.height / np.tan(0.5 * np.radians(self.vfov_deg))

    @property
    def principal_point(self) -> tuple[float, float]:
        return 0.5 * self.width, 0.5 * self.height

    @property
    def optical_axis(self) -> np.ndarray:
        return self.rotation[2]

    def to_camera(self, points) -> np.ndarray:
        return (np.asarray(points, float) - self.center) @ self.rotation.T

    def to_world(self, cam_points) -> np.ndarray:
        return np.asarray(cam_points, float) @ self.rotation + self.center

    def project(self, points) -> np.ndarray:
        """World points -> ``(n, 3)`` of ``(u, v, depth)``."""
        pc = self.to_camera(points)
        f = self.focal
        cx, cy = self.principal_point
        z = pc[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.column_stack([f * pc[:, 0] / z + cx, f * pc[:, 1] / z + cy, z])

    def pixel_rays(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-pixel camera-frame ``x/z`` and ``y/z`` grids, each ``(height, width)``."""
        f = self.focal
        cx, cy = self.principal_point
        xs = (np.arange(self.width) + 0.5 - cx) / f
        ys = (np.arange(self.height) + 0.5 - cy) / f
        return np.broadcast_to(xs, (self.height, self.width)), np.broadcast_to(ys[:, None], (self.height, self.width))

    def to_dict(self) -> dict:
        return {
            "center": [float(c) for c in self.center],
            "rotation": [float(r) for r in self.rotation.ravel()],
            "width": self.width,
            "height": self.height,
            "vfov_deg": self.vfov_deg,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PinholeCamera":
        try:
            return cls(rotation=np.reshape(data["rotation"], (3, 3)), center=data["center"],
                       width=data["width"], height=data["height"], vfov_deg=data["vfov_deg"])
        except KeyError as exc:
            raise FormatError(f"camera JSON is missing field {exc.args[0]!r}") from None


def canonical_camera(render_height: float, width: int = DEFAULT_WIDTH, height: int = DEFAULT_HEIGHT,
                     vfov_deg: float = DEFAULT_VFOV) -> PinholeCamera:
    """Downward camera at ``(0, 0, render_height)`` with its x axis along the rows."""
    return PinholeCamera(DOWNWARD, [0.0, 0.0, render_height], width, height, vfov_deg)


def save_camera(camera: PinholeCamera, path: str | Path, **extra) -> None:
    data = camera.to_dict()
    data.update(extra)
    Path(path).write_text(json.dumps(data, indent=2))


def load_camera(path: str | Path) -> PinholeCamera:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at offset {exc.pos}") from None
    return PinholeCamera.from_dict(data)
