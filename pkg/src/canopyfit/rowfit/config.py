"""Row-fitting configuration and species presets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from canopyfit.errors import ConfigError


@dataclass(frozen=True)
class RowFitConfig:
    """Thresholds for segmentation, plane/row RANSAC and camera placement.

    Color thresholds apply to a normalized L*a*b*:
    ``L' = L* + lab_offset[0]``, ``a' = lab_scale[1] * a*``,
    ``b' = lab_scale[2] * b*``. Points with ``L' < lab_thresholds[0]`` and
    ``b' < lab_thresholds[2]`` are dropped; of the rest, ``a' < lab_thresholds[1]``
    is ground and everything else is plant. The negative a* scale makes green
    (a* < 0) map to plant and soil (a* > 0) to ground.
    """

    sample_box_center: tuple = (0.0, 0.0, 0.0)
    sample_box_size: tuple = (2.0, 2.0, 3.0)
    sample_count: int = 100_000
    voxel_size: float = 0.01
    lab_thresholds: tuple = (0.0, 2.0, 1.0)
    lab_scale: tuple = (1.0, -0.5, 0.5)
    lab_offset: tuple = (-50.0, 0.0, 0.0)
    plane_inlier: float = 0.05
    plane_max_iters: int = 1000
    slice_percentile: float = 50.0
    row_inlier: float = 0.20
    row_max_iters: int = 1000
    row_stop_min_points: int = 1000
    row_stop_fraction: float = 0.20
    render_height: float = 1.0
    dense_fraction_trigger: float = 0.75
    dense_percentile: float = 70.0
    dense_row_inlier: float = 0.25
    dense_render_height: float = 1.25
    roi_radius: Optional[float] = None
    width: int = 994
    height: int = 738
    vfov_deg: float = 50.0

    def __post_init__(self):
        for name in ("voxel_size", "plane_inlier", "row_inlier", "render_height",
                     "dense_row_inlier", "dense_render_height"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("slice_percentile", "dense_percentile"):
            if not 0.0 < getattr(self, name) < 100.0:
                raise ConfigError(f"{name} must lie in (0, 100)")
        if any(s <= 0 for s in self.sample_box_size):
            raise ConfigError("sample_box_size must be positive")
        if self.sample_count < 1 or self.plane_max_iters < 1 or self.row_max_iters < 1:
            raise ConfigError("counts must be at least 1")
        if self.roi_radius is not None and self.roi_radius <= 0:
            raise ConfigError("roi_radius must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RowFitConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown rowfit config keys: {sorted(unknown)}")
        data = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**data)


SOYBEAN_ROWFIT = RowFitConfig()

MAIZE_ROWFIT = replace(
    RowFitConfig(),
    sample_count=5_000_000,
    sample_box_size=(2.0, 2.0, 2.0),
    lab_thresholds=(32.0, 0.0, 0.0),
    plane_inlier=0.10,
    render_height=5.0,
    roi_radius=2.0,
)


def rowfit_preset(species: str) -> RowFitConfig:
    if species == "soybean":
        return SOYBEAN_ROWFIT
    if species == "maize":
        return MAIZE_ROWFIT
    raise ConfigError(f"no rowfit preset for species {species!r}")
