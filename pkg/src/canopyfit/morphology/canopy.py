"""Row-planted canopy scenes."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.morphology.maize import build_maize
from canopyfit.morphology.mesh import LabeledMesh, concatenate
from canopyfit.morphology.noise import PlantNoise
from canopyfit.morphology.params import MaizeParams, PlantParams, SoybeanParams
from canopyfit.morphology.profile import MorphologyProfile, resolve_profile
from canopyfit.morphology.soybean import build_soybean


@dataclass(frozen=True)
class CanopyLayout:
    """Rows run parallel to the x axis and are centered on the origin."""

    row_spacing: float = 0.76
    plant_spacing: float = 0.12
    num_rows: int = 3
    plants_per_row: int = 15
    position_jitter_std: float = 0.01

    def __post_init__(self):
        if not (self.row_spacing > 0 and self.plant_spacing > 0):
            raise DomainError("row_spacing and plant_spacing must be positive")
        if self.num_rows < 1 or self.plants_per_row < 1:
            raise DomainError("num_rows and plants_per_row must be at least 1")
        if self.position_jitter_std < 0:
            raise DomainError("position_jitter_std must be non-negative")

    @property
    def n_plants(self) -> int:
        return self.num_rows * self.plants_per_row

    @property
    def ground_area(self) -> float:
        """Footprint of the planted grid, one spacing cell per plant."""
        return self.num_rows * self.row_spacing * self.plants_per_row * self.plant_spacing

    def grid_positions(self) -> np.ndarray:
        """Nominal ``(n_plants, 2)`` base positions, row-major."""
        ys = (np.arange(self.num_rows) - (self.num_rows - 1) / 2.0) * self.row_spacing
        xs = (np.arange(self.plants_per_row) - (self.plants_per_row - 1) / 2.0) * self.plant_spacing
        yy, xx = np.meshgrid(ys, xs, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def to_dict(self) -> dict:
        return asdict(self)


def build_canopy(species: str, params: PlantParams, layout: CanopyLayout = CanopyLayout(),
                 profile: Optional[MorphologyProfile] = None, seed: int = 0) -> LabeledMesh:
    """Instantiate one plant per grid slot with ground plane ``z = 0``.

    Plant ``i * plants_per_row + j`` sits in row ``i``, slot ``j``; its
    randomness, including its position jitter, comes from the ``(seed, plant)``
    stream, so plants differ from each other but not between calls.
    """
    if species == "soybean":
        build = build_soybean
        expected = SoybeanParams
    elif species == "maize":
        build = build_maize
        expected = MaizeParams
    else:
        raise DomainError(f"unknown species {species!r}")
    if not isinstance(params, expected):
        raise DomainError(f"{species} canopy needs {expected.__name__}")
    profile = resolve_profile(species, profile)
    plants = []
    for index, (x, y) in enumerate(layout.grid_positions()):
        noise = PlantNoise.draw(seed, index)
        dx, dy = layout.position_jitter_std * noise.position
        plants.append(build(params, profile, noise, index, (x + dx, y + dy, 0.0)))
    return concatenate(plants)
