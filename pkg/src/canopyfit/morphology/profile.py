"""Per-node-rank morphology profiles.

Profiles are tables indexed by node rank counted from the bottom of the main
stem (rank 1 is the lowest node). The shipped defaults are plausible smooth
tables, not measured field data; every value can be overridden from JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from canopyfit.errors import ConfigError

_TABLE_KEYS = {
    "soybean": ("leaf_length", "leaf_width", "petiole_length", "petiole_angle", "internode_length"),
    "maize": ("leaf_length", "leaf_width", "internode_length"),
}


@dataclass(frozen=True)
class MorphologyProfile:
    """Geometry tables for one species.

    Lengths are in meters, angles in degrees. ``branch`` holds the single
    variable set shared by all soybean branch nodes; ``bend_poly`` holds the
    maize bending polynomial coefficients (constant, linear, quadratic) in
    effective leaf order.
    """

    species: str
    tables: dict
    branch: dict = field(default_factory=dict)
    branch_node_distribution: dict = field(default_factory=dict)
    angle_noise_std: float = 5.0
    azimuth_noise_std: float = 60.0
    stem_radius: float = 0.003
    petiole_radius: float = 0.0015
    leaflet_spread_deg: float = 20.0
    petiolule_fraction: float = 0.2
    leaf_angle: float = 30.0
    bend_poly: tuple = (110.0, -6.0, 0.1)
    tip_width_fraction: float = 0.15

    def __post_init__(self):
        self.validate()

    @property
    def max_rank(self) -> int:
        return min(len(v) for v in self.tables.values())

    def table(self, key: str) -> np.ndarray:
        return np.asarray(self.tables[key], dtype=float)

    def validate(self) -> None:
        if self.species not in _TABLE_KEYS:
            raise ConfigError(f"profile species {self.species!r} unknown")
        if not self.tables:
            raise ConfigError("profile has no tables")
        for key in _TABLE_KEYS[self.species]:
            if key not in self.tables:
                raise ConfigError(f"{self.species} profile is missing table {key!r}")
            values = np.asarray(self.tables[key], dtype=float)
            if values.ndim != 1 or values.size == 0:
                raise ConfigError(f"profile table {key!r} is empty")
            if not np.all(np.isfinite(values)) or np.any(values <= 0):
                raise ConfigError(f"profile table {key!r} must be positive")
        if self.species == "soybean":
            for key in ("leaf_length", "leaf_width", "petiole_length", "petiole_angle",
                        "internode_length", "branch_angle"):
                if self.branch.get(key, 0) <= 0:
                    raise ConfigError(f"soybean branch variable {key!r} must be positive")
            dist = self.branch_node_distribution
            if not dist:
                raise ConfigError("branch node distribution is empty")
            counts = [int(k) for k in dist]
            if min(counts) < 1 or max(counts) > 2:
                raise ConfigError("branch node counts must lie in {1, 2}")
            probs = np.array(list(dist.values()), dtype=float)
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
                raise ConfigError("branch node distribution must sum to 1")
        if self.angle_noise_std < 0 or self.azimuth_noise_std < 0:
            raise ConfigError("noise standard deviations must be non-negative")
        if not 0 < self.tip_width_fraction <= 1:
            raise ConfigError("tip_width_fraction must lie in (0, 1]")

    def to_dict(self) -> dict:
        out = {
            "species": self.species,
            "tables": {k: {"length": len(v), "values": [float(x) for x in v]}
                       for k, v in self.tables.items()},
            "angle_noise_std": self.angle_noise_std,
            "azimuth_noise_std": self.azimuth_noise_std,
            "stem_radius": self.stem_radius,
            "petiole_radius": self.petiole_radius,
        }
        if self.species == "soybean":
            out.update(
                branch=dict(self.branch),
                branch_node_distribution={str(k): v for k, v in self.branch_node_distribution.items()},
                leaflet_spread_deg=self.leaflet_spread_deg,
                petiolule_fraction=self.petiolule_fraction,
            )
        else:
            out.update(
                leaf_angle=self.leaf_angle,
                bend_poly=list(self.bend_poly),
                tip_width_fraction=self.tip_width_fraction,
            )
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MorphologyProfile":
        data = {k: v for k, v in data.items() if not k.startswith("_")}
        tables = {}
        for key, entry in data.pop("tables", {}).items():
            if isinstance(entry, dict):
                values = list(entry["values"])
                if "length" in entry and entry["length"] != len(values):
                    raise ConfigError(
                        f"profile table {key!r} declares length {entry['length']} "
                        f"but has {len(values)} values"
                    )
            else:
                values = list(entry)
            tables[key] = tuple(float(v) for v in values)
        if "branch_node_distribution" in data:
            data["branch_node_distribution"] = {
                int(k): float(v) for k, v in data["branch_node_distribution"].items()
            }
        if "bend_poly" in data:
            data["bend_poly"] = tuple(float(c) for c in data["bend_poly"])
        return cls(tables=tables, **data)


def load_profile(path: str | Path) -> MorphologyProfile:
    with open(path) as fh:
        return MorphologyProfile.from_dict(json.load(fh))


def save_profile(profile: MorphologyProfile, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(profile.to_dict(), fh, indent=2)


_DEFAULTS: dict = {}


def default_profile(species: str) -> MorphologyProfile:
    """Bundled default profile for ``species`` (cached)."""
    if species not in _DEFAULTS:
        if species not in _TABLE_KEYS:
            raise ConfigError(f"no default profile for species {species!r}")
        text = resources.files("canopyfit.morphology").joinpath(
            "data", f"{species}_profile.json").read_text()
        _DEFAULTS[species] = MorphologyProfile.from_dict(json.loads(text))
    return _DEFAULTS[species]


def resolve_profile(species: str, profile: Optional[MorphologyProfile]) -> MorphologyProfile:
    if profile is None:
        return default_profile(species)
    if profile.species != species:
        raise ConfigError(f"profile is for {profile.species}, not {species}")
    return profile
