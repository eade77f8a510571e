"""Morphology parameter vectors and their box bounds."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from canopyfit.errors import DomainError

SPECIES = ("soybean", "maize")


@dataclass(frozen=True)
class SoybeanParams:
    leaf_length_mult: float = 1.0
    petiole_length_mult: float = 1.0
    petiole_angle_mult: float = 1.0
    internode_length_mult: float = 1.0
    num_nodes: float = 14.0

    species = "soybean"
    bounds = {
        "leaf_length_mult": (0.5, 1.5),
        "petiole_length_mult": (0.5, 2.0),
        "petiole_angle_mult": (0.5, 4.0),
        "internode_length_mult": (0.5, 2.0),
        "num_nodes": (1.0, 14.0),
    }

    def __post_init__(self):
        _validate(self)

    def to_vector(self) -> np.ndarray:
        return np.array(dataclasses.astuple(self), dtype=float)


@dataclass(frozen=True)
class MaizeParams:
    leaf_length_mult: float = 1.0
    leaf_order_shift: float = 0.0
    internode_length_mult: float = 1.0
    num_nodes: float = 18.0

    species = "maize"
    bounds = {
        "leaf_length_mult": (0.8, 1.2),
        "leaf_order_shift": (-4.0, 4.0),
        "internode_length_mult": (0.8, 1.2),
        "num_nodes": (1.0, 18.0),
    }

    def __post_init__(self):
        _validate(self)

    def to_vector(self) -> np.ndarray:
        return np.array(dataclasses.astuple(self), dtype=float)


PlantParams = Union[SoybeanParams, MaizeParams]


def _validate(params) -> None:
    for name, (lo, hi) in params.bounds.items():
        value = getattr(params, name)
        if not np.isfinite(value) or value < lo or value > hi:
            raise DomainError(
                f"{params.species} parameter {name}={value!r} outside [{lo}, {hi}]"
            )


def params_class(species: str):
    if species == "soybean":
        return SoybeanParams
    if species == "maize":
        return MaizeParams
    raise DomainError(f"unknown species {species!r}; expected one of {SPECIES}")


def param_names(species: str) -> list[str]:
    return list(params_class(species).bounds)


def param_bounds(species: str) -> np.ndarray:
    """Return a ``(dim, 2)`` array of ``(lower, upper)`` rows."""
    return np.array(list(params_class(species).bounds.values()), dtype=float)


def params_from_vector(species: str, values: Sequence[float]) -> PlantParams:
    cls = params_class(species)
    values = [float(v) for v in values]
    if len(values) != len(cls.bounds):
        raise DomainError(
            f"{species} expects {len(cls.bounds)} values, got {len(values)}"
        )
    return cls(*values)


def clamp_params(raw: Sequence[float], species: str) -> PlantParams:
    """Clamp each component of ``raw`` into the species' parameter box."""
    bounds = param_bounds(species)
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (len(bounds),):
        raise DomainError(
            f"{species} expects a vector of length {len(bounds)}, got shape {raw.shape}"
        )
    return params_from_vector(species, np.clip(raw, bounds[:, 0], bounds[:, 1]))
