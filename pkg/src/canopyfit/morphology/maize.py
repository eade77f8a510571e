"""Procedural maize plants: one bending strap leaf per stem node."""

from __future__ import annotations

from typing import Optional

import numpy as np

from canopyfit.errors import ConfigError, DomainError
from canopyfit.morphology import geometry as geo
from canopyfit.morphology.mesh import LEAF, STEM, LabeledMesh, MeshBuilder
from canopyfit.morphology.noise import MAX_NODES, PlantNoise, node_count
from canopyfit.morphology.params import MaizeParams
from canopyfit.morphology.profile import MorphologyProfile, resolve_profile

LEAF_SEGMENTS = 10


def bend_angle(profile: MorphologyProfile, order) -> np.ndarray:
    """Total downward bend (degrees) accumulated from leaf base to tip."""
    c0, c1, c2 = profile.bend_poly
    order = np.asarray(order, dtype=float)
    return np.clip(c0 + c1 * order + c2 * order ** 2, 0.0, 170.0)


def generate_maize_plant(params: MaizeParams, profile: Optional[MorphologyProfile] = None,
                         seed: int = 0, plant_index: int = 0, origin=(0.0, 0.0, 0.0)) -> LabeledMesh:
    """Generate one maize plant; leaf organ ``k`` belongs to stem node ``k + 1``."""
    if not isinstance(params, MaizeParams):
        raise DomainError(f"expected MaizeParams, got {type(params).__name__}")
    profile = resolve_profile("maize", profile)
    return build_maize(params, profile, PlantNoise.draw(seed, plant_index), plant_index, origin)


def build_maize(params: MaizeParams, profile: MorphologyProfile, noise: PlantNoise,
                plant_index: int, origin) -> LabeledMesh:
    n, frac = node_count(params.num_nodes)
    if n > profile.max_rank or n > MAX_NODES:
        raise ConfigError(f"profile covers {profile.max_rank} nodes, plant needs {n}")
    origin = np.asarray(origin, dtype=float)
    scale = np.ones(n)
    scale[-1] = frac

    internode = profile.table("internode_length")[:n] * params.internode_length_mult * scale
    heights = np.cumsum(internode)
    nodes = origin + np.column_stack([np.zeros(n), np.zeros(n), heights])
    azimuth = (noise.base_azimuth + np.pi * np.arange(n)
               + np.radians(profile.azimuth_noise_std) * noise.node_azimuth[:n])
    length = profile.table("leaf_length")[:n] * params.leaf_length_mult * scale
    width = profile.table("leaf_width")[:n] * params.leaf_length_mult * scale
    bend = bend_angle(profile, np.arange(1, n + 1) + params.leaf_order_shift)

    # centerline: segment elevations fall quadratically along the blade
    s_mid = (np.arange(LEAF_SEGMENTS) + 0.5) / LEAF_SEGMENTS
    elevation = (90.0 - profile.leaf_angle) - bend[:, None] * s_mid[None, :] ** 2
    e = np.radians(elevation)[:, :, None]
    fwd = np.stack([np.cos(azimuth), np.sin(azimuth), np.zeros(n)], 1)[:, None, :]
    seg = np.cos(e) * fwd + np.sin(e) * np.array([0.0, 0.0, 1.0])
    seg = seg * (length / LEAF_SEGMENTS)[:, None, None]
    base = nodes + profile.stem_radius * fwd[:, 0, :]
    center = np.concatenate([base[:, None, :], base[:, None, :] + np.cumsum(seg, axis=1)], axis=1)

    s_knots = np.linspace(0.0, 1.0, LEAF_SEGMENTS + 1)
    half_w = 0.5 * width[:, None] * (1.0 - (1.0 - profile.tip_width_fraction) * s_knots[None, :])
    side = geo.horizontal_side(azimuth)[:, None, :]
    verts = np.stack([center - half_w[..., None] * side, center + half_w[..., None] * side], axis=2)

    builder = MeshBuilder()
    builder.add(geo.prisms(np.vstack([origin, nodes[:-1]]), nodes, profile.stem_radius),
                geo.PRISM_TRIS, STEM, plant_index, np.zeros(n, np.int32))
    builder.add(verts.reshape(n, 2 * (LEAF_SEGMENTS + 1), 3), geo.ribbon_tris(LEAF_SEGMENTS),
                LEAF, plant_index, np.arange(n))
    return builder.build()
