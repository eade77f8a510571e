"""Procedural soybean plants: trifoliate nodes on a main stem plus branches."""

from __future__ import annotations

from typing import Optional

import numpy as np

from canopyfit.errors import ConfigError, DomainError
from canopyfit.morphology import geometry as geo
from canopyfit.morphology.mesh import LEAF, PETIOLE, STEM, LabeledMesh, MeshBuilder
from canopyfit.morphology.noise import MAX_BRANCHES, MAX_NODES, PlantNoise, node_count
from canopyfit.morphology.params import SoybeanParams
from canopyfit.morphology.profile import MorphologyProfile, resolve_profile

BRANCH_START_NODE = 8


def branch_count(n_main: int) -> int:
    """Branches present on a plant with ``n_main`` main-stem nodes."""
    return int(np.clip(n_main - (BRANCH_START_NODE - 1), 0, MAX_BRANCHES))


def _branch_nodes(u: float, distribution: dict) -> int:
    counts = sorted(distribution)
    cdf = np.cumsum([distribution[c] for c in counts])
    return int(counts[min(int(np.searchsorted(cdf, u, side="right")), len(counts) - 1)])


def generate_soybean_plant(params: SoybeanParams, profile: Optional[MorphologyProfile] = None,
                           seed: int = 0, plant_index: int = 0, origin=(0.0, 0.0, 0.0)) -> LabeledMesh:
    """Generate one soybean plant with its stem base at ``origin``.

    Leaf organs are numbered so that the three leaflets of trifoliate ``i`` are
    organs ``3i`` (terminal), ``3i + 1`` and ``3i + 2``; trifoliates are
    ordered main-stem nodes bottom-up, then branch nodes.
    """
    if not isinstance(params, SoybeanParams):
        raise DomainError(f"expected SoybeanParams, got {type(params).__name__}")
    profile = resolve_profile("soybean", profile)
    noise = PlantNoise.draw(seed, plant_index)
    return build_soybean(params, profile, noise, plant_index, origin)


def build_soybean(params: SoybeanParams, profile: MorphologyProfile, noise: PlantNoise,
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

    polar = np.clip(profile.table("petiole_angle")[:n] * params.petiole_angle_mult
                    + profile.angle_noise_std * noise.node_angle[:n], 0.5, 179.5)
    az_std = np.radians(profile.azimuth_noise_std)
    azimuth = noise.base_azimuth + np.pi * np.arange(n) + az_std * noise.node_azimuth[:n]
    pet_len = profile.table("petiole_length")[:n] * params.petiole_length_mult * scale
    leaf_len = profile.table("leaf_length")[:n] * params.leaf_length_mult * scale
    leaf_wid = profile.table("leaf_width")[:n] * params.leaf_length_mult * scale

    stems_start = [np.vstack([origin, nodes[:-1]])]
    stems_end = [nodes]
    stems_organ = [np.zeros(n, np.int32)]

    tri_q, tri_polar, tri_az = [nodes], [polar], [azimuth]
    tri_pet, tri_len, tri_wid = [pet_len], [leaf_len], [leaf_wid]

    br = profile.branch
    for b in range(branch_count(n)):
        # the branch that appears with the fractional top node grows with it
        bscale = frac if BRANCH_START_NODE + b == n else 1.0
        count = _branch_nodes(noise.branch_count_u[b], profile.branch_node_distribution)
        attach = nodes[b]
        b_az = azimuth[b] + np.pi
        b_dir = geo.direction(br["branch_angle"], np.array(b_az))
        step = br["internode_length"] * params.internode_length_mult * bscale
        pts = attach + step * np.arange(1, count + 1)[:, None] * b_dir
        stems_start.append(np.vstack([attach, pts[:-1]]))
        stems_end.append(pts)
        stems_organ.append(np.full(count, b + 1, np.int32))

        j = np.arange(count)
        tri_q.append(pts)
        tri_polar.append(np.clip(br["petiole_angle"] * params.petiole_angle_mult
                                 + profile.angle_noise_std * noise.branch_node_angle[b, :count],
                                 0.5, 179.5))
        tri_az.append(b_az + 0.5 * np.pi + np.pi * j + az_std * noise.branch_node_azimuth[b, :count])
        tri_pet.append(np.full(count, br["petiole_length"] * params.petiole_length_mult * bscale))
        tri_len.append(np.full(count, br["leaf_length"] * params.leaf_length_mult * bscale))
        tri_wid.append(np.full(count, br["leaf_width"] * params.leaf_length_mult * bscale))

    builder = MeshBuilder()
    builder.add(geo.prisms(np.vstack(stems_start), np.vstack(stems_end), profile.stem_radius),
                geo.PRISM_TRIS, STEM, plant_index, np.concatenate(stems_organ))
    _add_trifoliates(builder, profile, plant_index,
                     np.vstack(tri_q), np.concatenate(tri_polar), np.concatenate(tri_az),
                     np.concatenate(tri_pet), np.concatenate(tri_len), np.concatenate(tri_wid))
    return builder.build()


def _add_trifoliates(builder, profile, plant_index, q, polar, azimuth, pet_len, leaf_len, leaf_wid):
    t = len(q)
    d = geo.direction(polar, azimuth)
    s = geo.horizontal_side(azimuth)
    tip = q + pet_len[:, None] * d
    stalk = profile.petiolule_fraction * leaf_len
    term_base = tip + stalk[:, None] * d

    builder.add(geo.prisms(q, tip, profile.petiole_radius), geo.PRISM_TRIS, PETIOLE,
                plant_index, 2 * np.arange(t))
    builder.add(geo.prisms(tip, term_base, profile.petiole_radius), geo.PRISM_TRIS, PETIOLE,
                plant_index, 2 * np.arange(t) + 1)

    g = np.radians(profile.leaflet_spread_deg)
    # all three blades span the plane (d, s) through the petiole tip
    axes = np.stack([d, np.cos(g) * s + np.sin(g) * d, -np.cos(g) * s + np.sin(g) * d], 1)
    sides = np.stack([s, np.cos(g) * d - np.sin(g) * s, np.cos(g) * d + np.sin(g) * s], 1)
    bases = np.stack([term_base, tip, tip], 1)
    verts = geo.fan_leaflets(bases.reshape(-1, 3), axes.reshape(-1, 3), sides.reshape(-1, 3),
                             np.repeat(leaf_len, 3), np.repeat(leaf_wid, 3))
    builder.add(verts, geo.FAN_TRIS, LEAF, plant_index, np.arange(3 * t))
