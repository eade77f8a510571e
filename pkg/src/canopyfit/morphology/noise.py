"""Per-plant random draws.

Each plant owns a counter-based Philox stream keyed by ``(seed, plant_index)``.
All draws are taken up front into fixed-size slot arrays (one slot per
possible organ), so the randomness seen by an organ never depends on how many
other organs the parameters ask for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_NODES = 32
MAX_BRANCHES = 6
MAX_BRANCH_NODES = 2


def plant_generator(seed: int, plant_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(plant_index),))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PlantNoise:
    base_azimuth: float
    position: np.ndarray          # (2,) standard normals for row jitter
    node_angle: np.ndarray        # (MAX_NODES,) standard normals
    node_azimuth: np.ndarray      # (MAX_NODES,)
    branch_count_u: np.ndarray    # (MAX_BRANCHES,) uniforms
    branch_node_angle: np.ndarray    # (MAX_BRANCHES, MAX_BRANCH_NODES)
    branch_node_azimuth: np.ndarray  # (MAX_BRANCHES, MAX_BRANCH_NODES)

    @classmethod
    def draw(cls, seed: int, plant_index: int) -> "PlantNoise":
        rng = plant_generator(seed, plant_index)
        return cls(
            base_azimuth=float(rng.uniform(0.0, 2.0 * np.pi)),
            position=rng.standard_normal(2),
            node_angle=rng.standard_normal(MAX_NODES),
            node_azimuth=rng.standard_normal(MAX_NODES),
            branch_count_u=rng.uniform(size=MAX_BRANCHES),
            branch_node_angle=rng.standard_normal((MAX_BRANCHES, MAX_BRANCH_NODES)),
            branch_node_azimuth=rng.standard_normal((MAX_BRANCHES, MAX_BRANCH_NODES)),
        )


def node_count(num_nodes: float) -> tuple[int, float]:
    """Integer node count and the size fraction of the topmost node."""
    n = int(np.ceil(num_nodes - 1e-12))
    n = max(n, 1)
    frac = float(num_nodes - (n - 1))
    return n, min(max(frac, 0.0), 1.0)
