"""Canopy structure variables and error scores over scene collections."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.morphology.mesh import LEAF, LabeledMesh


@dataclass(frozen=True)
class CanopyMetrics:
    """Leaf area index and area-weighted leaf inclination statistics.

    ``angle_mean`` and ``angle_std`` are NaN (and ``angles_defined`` False)
    when the mesh has no leaf area.
    """

    lai: float
    angle_mean: float
    angle_std: float
    total_leaf_area: float
    ground_area: float
    angles_defined: bool = True

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("angle_mean", "angle_std"):
            if not math.isfinite(d[key]):
                d[key] = None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "CanopyMetrics":
        data = dict(data)
        for key in ("angle_mean", "angle_std"):
            if data.get(key) is None:
                data[key] = math.nan
        return cls(**data)


def leaf_face_angles(mesh: LabeledMesh) -> tuple[np.ndarray, np.ndarray]:
    """``(area, inclination_deg)`` of every leaf face.

    Inclination is the angle between the face normal and the vertical,
    folded into [0, 90] degrees.
    """
    leaf = mesh.face_class == LEAF
    tri = mesh.vertices[mesh.triangles[leaf]]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    norm = np.linalg.norm(cross, axis=1)
    area = 0.5 * norm
    cos = np.abs(cross[:, 2]) / np.where(norm > 0, norm, 1.0)
    angle = np.degrees(np.arccos(np.clip(cos, 0.0, 1.0)))
    return area, angle


def compute_metrics(mesh: LabeledMesh, ground_area: float) -> CanopyMetrics:
    if not ground_area > 0:
        raise DomainError(f"ground area must be positive, got {ground_area}")
    area, angle = leaf_face_angles(mesh)
    total = float(area.sum())
    if total <= 0:
        return CanopyMetrics(0.0, math.nan, math.nan, 0.0, float(ground_area), False)
    w = area / total
    mean = float(w @ angle)
    std = float(np.sqrt(max(w @ (angle - mean) ** 2, 0.0)))
    return CanopyMetrics(total / ground_area, mean, std, total, float(ground_area))


@dataclass(frozen=True)
class EvaluationReport:
    laie: float
    laipe: float
    ame: float
    asde: float
    n_scenes: int

    def to_dict(self) -> dict:
        return {"LAIE": self.laie, "LAIPE": self.laipe, "AME": self.ame, "ASDE": self.asde,
                "n_scenes": self.n_scenes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self, label: str = "fit") -> str:
        """Aligned plain-text table with one row."""
        head = ["method", "LAIE", "LAIPE", "AME", "ASDE"]
        row = [label, f"{self.laie:.3f}", f"{self.laipe:.3f}", f"{self.ame:.2f}", f"{self.asde:.2f}"]
        widths = [max(len(h), len(r)) for h, r in zip(head, row)]
        fmt = "  ".join(f"{{:<{w}}}" if i == 0 else f"{{:>{w}}}" for i, w in enumerate(widths))
        return fmt.format(*head) + "\n" + fmt.format(*row) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _rmse(a, b) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.sqrt(np.mean(d * d)))


def score(predicted: list, truth: list) -> EvaluationReport:
    """RMSE of LAI and angle statistics plus the mean relative LAI error."""
    if len(predicted) != len(truth):
        raise DomainError(f"{len(predicted)} predictions for {len(truth)} ground-truth scenes")
    if not predicted:
        raise DomainError("score needs at least one scene")
    p_lai = np.array([m.lai for m in predicted])
    t_lai = np.array([m.lai for m in truth])
    if np.any(t_lai <= 0):
        raise DomainError("LAIPE is undefined for a scene with zero true LAI")
    laipe = float(np.mean(np.abs(p_lai - t_lai) / t_lai))
    return EvaluationReport(
        _rmse(p_lai, t_lai),
        laipe,
        _rmse([m.angle_mean for m in predicted], [m.angle_mean for m in truth]),
        _rmse([m.angle_std for m in predicted], [m.angle_std for m in truth]),
        len(truth),
    )
