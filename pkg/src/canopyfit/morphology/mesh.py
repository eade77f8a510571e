"""Labeled triangle meshes and their OBJ + sidecar serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from canopyfit.errors import DomainError, FormatError

LEAF, STEM, PETIOLE = 0, 1, 2
ORGAN_CLASSES = ("leaf", "stem", "petiole")


@dataclass
class LabeledMesh:
    """Triangle mesh in meters with one organ label per face.

    ``face_class`` holds ``LEAF``/``STEM``/``PETIOLE``; ``face_plant`` the plant
    index; ``face_organ`` the organ index within (plant, class).
    """

    vertices: np.ndarray
    triangles: np.ndarray
    face_class: np.ndarray
    face_plant: np.ndarray
    face_organ: np.ndarray

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.face_class = np.ascontiguousarray(self.face_class, dtype=np.int8)
        self.face_plant = np.ascontiguousarray(self.face_plant, dtype=np.int32)
        self.face_organ = np.ascontiguousarray(self.face_organ, dtype=np.int32)

    @classmethod
    def empty(cls) -> "LabeledMesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), np.int64),
                   np.zeros(0, np.int8), np.zeros(0, np.int32), np.zeros(0, np.int32))

    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    def validate(self) -> None:
        n = self.n_faces
        for name in ("face_class", "face_plant", "face_organ"):
            if len(getattr(self, name)) != n:
                raise DomainError(f"{name} has {len(getattr(self, name))} entries for {n} faces")
        if n and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise DomainError("triangle index out of range")
        if n and not np.isin(self.face_class, (LEAF, STEM, PETIOLE)).all():
            raise DomainError("unknown organ class label")
        if n and self.face_plant.min() < 0:
            raise DomainError("negative plant index")

    def face_areas(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)

    def translated(self, offset) -> "LabeledMesh":
        return LabeledMesh(self.vertices + np.asarray(offset, float), self.triangles.copy(),
                           self.face_class.copy(), self.face_plant.copy(), self.face_organ.copy())

    def select(self, face_mask: np.ndarray) -> "LabeledMesh":
        """Sub-mesh with the selected faces (vertices are not compacted)."""
        return LabeledMesh(self.vertices, self.triangles[face_mask], self.face_class[face_mask],
                           self.face_plant[face_mask], self.face_organ[face_mask])

    def leaf_area(self) -> float:
        return float(self.face_areas()[self.face_class == LEAF].sum())

    def equals(self, other: "LabeledMesh") -> bool:
        """Bitwise equality of all arrays."""
        return all(
            a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()
            for a, b in (
                (self.vertices, other.vertices), (self.triangles, other.triangles),
                (self.face_class, other.face_class), (self.face_plant, other.face_plant),
                (self.face_organ, other.face_organ),
            )
        )


def concatenate(meshes) -> LabeledMesh:
    meshes = [m for m in meshes if m.n_faces]
    if not meshes:
        return LabeledMesh.empty()
    offsets = np.cumsum([0] + [len(m.vertices) for m in meshes[:-1]])
    return LabeledMesh(
        np.concatenate([m.vertices for m in meshes]),
        np.concatenate([m.triangles + o for m, o in zip(meshes, offsets)]),
        np.concatenate([m.face_class for m in meshes]),
        np.concatenate([m.face_plant for m in meshes]),
        np.concatenate([m.face_organ for m in meshes]),
    )


class MeshBuilder:
    """Accumulates vertex/face blocks; one ``add`` call per organ or organ batch."""

    def __init__(self):
        self._verts = []
        self._tris = []
        self._cls = []
        self._plant = []
        self._organ = []
        self._nv = 0

    def add(self, vertices, triangles, organ_class, plant, organ):
        """Append a block.

        ``vertices`` is ``(..., nv, 3)`` and ``triangles`` a ``(nt, 3)`` template
        shared by every leading batch entry; ``organ`` is a scalar or one index
        per batch entry.
        """
        vertices = np.asarray(vertices, dtype=np.float64)
        tris = np.asarray(triangles, dtype=np.int64)
        nv = vertices.shape[-2]
        batch = vertices.reshape(-1, nv, 3)
        nb = len(batch)
        if nb == 0:
            return
        offsets = self._nv + nv * np.arange(nb)
        self._verts.append(batch.reshape(-1, 3))
        self._tris.append((tris[None, :, :] + offsets[:, None, None]).reshape(-1, 3))
        nt = len(tris)
        self._cls.append(np.full(nb * nt, organ_class, np.int8))
        self._plant.append(np.full(nb * nt, plant, np.int32))
        self._organ.append(np.repeat(np.broadcast_to(np.asarray(organ, np.int32), (nb,)), nt))
        self._nv += nb * nv

    def build(self) -> LabeledMesh:
        if not self._tris:
            return LabeledMesh.empty()
        return LabeledMesh(np.concatenate(self._verts), np.concatenate(self._tris),
                           np.concatenate(self._cls), np.concatenate(self._plant),
                           np.concatenate(self._organ))


def group_name(plant: int, organ_class: int, organ: int) -> str:
    return f"p{plant}_{ORGAN_CLASSES[organ_class]}{organ}"


def write_obj(mesh: LabeledMesh, path: str | Path) -> dict:
    """Write ``mesh`` as OBJ with one group per organ plus a JSON sidecar.

    The sidecar is written next to the OBJ as ``<stem>.groups.json`` and maps
    each group name to ``{plant, class, index}``. Returns the sidecar mapping.
    """
    path = Path(path)
    order = np.lexsort((np.arange(mesh.n_faces), mesh.face_organ, mesh.face_class, mesh.face_plant))
    keys = np.stack([mesh.face_plant, mesh.face_class.astype(np.int32), mesh.face_organ], 1)[order]
    groups = {}
    lines = ["# canopyfit labeled mesh"]
    lines.extend("v %.9g %.9g %.9g" % tuple(v) for v in mesh.vertices)
    tris = mesh.triangles[order] + 1
    if len(keys):
        starts = np.flatnonzero(np.r_[True, np.any(keys[1:] != keys[:-1], axis=1)])
        ends = np.r_[starts[1:], len(keys)]
        for s, e in zip(starts, ends):
            plant, cls, organ = (int(x) for x in keys[s])
            name = group_name(plant, cls, organ)
            groups[name] = {"plant": plant, "class": ORGAN_CLASSES[cls], "index": organ}
            lines.append(f"g {name}")
            lines.extend("f %d %d %d" % tuple(t) for t in tris[s:e])
    path.write_text("\n".join(lines) + "\n")
    sidecar_path(path).write_text(json.dumps(groups, indent=1, sort_keys=True))
    return groups


def sidecar_path(obj_path: str | Path) -> Path:
    obj_path = Path(obj_path)
    return obj_path.with_name(obj_path.stem + ".groups.json")


def read_obj(path: str | Path) -> LabeledMesh:
    """Read an OBJ written by :func:`write_obj`; labels come from group names."""
    path = Path(path)
    side = sidecar_path(path)
    groups = json.loads(side.read_text()) if side.exists() else {}
    verts, tris, labels = [], [], []
    current = None
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "g":
            name = parts[1] if len(parts) > 1 else ""
            info = groups.get(name) or _parse_group(name)
            if info is None:
                raise FormatError(f"{path}:{lineno}: unrecognized group name {name!r}")
            current = (info["plant"], ORGAN_CLASSES.index(info["class"]), info["index"])
        elif parts[0] == "f":
            if current is None:
                raise FormatError(f"{path}:{lineno}: face outside of any group")
            idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
            for k in range(1, len(idx) - 1):
                tris.append([idx[0], idx[k], idx[k + 1]])
                labels.append(current)
    labels = np.array(labels, dtype=np.int64).reshape(-1, 3)
    mesh = LabeledMesh(np.array(verts).reshape(-1, 3), np.array(tris).reshape(-1, 3),
                       labels[:, 1], labels[:, 0], labels[:, 2])
    mesh.validate()
    return mesh


def _parse_group(name: str):
    if not name.startswith("p") or "_" not in name:
        return None
    plant, rest = name[1:].split("_", 1)
    for cls in ORGAN_CLASSES:
        if rest.startswith(cls) and rest[len(cls):].isdigit() and plant.isdigit():
            return {"plant": int(plant), "class": cls, "index": int(rest[len(cls):])}
    return None
