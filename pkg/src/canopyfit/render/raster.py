"""Depth rendering of labeled meshes.

The triangle loop runs in a compiled extension when it is available and
falls back to a numpy implementation otherwise. Set
``CANOPYFIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from canopyfit.morphology.mesh import LabeledMesh
from canopyfit.render import _raster_py
from canopyfit.render.camera import PinholeCamera

NEAR_PLANE = 0.01

try:
    if os.environ.get("CANOPYFIT_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from canopyfit.render._raster import rasterize as _compiled_rasterize
except ImportError:
    _compiled_rasterize = None

BACKEND = "cython" if _compiled_rasterize is not None else "python"
BACKENDS = {"python": _raster_py.rasterize}
if _compiled_rasterize is not None:
    BACKENDS["cython"] = _compiled_rasterize


def rasterize(uvz, tris, width, height, near=NEAR_PLANE, backend=None):
    """Z-buffer projected triangles; returns ``(depth, face_index)`` buffers.

    Faces with any vertex closer than ``near`` are skipped. Ties at equal depth
    keep the lower face index.
    """
    fn = BACKENDS[backend or BACKEND]
    uvz = np.ascontiguousarray(uvz, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.int64)
    return fn(uvz, tris, int(width), int(height), float(near))


def render_faces(mesh: LabeledMesh, camera: PinholeCamera, near=NEAR_PLANE, backend=None):
    """Depth (float64, ``inf`` background) and winning face index per pixel."""
    if mesh.n_faces == 0:
        return (np.full((camera.height, camera.width), np.inf),
                np.full((camera.height, camera.width), -1, dtype=np.int64))
    with np.errstate(divide="ignore", invalid="ignore"):
        uvz = camera.project(mesh.vertices)
    return rasterize(uvz, mesh.triangles, camera.width, camera.height, near, backend)


def render_depth(mesh: LabeledMesh, camera: PinholeCamera, near=NEAR_PLANE, backend=None):
    """Render z-depth along the optical axis and the foreground mask.

    Returns ``(depth, mask)``: float32 depth with NaN background and a bool
    mask of pixels covered by any face.
    """
    zbuf, _ = render_faces(mesh, camera, near, backend)
    mask = np.isfinite(zbuf)
    depth = np.where(mask, zbuf, np.nan).astype(np.float32)
    return depth, mask
