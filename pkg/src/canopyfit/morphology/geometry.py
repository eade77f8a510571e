"""Batched organ primitives: ellipse-fan leaflets, ribbon blades and prisms."""

from __future__ import annotations

import numpy as np

FAN_SEGMENTS = 8

_t = 2.0 * np.pi * np.arange(FAN_SEGMENTS) / FAN_SEGMENTS
# (u along the midrib in [0, 1], v across in [-0.5, 0.5]); vertex 0 is the center.
FAN_UV = np.vstack([[0.5, 0.0], np.column_stack([0.5 - 0.5 * np.cos(_t), 0.5 * np.sin(_t)])])
FAN_TRIS = np.array([[0, 1 + k, 1 + (k + 1) % FAN_SEGMENTS] for k in range(FAN_SEGMENTS)])

PRISM_TRIS = np.array([
    [0, 1, 4], [0, 4, 3],
    [1, 2, 5], [1, 5, 4],
    [2, 0, 3], [2, 3, 5],
])


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def direction(polar_deg, azimuth_rad) -> np.ndarray:
    """Unit vectors at ``polar_deg`` from +z and azimuth ``azimuth_rad`` about z."""
    th = np.radians(polar_deg)
    return np.stack([np.sin(th) * np.cos(azimuth_rad),
                     np.sin(th) * np.sin(azimuth_rad),
                     np.cos(th) * np.ones_like(azimuth_rad)], axis=-1)


def horizontal_side(azimuth_rad) -> np.ndarray:
    return np.stack([-np.sin(azimuth_rad), np.cos(azimuth_rad),
                     np.zeros_like(azimuth_rad)], axis=-1)


def fan_leaflets(base, axis, side, length, width) -> np.ndarray:
    """Vertices ``(n, 9, 3)`` of flat ellipse-fan leaflets."""
    base, axis, side = (np.asarray(a, float).reshape(-1, 3) for a in (base, axis, side))
    length = np.asarray(length, float).reshape(-1, 1, 1)
    width = np.asarray(width, float).reshape(-1, 1, 1)
    u = FAN_UV[None, :, 0:1]
    v = FAN_UV[None, :, 1:2]
    return base[:, None, :] + u * length * axis[:, None, :] + v * width * side[:, None, :]


def prisms(start, end, radius) -> np.ndarray:
    """Vertices ``(n, 6, 3)`` of open triangular prisms around segments."""
    start = np.asarray(start, float).reshape(-1, 3)
    end = np.asarray(end, float).reshape(-1, 3)
    axis = end - start
    ref = np.where(np.abs(axis[:, 2:3]) < 0.9 * np.linalg.norm(axis, axis=1, keepdims=True),
                   [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = unit(np.cross(axis, ref))
    e2 = unit(np.cross(axis, e1))
    ang = 2.0 * np.pi * np.arange(3) / 3
    ring = (np.cos(ang)[None, :, None] * e1[:, None, :]
            + np.sin(ang)[None, :, None] * e2[:, None, :]) * np.reshape(radius, (-1, 1, 1))
    return np.concatenate([start[:, None, :] + ring, end[:, None, :] + ring], axis=1)


def ribbon_tris(n_segments: int) -> np.ndarray:
    """Triangles for a strip of ``n_segments`` quads over ``2 * (n + 1)`` vertices."""
    k = np.arange(n_segments)
    a, b, c, d = 2 * k, 2 * k + 1, 2 * k + 2, 2 * k + 3
    return np.stack([np.stack([a, b, d], 1), np.stack([a, d, c], 1)], 1).reshape(-1, 3)
