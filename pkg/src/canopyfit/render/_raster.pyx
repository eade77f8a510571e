# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled z-buffer triangle rasterizer (must match _raster_py.rasterize)."""

import numpy as np

from libc.math cimport ceil, floor, fabs


def rasterize(const double[:, ::1] uvz, const long long[:, ::1] tris,
              int width, int height, double near):
    """Rasterize projected triangles at pixel centers.

    Returns ``(depth, face)``: float64 depth with ``inf`` where empty and the
    int64 index of the winning face (``-1`` where empty).
    """
    depth_arr = np.full((height, width), np.inf)
    face_arr = np.full((height, width), -1, dtype=np.int64)
    cdef double[:, ::1] zbuf = depth_arr
    cdef long long[:, ::1] fbuf = face_arr
    cdef Py_ssize_t nf = tris.shape[0]
    cdef Py_ssize_t f, i, j, i0, i1, j0, j1
    cdef long long a, b, c
    cdef double u0, v0, z0, u1, v1, z1, u2, v2, z2
    cdef double area, px, py, w0, w1, w2, invz, z
    with nogil:
        for f in range(nf):
            a = tris[f, 0]
            b = tris[f, 1]
            c = tris[f, 2]
            z0 = uvz[a, 2]
            z1 = uvz[b, 2]
            z2 = uvz[c, 2]
            if z0 < near or z1 < near or z2 < near:
                continue
            u0 = uvz[a, 0]
            v0 = uvz[a, 1]
            u1 = uvz[b, 0]
            v1 = uvz[b, 1]
            u2 = uvz[c, 0]
            v2 = uvz[c, 1]
            area = (u1 - u0) * (v2 - v0) - (v1 - v0) * (u2 - u0)
            if fabs(area) < 1e-12:
                continue
            j0 = <Py_ssize_t>ceil(min(u0, min(u1, u2)) - 0.5)
            j1 = <Py_ssize_t>floor(max(u0, max(u1, u2)) - 0.5)
            i0 = <Py_ssize_t>ceil(min(v0, min(v1, v2)) - 0.5)
            i1 = <Py_ssize_t>floor(max(v0, max(v1, v2)) - 0.5)
            if j0 < 0:
                j0 = 0
            if i0 < 0:
                i0 = 0
            if j1 > width - 1:
                j1 = width - 1
            if i1 > height - 1:
                i1 = height - 1
            for i in range(i0, i1 + 1):
                py = i + 0.5
                for j in range(j0, j1 + 1):
                    px = j + 0.5
                    w0 = ((u2 - u1) * (py - v1) - (v2 - v1) * (px - u1)) / area
                    w1 = ((u0 - u2) * (py - v2) - (v0 - v2) * (px - u2)) / area
                    w2 = 1.0 - w0 - w1
                    if w0 < 0.0 or w1 < 0.0 or w2 < 0.0:
                        continue
                    invz = w0 / z0 + w1 / z1 + w2 / z2
                    z = 1.0 / invz
                    if z < zbuf[i, j]:
                        zbuf[i, j] = z
                        fbuf[i, j] = f
    return depth_arr, face_arr
