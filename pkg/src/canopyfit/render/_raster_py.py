"""Pure-numpy z-buffer rasterizer; same arithmetic as the compiled kernel."""

import numpy as np


def rasterize(uvz, tris, width, height, near):
    uvz = np.asarray(uvz, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int64)
    zbuf = np.full((height, width), np.inf)
    fbuf = np.full((height, width), -1, dtype=np.int64)
    if len(tris) == 0:
        return zbuf, fbuf
    p = uvz[tris]
    u, v, z = p[..., 0], p[..., 1], p[..., 2]
    area = (u[:, 1] - u[:, 0]) * (v[:, 2] - v[:, 0]) - (v[:, 1] - v[:, 0]) * (u[:, 2] - u[:, 0])
    j0 = np.maximum(np.ceil(u.min(1) - 0.5), 0)
    j1 = np.minimum(np.floor(u.max(1) - 0.5), width - 1)
    i0 = np.maximum(np.ceil(v.min(1) - 0.5), 0)
    i1 = np.minimum(np.floor(v.max(1) - 0.5), height - 1)
    ok = (z.min(1) >= near) & (np.abs(area) >= 1e-12) & (j0 <= j1) & (i0 <= i1)
    for f in np.flatnonzero(ok):
        (u0, u1, u2), (v0, v1, v2), (z0, z1, z2) = u[f], v[f], z[f]
        a = area[f]
        py = (np.arange(int(i0[f]), int(i1[f]) + 1) + 0.5)[:, None]
        px = (np.arange(int(j0[f]), int(j1[f]) + 1) + 0.5)[None, :]
        w0 = ((u2 - u1) * (py - v1) - (v2 - v1) * (px - u1)) / a
        w1 = ((u0 - u2) * (py - v2) - (v0 - v2) * (px - u2)) / a
        w2 = 1.0 - w0 - w1
        inside = (w0 >= 0.0) & (w1 >= 0.0) & (w2 >= 0.0)
        if not inside.any():
            continue
        with np.errstate(divide="ignore"):
            zz = 1.0 / (w0 / z0 + w1 / z1 + w2 / z2)
        sl = (slice(int(i0[f]), int(i1[f]) + 1), slice(int(j0[f]), int(j1[f]) + 1))
        win = inside & (zz < zbuf[sl])
        zbuf[sl][win] = zz[win]
        fbuf[sl][win] = f
    return zbuf, fbuf
