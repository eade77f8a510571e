"""Compare the compiled and numpy rasterizer backends on canopy renders.

Run: python benchmarks/bench_raster.py [--repeat N]
"""

import argparse
import time

import numpy as np

from canopyfit.morphology import MaizeParams, SoybeanParams, build_canopy
from canopyfit.render.camera import canonical_camera
from canopyfit.render.raster import BACKENDS, render_faces


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    scenes = [
        ("soybean", build_canopy("soybean", SoybeanParams(), seed=0), canonical_camera(1.0)),
        ("maize", build_canopy("maize", MaizeParams(), seed=0), canonical_camera(5.0)),
    ]
    print(f"backends available: {sorted(BACKENDS)}")
    print(f"{'scene':<8} {'faces':>7} {'backend':<8} {'seconds':>9} {'speedup':>8}")
    for name, mesh, camera in scenes:
        results = {}
        for backend in ("python", "cython"):
            if backend not in BACKENDS:
                continue
            results[backend] = best_of(lambda: render_faces(mesh, camera, backend=backend), args.repeat)
        base = results["python"][0]
        for backend, (seconds, _) in results.items():
            print(f"{name:<8} {mesh.n_faces:>7} {backend:<8} {seconds:>9.4f} {base / seconds:>7.1f}x")
        if "cython" in results:
            (d0, f0), (d1, f1) = results["python"][1], results["cython"][1]
            same = np.array_equal(d0, d1) and np.array_equal(f0, f1)
            print(f"{name:<8} buffers identical: {same}")


if __name__ == "__main__":
    main()
