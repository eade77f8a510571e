"""Depth rendering, point clouds and their file formats."""

from canopyfit.render.camera import (
    DEFAULT_HEIGHT,
    DEFAULT_VFOV,
    DEFAULT_WIDTH,
    PinholeCamera,
    canonical_camera,
    load_camera,
    save_camera,
)
from canopyfit.render.cloud import (
    GROUND,
    PointCloud,
    ground_quad,
    sample_surface_points,
    splat,
    unproject,
)
from canopyfit.render.formats import (
    read_cdm,
    read_pgm,
    read_ply,
    read_ppm,
    write_cdm,
    write_pgm,
    write_ply,
    write_ppm,
)
from canopyfit.render.raster import BACKEND, render_depth, render_faces

__all__ = [
    "BACKEND",
    "DEFAULT_HEIGHT",
    "DEFAULT_VFOV",
    "DEFAULT_WIDTH",
    "GROUND",
    "PinholeCamera",
    "PointCloud",
    "canonical_camera",
    "ground_quad",
    "load_camera",
    "read_cdm",
    "read_pgm",
    "read_ply",
    "read_ppm",
    "render_depth",
    "render_faces",
    "sample_surface_points",
    "save_camera",
    "splat",
    "unproject",
    "write_cdm",
    "write_pgm",
    "write_ply",
    "write_ppm",
]
