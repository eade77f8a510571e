"""Observations, the fitting objective and RGB renders of labeled meshes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from canopyfit.errors import DomainError
from canopyfit.loss import HistogramSet, LossSpecs, LossWeights, compute_histograms, total_loss
from canopyfit.morphology.canopy import CanopyLayout, build_canopy
from canopyfit.morphology.mesh import LabeledMesh
from canopyfit.morphology.params import clamp_params, params_class
from canopyfit.morphology.profile import MorphologyProfile, resolve_profile
from canopyfit.pipeline.config import MaskRule, SceneConfig
from canopyfit.render.camera import PinholeCamera, canonical_camera, load_camera
from canopyfit.render.cloud import DEFAULT_ORGAN_COLORS, GROUND
from canopyfit.render.formats import read_cdm, read_pgm, read_ppm
from canopyfit.render.raster import render_depth, render_faces
from canopyfit.rowfit.color import rgb_to_lab

# spawn key separating the hidden canopy's randomness from optimizer seeds
_OBSERVATION_KEY = 0x0B5E


def observation_seed(seed: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(_OBSERVATION_KEY,))
    return int(ss.generate_state(1, np.uint32)[0])


def scene_camera(cfg: SceneConfig) -> PinholeCamera:
    return canonical_camera(cfg.render_height, cfg.width, cfg.height, cfg.vfov_deg)


@dataclass
class ObservedScene:
    depth: np.ndarray
    mask: np.ndarray
    camera: PinholeCamera
    mesh: Optional[LabeledMesh] = None
    params: Optional[object] = None


def synthetic_observation(cfg: SceneConfig, profile: Optional[MorphologyProfile] = None) -> ObservedScene:
    """Render the hidden canopy of a synthetic scene through the scene camera."""
    if cfg.observation.kind != "synthetic":
        raise DomainError("scene does not have a synthetic observation")
    params = params_class(cfg.species)(**cfg.observation.params)
    mesh = build_canopy(cfg.species, params, cfg.layout, profile, observation_seed(cfg.observation.seed))
    camera = scene_camera(cfg)
    depth, mask = render_depth(mesh, camera)
    return ObservedScene(depth, mask, camera, mesh, params)


def observation_mask(depth, rgb, camera: PinholeCamera, rule: MaskRule,
                     render_height: float) -> np.ndarray:
    """Foreground mask of an observed render from its color and 3D position."""
    depth = np.asarray(depth, dtype=float)
    valid = np.isfinite(depth)
    z = np.where(valid, depth, np.inf)
    _, ray_y = camera.pixel_rays()
    lateral = np.abs(ray_y * np.where(valid, depth, 0.0))
    background = ~valid | (z < rule.min_depth) | (lateral >= rule.max_lateral)
    if rgb is not None:
        rgb = np.asarray(rgb)
        if rgb.shape[:2] != depth.shape:
            raise DomainError(f"RGB image {rgb.shape[:2]} and depth {depth.shape} sizes differ")
        lab = rgb_to_lab(rgb) * np.asarray(rule.lab_scale) + np.asarray(rule.lab_offset)
        colored = lab[..., 1] < rule.a_max
        if rule.l_min is not None:
            colored &= lab[..., 0] > rule.l_min
        background |= colored & (z > render_height - rule.near_ground)
    return ~background


def file_observation(cfg: SceneConfig) -> ObservedScene:
    obs = cfg.observation
    depth = read_cdm(obs.depth).astype(float)
    camera = load_camera(obs.camera)
    if depth.shape != (camera.height, camera.width):
        raise DomainError(f"depth map {depth.shape} does not match camera {camera.height}x{camera.width}")
    if obs.mask is not None:
        mask = read_pgm(obs.mask)
        if mask.shape != depth.shape:
            raise DomainError(f"mask {mask.shape} and depth {depth.shape} sizes differ")
        mask &= np.isfinite(depth)
    else:
        mask = observation_mask(depth, read_ppm(obs.rgb), camera, cfg.mask_rule, cfg.render_height)
    return ObservedScene(depth, mask, camera)


def load_observation(cfg: SceneConfig, profile: Optional[MorphologyProfile] = None) -> ObservedScene:
    if cfg.observation.kind == "synthetic":
        return synthetic_observation(cfg, profile)
    return file_observation(cfg)


class CanopyObjective:
    """Loss of a parameter vector against fixed observed statistics.

    Instances are picklable so optimizer runs can live in worker processes.
    """

    def __init__(self, species: str, layout: CanopyLayout, camera: PinholeCamera, specs: LossSpecs,
                 weights: LossWeights, observed: HistogramSet,
                 profile: Optional[MorphologyProfile] = None):
        self.species = species
        self.layout = layout
        self.camera = camera
        self.specs = specs
        self.weights = weights
        self.observed = observed
        self.profile = resolve_profile(species, profile)

    def canopy(self, x, seed: int) -> LabeledMesh:
        return build_canopy(self.species, clamp_params(x, self.species), self.layout, self.profile, seed)

    def statistics(self, x, seed: int) -> HistogramSet:
        depth, mask = render_depth(self.canopy(x, seed), self.camera)
        return compute_histograms(depth, mask, self.camera, self.specs)

    def breakdown(self, x, seed: int):
        return total_loss(self.observed, self.statistics(x, seed), self.weights)

    def __call__(self, x, seed: int) -> float:
        return self.breakdown(x, seed).total


def render_rgb(mesh: LabeledMesh, camera: PinholeCamera, organ_colors: Optional[dict] = None,
               ground_plane: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Flat-colored render by organ class; returns ``(rgb uint8, depth)``.

    With ``ground_plane`` the pixels that miss the mesh show the ``z = 0``
    plane in the ground color at its ray depth, otherwise they stay black
    with NaN depth.
    """
    colors = dict(DEFAULT_ORGAN_COLORS)
    colors.update(organ_colors or {})
    depth, face = render_faces(mesh, camera)
    hit = face >= 0
    rgb = np.zeros((camera.height, camera.width, 3), np.uint8)
    cls = mesh.face_class[np.where(hit, face, 0)]
    for label, color in colors.items():
        if label == GROUND:
            continue
        rgb[hit & (cls == label)] = color
    depth = np.where(hit, depth, np.nan)
    if ground_plane:
        rx, ry = camera.pixel_rays()
        dirs = np.stack([rx, ry, np.ones_like(rx)], axis=-1) @ camera.rotation
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -camera.center[2] / dirs[..., 2]
        ground = ~hit & np.isfinite(t) & (t > 0)
        rgb[ground] = colors[GROUND]
        depth = np.where(ground, t, depth)
    return rgb, depth
