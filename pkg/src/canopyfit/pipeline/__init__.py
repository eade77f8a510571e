"""Scene configuration, observations, end-to-end fitting and the CLI."""

from canopyfit.pipeline.config import (
    PRESETS,
    MaskRule,
    Observation,
    SceneConfig,
    apply_overrides,
    load_config,
)
from canopyfit.pipeline.fit import FitResult, fit_scene, load_fit, observation_statistics, search_space
from canopyfit.pipeline.scene import (
    CanopyObjective,
    ObservedScene,
    load_observation,
    observation_mask,
    observation_seed,
    render_rgb,
    scene_camera,
    synthetic_observation,
)

__all__ = [
    "CanopyObjective",
    "FitResult",
    "MaskRule",
    "Observation",
    "ObservedScene",
    "PRESETS",
    "SceneConfig",
    "apply_overrides",
    "fit_scene",
    "load_config",
    "load_fit",
    "load_observation",
    "observation_mask",
    "observation_seed",
    "observation_statistics",
    "render_rgb",
    "scene_camera",
    "search_space",
    "synthetic_observation",
]
