"""Procedural soybean and maize morphology."""

from canopyfit.morphology.canopy import CanopyLayout, build_canopy
from canopyfit.morphology.maize import generate_maize_plant
from canopyfit.morphology.mesh import (
    LEAF,
    ORGAN_CLASSES,
    PETIOLE,
    STEM,
    LabeledMesh,
    read_obj,
    write_obj,
)
from canopyfit.morphology.params import (
    SPECIES,
    MaizeParams,
    PlantParams,
    SoybeanParams,
    clamp_params,
    param_bounds,
    param_names,
    params_from_vector,
)
from canopyfit.morphology.profile import MorphologyProfile, default_profile, load_profile
from canopyfit.morphology.soybean import generate_soybean_plant

__all__ = [
    "CanopyLayout",
    "LEAF",
    "LabeledMesh",
    "MaizeParams",
    "MorphologyProfile",
    "ORGAN_CLASSES",
    "PETIOLE",
    "PlantParams",
    "SPECIES",
    "STEM",
    "SoybeanParams",
    "build_canopy",
    "clamp_params",
    "default_profile",
    "generate_maize_plant",
    "generate_soybean_plant",
    "load_profile",
    "param_bounds",
    "param_names",
    "params_from_vector",
    "read_obj",
    "write_obj",
]
