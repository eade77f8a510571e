"""Scene configuration, named presets and command-line overrides."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from canopyfit.bayesopt.optimizer import OptConfig
from canopyfit.errors import ConfigError, DomainError
from canopyfit.loss import LossSpecs, LossWeights, species_specs
from canopyfit.morphology.canopy import CanopyLayout
from canopyfit.morphology.params import SPECIES, params_class
from canopyfit.render.camera import DEFAULT_HEIGHT, DEFAULT_VFOV, DEFAULT_WIDTH

PRESETS = {
    "desk": {"n_initial": 100, "n_total": 300, "n_runs": 5},
    "full": {"n_initial": 200, "n_total": 500, "n_runs": 10},
}

DEFAULT_RENDER_HEIGHT = {"soybean": 1.0, "maize": 5.0}


@dataclass(frozen=True)
class MaskRule:
    """Background rule for observed renders with color.

    A pixel is background when its ``a'`` is below ``a_max`` (and ``L'``
    above ``l_min`` if set) while its depth is within ``near_ground`` of the
    render height, or when its depth is below ``min_depth``, or when its
    lateral offset is at least ``max_lateral``. ``L' = L*`` and ``a' = -a*``
    by default (``lab_scale``/``lab_offset``), so reddish soil has a
    negative ``a'`` and green foliage a positive one.
    """

    a_max: float = -8.0
    l_min: Optional[float] = None
    near_ground: float = 0.25
    min_depth: float = 0.1
    max_lateral: float = 0.5
    lab_scale: tuple = (1.0, -1.0, 1.0)
    lab_offset: tuple = (0.0, 0.0, 0.0)

    @classmethod
    def for_species(cls, species: str) -> "MaskRule":
        if species == "maize":
            return cls(a_max=-8.0, l_min=40.0, near_ground=2.0, min_depth=0.1, max_lateral=3.0)
        return cls()


@dataclass(frozen=True)
class Observation:
    """Either ``kind="synthetic"`` with hidden ``params`` and ``seed``, or
    ``kind="files"`` with paths to a depth map, camera and a mask or RGB image."""

    kind: str = "synthetic"
    params: dict = field(default_factory=dict)
    seed: int = 0
    depth: Optional[str] = None
    mask: Optional[str] = None
    rgb: Optional[str] = None
    camera: Optional[str] = None

    def validate(self, species: str) -> None:
        if self.kind == "synthetic":
            params_class(species)(**self.params)
        elif self.kind == "files":
            if not self.depth or not self.camera or not (self.mask or self.rgb):
                raise ConfigError("file observation needs depth, camera and a mask or rgb image")
            for name in ("depth", "mask", "rgb", "camera"):
                path = getattr(self, name)
                if path is not None and not Path(path).exists():
                    raise ConfigError(f"observation {name} file not found: {path}")
        else:
            raise ConfigError(f"unknown observation kind {self.kind!r}")


@dataclass(frozen=True)
class SceneConfig:
    species: str = "soybean"
    observation: Observation = Observation()
    layout: CanopyLayout = CanopyLayout()
    render_height: Optional[float] = None
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    vfov_deg: float = DEFAULT_VFOV
    weights: Optional[LossWeights] = None
    specs: Optional[LossSpecs] = None
    opt: OptConfig = OptConfig(**PRESETS["desk"])
    mask_rule: Optional[MaskRule] = None
    output_dir: Optional[str] = None
    workers: Optional[int] = None
    report_seed: int = 12345

    def __post_init__(self):
        if self.species not in SPECIES:
            raise ConfigError(f"unknown species {self.species!r}; expected one of {SPECIES}")
        if self.render_height is None:
            object.__setattr__(self, "render_height", DEFAULT_RENDER_HEIGHT[self.species])
        if self.weights is None:
            object.__setattr__(self, "weights", LossWeights.for_species(self.species))
        if self.specs is None:
            object.__setattr__(self, "specs", species_specs(self.species, self.render_height))
        if self.mask_rule is None:
            object.__setattr__(self, "mask_rule", MaskRule.for_species(self.species))
        if not self.render_height > 0:
            raise ConfigError("render_height must be positive")
        self.observation.validate(self.species)

    def to_dict(self) -> dict:
        return {
            "species": self.species,
            "observation": dict(self.observation.__dict__),
            "layout": self.layout.to_dict(),
            "render_height": self.render_height,
            "width": self.width,
            "height": self.height,
            "vfov_deg": self.vfov_deg,
            "weights": self.weights.to_dict(),
            "specs": self.specs.to_dict(),
            "opt": self.opt.to_dict(),
            "mask_rule": dict(self.mask_rule.__dict__),
            "output_dir": self.output_dir,
            "workers": self.workers,
            "report_seed": self.report_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SceneConfig":
        data = dict(data)
        known = set(cls.__dataclass_fields__) | {"preset"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        preset = data.pop("preset", None)
        opt = dict(PRESETS[_check_preset(preset)]) if preset else dict(PRESETS["desk"])
        opt.update(data.pop("opt", {}) or {})
        try:
            kwargs = {"opt": OptConfig(**opt)}
            if "observation" in data:
                kwargs["observation"] = Observation(**data.pop("observation"))
            if "layout" in data:
                kwargs["layout"] = CanopyLayout(**data.pop("layout"))
            if data.get("weights") is not None:
                kwargs["weights"] = LossWeights(**data.pop("weights"))
            if data.get("specs") is not None:
                kwargs["specs"] = LossSpecs.from_dict(data.pop("specs"))
            if data.get("mask_rule") is not None:
                rule = {k: tuple(v) if isinstance(v, list) else v for k, v in data.pop("mask_rule").items()}
                kwargs["mask_rule"] = MaskRule(**rule)
            kwargs.update({k: v for k, v in data.items() if v is not None})
            return cls(**kwargs)
        except (TypeError, DomainError) as exc:
            raise ConfigError(f"invalid scene config: {exc}") from None

    def with_preset(self, name: str) -> "SceneConfig":
        return replace(self, opt=replace(self.opt, **PRESETS[_check_preset(name)]))


def _check_preset(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    return name


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides: list) -> dict:
    """Apply ``key=value`` or ``--a.b=value`` strings to a nested dict.

    Values are parsed as JSON when possible, otherwise kept as strings.
    """
    out = copy.deepcopy(data)
    for item in overrides:
        text = item[2:] if item.startswith("--") else item
        if "=" not in text:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = text.split("=", 1)
        parts = [p.replace("-", "_") for p in key.split(".")]
        node = out
        for p in parts[:-1]:
            child = node.get(p)
            if child is None:
                child = node[p] = {}
            if not isinstance(child, dict):
                raise ConfigError(f"cannot override {key!r}: {p!r} is not a section")
            node = child
        node[parts[-1]] = _parse_value(value)
    return out


def load_config(path=None, overrides: tuple = ()) -> SceneConfig:
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    return SceneConfig.from_dict(apply_overrides(data, list(overrides)))
