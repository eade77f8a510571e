"""Histogram statistics of depth maps and the weighted canopy loss.

All histograms are normalized frequencies: values outside a histogram's
range are clamped into its first or last bin, and an empty mask yields the
zero vector. The mask-area term works with areas divided by the pixel count,
so it does not depend on image resolution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from canopyfit.errors import DomainError, FormatError
from canopyfit.render.camera import PinholeCamera


@dataclass(frozen=True)
class HistogramSpec:
    """``bins`` equal-width bins spanning ``[lower, upper]``."""

    bins: int
    lower: float
    upper: float

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < 1:
            raise DomainError(f"histogram needs a positive integer bin count, got {self.bins}")
        if not self.lower < self.upper:
            raise DomainError(f"histogram lower bound {self.lower} must be below upper {self.upper}")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.bins + 1)

    def bin_index(self, values) -> np.ndarray:
        """Clamped bin index of each value."""
        values = np.asarray(values, dtype=float)
        idx = np.floor((values - self.lower) * (self.bins / (self.upper - self.lower)))
        return np.clip(idx, 0, self.bins - 1).astype(np.int64)

    def histogram(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return np.zeros(self.bins)
        counts = np.bincount(self.bin_index(values), minlength=self.bins).astype(float)
        return counts / values.size

    def to_dict(self) -> dict:
        return {"bins": int(self.bins), "lower": float(self.lower), "upper": float(self.upper)}

    @classmethod
    def from_dict(cls, data: dict) -> "HistogramSpec":
        return cls(int(data["bins"]), float(data["lower"]), float(data["upper"]))


@dataclass(frozen=True)
class LossSpecs:
    """Histogram layouts and preprocessing for one species and render height."""

    depth: HistogramSpec
    lateral: HistogramSpec
    sobel: HistogramSpec
    blur_kernel_size: int
    render_height: float

    def __post_init__(self):
        if self.blur_kernel_size < 1 or self.blur_kernel_size % 2 == 0:
            raise DomainError(f"blur kernel size must be a positive odd integer, got {self.blur_kernel_size}")
        if not self.render_height > 0:
            raise DomainError("render_height must be positive")

    def to_dict(self) -> dict:
        return {
            "depth": self.depth.to_dict(),
            "lateral": self.lateral.to_dict(),
            "sobel": self.sobel.to_dict(),
            "blur_kernel_size": int(self.blur_kernel_size),
            "render_height": float(self.render_height),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LossSpecs":
        return cls(
            HistogramSpec.from_dict(data["depth"]),
            HistogramSpec.from_dict(data["lateral"]),
            HistogramSpec.from_dict(data["sobel"]),
            int(data["blur_kernel_size"]),
            float(data["render_height"]),
        )


def species_specs(species: str, render_height: float | None = None) -> LossSpecs:
    """Default histogram layout for ``"soybean"`` or ``"maize"``."""
    if species == "soybean":
        h = 1.0 if render_height is None else float(render_height)
        depth = HistogramSpec(20, 0.1, h)
        kernel = 25
    elif species == "maize":
        h = 5.0 if render_height is None else float(render_height)
        depth = HistogramSpec(10, 2.0, h)
        kernel = 55
    else:
        raise DomainError(f"unknown species {species!r}")
    return LossSpecs(depth, HistogramSpec(10, 0.0, 0.5 * h), HistogramSpec(10, 0.0, 0.004), kernel, h)


@dataclass(frozen=True)
class LossWeights:
    lateral: float = 2.0
    sobel: float = 4.0
    mask: float = 1.0

    def __post_init__(self):
        if min(self.lateral, self.sobel, self.mask) < 0:
            raise DomainError("loss weights must be non-negative")

    @classmethod
    def for_species(cls, species: str) -> "LossWeights":
        if species == "soybean":
            return cls(2.0, 4.0, 1.0)
        if species == "maize":
            return cls(1.0, 0.0, 1.0)
        raise DomainError(f"unknown species {species!r}")

    def to_dict(self) -> dict:
        return {"lateral": self.lateral, "sobel": self.sobel, "mask": self.mask}


def _foreground(depth, mask) -> tuple[np.ndarray, np.ndarray]:
    depth = np.asarray(depth, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if depth.shape != mask.shape:
        raise DomainError(f"depth {depth.shape} and mask {mask.shape} shapes differ")
    return depth, mask & np.isfinite(depth)


def depth_histogram(depth, mask, spec: HistogramSpec) -> np.ndarray:
    depth, mask = _foreground(depth, mask)
    return spec.histogram(depth[mask])


def lateral_offsets(depth, mask, camera: PinholeCamera) -> np.ndarray:
    """Camera-frame ``|y|`` of the unprojected foreground pixels.

    For a camera whose x axis follows the row, this is the distance across
    the row.
    """
    depth, mask = _foreground(depth, mask)
    if depth.shape != (camera.height, camera.width):
        raise DomainError(f"depth shape {depth.shape} does not match camera {camera.height}x{camera.width}")
    rows = np.nonzero(mask)[0]
    _, cy = camera.principal_point
    return np.abs((rows + 0.5 - cy) * depth[mask] / camera.focal)


def lateral_histogram(depth, mask, camera: PinholeCamera, spec: HistogramSpec) -> np.ndarray:
    return spec.histogram(lateral_offsets(depth, mask, camera))


def gaussian_sigma(kernel_size: int) -> float:
    """Standard deviation associated with an odd kernel size."""
    return 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8


def gaussian_kernel(kernel_size: int, sigma: float | None = None) -> np.ndarray:
    """Normalized 1D Gaussian taps."""
    if kernel_size < 1 or kernel_size % 2 == 0:
        raise DomainError(f"blur kernel size must be a positive odd integer, got {kernel_size}")
    if sigma is None:
        sigma = gaussian_sigma(kernel_size)
    x = np.arange(kernel_size) - (kernel_size - 1) / 2.0
    taps = np.exp(-0.5 * (x / sigma) ** 2)
    return taps / taps.sum()


def gaussian_blur(image, kernel_size: int) -> np.ndarray:
    """Separable Gaussian blur with edge-replicating borders."""
    image = np.asarray(image, dtype=float)
    if kernel_size == 1:
        return image
    taps = gaussian_kernel(kernel_size)
    image = ndimage.correlate1d(image, taps, axis=0, mode="nearest")
    return ndimage.correlate1d(image, taps, axis=1, mode="nearest")


def sobel_magnitude(depth, mask, blur_kernel_size: int, fill: float) -> np.ndarray:
    """``|gx| + |gy|`` of the blurred depth, with background set to ``fill``.

    Borders replicate the edge pixels.
    """
    depth, mask = _foreground(depth, mask)
    image = gaussian_blur(np.where(mask, depth, fill), blur_kernel_size)
    gx = ndimage.sobel(image, axis=1, mode="nearest")
    gy = ndimage.sobel(image, axis=0, mode="nearest")
    return np.abs(gx) + np.abs(gy)


def sobel_histogram(depth, mask, spec: HistogramSpec, blur_kernel_size: int,
                    fill: float) -> np.ndarray:
    depth, mask = _foreground(depth, mask)
    if blur_kernel_size < 1 or blur_kernel_size % 2 == 0:
        raise DomainError(f"blur kernel size must be a positive odd integer, got {blur_kernel_size}")
    if not mask.any():
        return np.zeros(spec.bins)
    return spec.histogram(sobel_magnitude(depth, mask, blur_kernel_size, fill)[mask])


@dataclass
class HistogramSet:
    """Depth-map statistics: three normalized histograms and the mask area."""

    depth_hist: np.ndarray
    lateral_hist: np.ndarray
    sobel_hist: np.ndarray
    mask_area: float
    n_pixels: int
    render_height: float
    specs: LossSpecs | None = field(default=None, compare=False)

    @property
    def mask_fraction(self) -> float:
        return self.mask_area / self.n_pixels

    def to_dict(self) -> dict:
        out = {
            "depth_hist": [float(v) for v in self.depth_hist],
            "lateral_hist": [float(v) for v in self.lateral_hist],
            "sobel_hist": [float(v) for v in self.sobel_hist],
            "mask_area": self.mask_area,
            "n_pixels": int(self.n_pixels),
            "render_height": float(self.render_height),
        }
        if self.specs is not None:
            out["specs"] = self.specs.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HistogramSet":
        try:
            specs = LossSpecs.from_dict(data["specs"]) if "specs" in data else None
            return cls(
                np.asarray(data["depth_hist"], dtype=float),
                np.asarray(data["lateral_hist"], dtype=float),
                np.asarray(data["sobel_hist"], dtype=float),
                data["mask_area"],
                int(data["n_pixels"]),
                float(data["render_height"]),
                specs,
            )
        except KeyError as exc:
            raise FormatError(f"histogram set is missing field {exc.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "HistogramSet":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)


def compute_histograms(depth, mask, camera: PinholeCamera, specs: LossSpecs) -> HistogramSet:
    """All statistics of one depth map; the Sobel background is the render height."""
    depth, mask = _foreground(depth, mask)
    return HistogramSet(
        depth_histogram(depth, mask, specs.depth),
        lateral_histogram(depth, mask, camera, specs.lateral),
        sobel_histogram(depth, mask, specs.sobel, specs.blur_kernel_size, specs.render_height),
        int(mask.sum()),
        int(mask.size),
        specs.render_height,
        specs,
    )


def average_histograms(sets: list) -> HistogramSet:
    """Bin-wise mean of several statistics of the same layout.

    ``mask_area`` becomes the mean area, so it may be fractional.
    """
    if not sets:
        raise DomainError("cannot average an empty list of histogram sets")
    first = sets[0]
    for s in sets[1:]:
        if s.n_pixels != first.n_pixels or len(s.depth_hist) != len(first.depth_hist):
            raise DomainError("histogram sets differ in image size or bin layout")
    return HistogramSet(
        np.mean([s.depth_hist for s in sets], axis=0),
        np.mean([s.lateral_hist for s in sets], axis=0),
        np.mean([s.sobel_hist for s in sets], axis=0),
        float(np.mean([s.mask_area for s in sets])),
        first.n_pixels,
        first.render_height,
        first.specs,
    )


@dataclass(frozen=True)
class LossBreakdown:
    depth: float
    lateral: float
    sobel: float
    mask: float
    total: float

    def to_dict(self) -> dict:
        return {"L_depth": self.depth, "L_lateral": self.lateral, "L_sobel": self.sobel,
                "L_mask": self.mask, "L": self.total}


def _sq_dist(a, b, name) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"{name} histograms have different bin counts ({a.size} vs {b.size})")
    d = a - b
    return float(d @ d)


def total_loss(obs: HistogramSet, pred: HistogramSet, weights: LossWeights = LossWeights()) -> LossBreakdown:
    """Weighted sum of the squared histogram differences and the mask-area term."""
    if obs.specs is not None and pred.specs is not None and obs.specs != pred.specs:
        raise DomainError("observed and predicted statistics use different histogram specs")
    l_depth = _sq_dist(obs.depth_hist, pred.depth_hist, "depth")
    l_lateral = _sq_dist(obs.lateral_hist, pred.lateral_hist, "lateral")
    l_sobel = _sq_dist(obs.sobel_hist, pred.sobel_hist, "sobel")
    l_mask = (obs.mask_fraction - pred.mask_fraction) ** 2
    total = l_depth + weights.lateral * l_lateral + weights.sobel * l_sobel + weights.mask * l_mask
    return LossBreakdown(l_depth, l_lateral, l_sobel, l_mask, total)
