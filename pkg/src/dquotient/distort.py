"""Deterministic synthetic distortions, test textures and level sweeps.

Randomness comes from numpy's PCG64 generator seeded through
``SeedSequence``; the same seed gives bit-identical noise on every platform
numpy supports. Outputs are never clipped, so means and variances of the
distorted image stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .image_io import Image, as_array
from .pipeline import PipelineConfig, pooled_scores


class DistortionKind(str, Enum):
    GAUSSIAN_NOISE = "gaussian_noise"
    GAUSSIAN_BLUR = "gaussian_blur"
    GAIN = "gain"
    OFFSET = "offset"


@dataclass(frozen=True)
class DistortionSpec:
    kind: DistortionKind
    level: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistortionKind(self.kind))
        if not (self.level >= 0 and math.isfinite(self.level)):
            raise ValueError(f"distortion level must be finite and >= 0, got {self.level}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra ints select independent substreams."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x**2) / (2 * sigma**2))
    return k / k.sum()


def _blur_axis(f: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    r = len(k) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(f, pad, mode="symmetric")
    n = f.shape[axis]
    out = f.copy()
    # accumulate weighted differences from the centre so constants pass through exactly
    for i, wi in enumerate(k):
        shifted = padded[i : i + n] if axis == 0 else padded[:, i : i + n]
        out += wi * (shifted - f)
    return out


def gaussian_blur(img, sigma: float) -> np.ndarray:
    f = as_array(img)
    if sigma == 0:
        return f.copy()
    k = gaussian_kernel_1d(sigma)
    return _blur_axis(_blur_axis(f, k, 0), k, 1)


def apply_distortion(img, spec: DistortionSpec) -> Image:
    f = as_array(img)
    hint = img.range_hint if isinstance(img, Image) else 1.0
    if spec.kind is DistortionKind.GAUSSIAN_NOISE:
        if spec.level == 0:
            out = f.copy()
        else:
            out = f + spec.level * rng(spec.seed).standard_normal(f.shape)
    elif spec.kind is DistortionKind.GAUSSIAN_BLUR:
        out = gaussian_blur(f, spec.level)
    elif spec.kind is DistortionKind.GAIN:
        out = f * spec.level
    else:
        out = f + spec.level
    return Image(out, hint)


def make_texture(seed: int, size: int = 128, contrast: float = 1.5) -> Image:
    """Fine-grained random texture bounded to (0.05, 0.95).

    Smoothed white noise at a few pixel-scale bandwidths, squashed through
    tanh so that most windows carry strong local contrast without leaving
    the unit range.
    """
    g = rng(seed, 1)
    field = np.zeros((size, size))
    for sigma, weight in ((0.7, 1.0), (1.5, 1.0), (4.0, 0.5)):
        layer = gaussian_blur(g.standard_normal((size, size)), sigma)
        field += weight * (layer - layer.mean()) / layer.std()
    field = (field - field.mean()) / field.std()
    return Image(0.5 + 0.45 * np.tanh(contrast * field))


@dataclass(frozen=True)
class SweepRecord:
    level: float
    ssim: float
    one_minus_ssim: float
    dq: float
    nrmse: float

    FIELDS = ("level", "ssim", "one_minus_ssim", "dq", "nrmse")

    def row(self) -> list[float]:
        return [getattr(self, f) for f in self.FIELDS]


def sweep(reference, kind, levels, seed: int = 0, config=None) -> list[SweepRecord]:
    """Distort ``reference`` at each level and pool the metrics against it.

    Every noise level reuses the same seed, so levels differ only in scale.
    """
    config = config or PipelineConfig()
    levels = [float(x) for x in levels]
    if not levels:
        raise ValueError("sweep needs at least one level")
    if any(b < a for a, b in zip(levels, levels[1:])):
        raise ValueError("sweep levels must be ascending")
    records = []
    for level in levels:
        test = apply_distortion(reference, DistortionSpec(kind, level, seed))
        s = pooled_scores(reference, test, config)
        records.append(SweepRecord(level, s["ssim"], s["one_minus_ssim"], s["dq"], s["nrmse"]))
    return records
