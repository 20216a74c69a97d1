"""transform -> window statistics -> metric maps -> pooled values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .evaluate import pool_minkowski
from .image_io import _check_same_shape, as_array
from .metrics import MetricMap, MetricParams
from .transforms import TransformKind, apply_transform
from .window import WindowSpec, local_stats, sym_stats

MAP_NAMES = ("dq", "ssim", "ssim3", "sl", "sv", "dissimilarity")


@dataclass(frozen=True)
class PipelineConfig:
    window: WindowSpec = field(default_factory=WindowSpec)
    params: MetricParams = field(default_factory=MetricParams)
    transform: TransformKind = TransformKind.NONE
    pool: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "transform", TransformKind(self.transform))
        if not self.pool > 0:
            raise ValueError("pooling exponent must be positive")

    def to_dict(self) -> dict:
        return {
            "window": {
                "kind": self.window.kind.value,
                "size": self.window.size,
                "sigma": self.window.sigma,
                "border": self.window.border.value,
            },
            "params": self.params.to_dict(),
            "transform": self.transform.value,
            "pool": self.pool,
        }


def metric_maps(f1, f2, config: PipelineConfig = PipelineConfig(), names=MAP_NAMES) -> dict[str, MetricMap]:
    a, b = as_array(f1), as_array(f2)
    _check_same_shape(a, b)
    ta = apply_transform(config.transform, a)
    tb = apply_transform(config.transform, b)
    p = config.params
    out = {}
    if {"ssim", "ssim3"} & set(names):
        s = local_stats(ta, tb, config.window)
        if "ssim" in names:
            out["ssim"] = metrics.ssim_two_term(s, p)
        if "ssim3" in names:
            out["ssim3"] = metrics.ssim_three_term(s, p)
    y = sym_stats(ta, tb, config.window)
    builders = {
        "dq": metrics.dq_map,
        "sl": metrics.sl_map,
        "sv": metrics.sv_map,
        "dissimilarity": metrics.dissimilarity_map,
    }
    for name in names:
        if name in builders:
            out[name] = builders[name](y, p)
    return {n: out[n] for n in names}


def _finite_mean(m: MetricMap) -> float | None:
    v = m.values[np.isfinite(m.values)]
    return float(v.mean()) if v.size else None


def pooled_scores(f1, f2, config: PipelineConfig = PipelineConfig()) -> dict:
    """Pooled SSIM (both forms), S_L, S_V, 1 - SSIM, DQ and NRMSE.

    Mean pooling for the SSIM-family maps, Minkowski pooling with exponent
    ``config.pool`` for DQ. Degenerate (NaN) pixels are left out of means and
    counted under ``degenerate``.
    """
    maps = metric_maps(f1, f2, config)
    ssim = _finite_mean(maps["ssim"])
    dq_vals = maps["dq"].values
    try:
        nrmse = metrics.nrmse(f1, f2)
    except ValueError:
        nrmse = None
    return {
        "ssim": ssim,
        "ssim_three_term": _finite_mean(maps["ssim3"]),
        "s_l": _finite_mean(maps["sl"]),
        "s_v": _finite_mean(maps["sv"]),
        "one_minus_ssim": None if ssim is None else 1.0 - ssim,
        "dq": pool_minkowski(dq_vals, config.pool),
        "nrmse": nrmse,
        "degenerate": {k: m.degenerate for k, m in maps.items() if m.degenerate},
    }


def clean_json(value):
    """Replace non-finite floats with None so reports stay valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: clean_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_json(v) for v in value]
    return value
