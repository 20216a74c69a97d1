"""Randomized check that the two SSIM parameterizations agree exactly."""

from __future__ import annotations

import numpy as np

from . import metrics
from .distort import rng
from .metrics import MetricParams
from .window import WindowSpec, identity_report, local_stats, sym_stats

TOLERANCE = 1e-10


def random_pair(g: np.random.Generator, size: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """A reference image and a gain/offset/noise-perturbed copy of it."""
    f1 = g.random((size, size))
    gain = g.uniform(0.2, 2.0)
    offset = g.uniform(-0.5, 0.5)
    noise = g.uniform(0.0, 0.3)
    f2 = gain * f1 + offset + noise * g.standard_normal((size, size))
    return f1, f2


def pair_residuals(f1, f2, spec: WindowSpec, params: MetricParams) -> dict[str, float]:
    s = local_stats(f1, f2, spec)
    y = sym_stats(f1, f2, spec)
    out = identity_report(s, y)
    sv = metrics.sv_map(y, params).values
    out["three-term = two-term SSIM"] = float(
        np.max(np.abs(metrics.ssim_three_term(s, params).values - metrics.ssim_two_term(s, params).values))
    )
    out["S_V symmetric = S_V classic"] = float(
        np.max(np.abs(sv - metrics.sv_from_stats(s, params).values))
    )
    out["dissimilarity = 1 - S_V"] = float(
        np.max(np.abs(metrics.dissimilarity_map(y, params).values - (1 - sv)))
    )
    out["DQ = sqrt((1 - S_V) / 2)"] = float(
        np.max(np.abs(metrics.dq_map(y, params).values - np.sqrt(np.maximum(1 - sv, 0) / 2)))
    )
    out["var_minus = windowed MSE - mu_minus^2"] = metrics.mse_identity_residual(y, f1, f2, spec)
    return out


def run_battery(
    trials: int = 100,
    seed: int = 0,
    spec: WindowSpec = WindowSpec(),
    params: MetricParams = MetricParams(),
    size: int = 64,
) -> dict[str, float]:
    """Worst residual of every check over ``trials`` random pairs."""
    g = rng(seed)
    worst: dict[str, float] = {}
    for _ in range(trials):
        f1, f2 = random_pair(g, size)
        for name, r in pair_residuals(f1, f2, spec, params).items():
            worst[name] = max(worst.get(name, 0.0), r)
    return worst
