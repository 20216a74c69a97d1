"""SSIM, its partial indices, and the Dissimilarity Quotient as per-pixel maps.

Two parameterizations are supported. The classic one works from a
:class:`~dquotient.window.StatsField` (means, variances, covariance of the
two images). The symmetric one works from a
:class:`~dquotient.window.SymStatsField` (means and variances of the sum and
difference images) and never needs the covariance. Regularizing offsets are
doubled in the symmetric forms so both routes give the same numbers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .image_io import _check_same_shape, as_array, encode_pgm
from .window import StatsField, SymStatsField, WindowSpec, local_mean


class EpsilonMode(str, Enum):
    REGULARIZED = "regularized"
    EXACT_ZERO = "exact_zero"


@dataclass(frozen=True)
class MetricParams:
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0
    epsilon_mode: EpsilonMode = EpsilonMode.REGULARIZED

    def __post_init__(self):
        object.__setattr__(self, "epsilon_mode", EpsilonMode(self.epsilon_mode))
        if self.dynamic_range <= 0:
            raise ValueError("dynamic_range must be positive")

    @property
    def exact_zero(self) -> bool:
        return self.epsilon_mode is EpsilonMode.EXACT_ZERO

    @property
    def c1(self) -> float:
        return 0.0 if self.exact_zero else (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return 0.0 if self.exact_zero else (self.k2 * self.dynamic_range) ** 2

    @property
    def c3(self) -> float:
        return self.c2 / 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilon_mode"] = self.epsilon_mode.value
        return d


EXACT = MetricParams(epsilon_mode=EpsilonMode.EXACT_ZERO)

RANGES = {
    "ssim": (-1.0, 1.0),
    "ssim3": (-1.0, 1.0),
    "sl": (-1.0, 1.0),
    "sv": (-1.0, 1.0),
    "dissimilarity": (0.0, 2.0),
    "dq": (0.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class MetricMap:
    """A per-pixel metric field.

    ``degenerate`` counts pixels whose denominator was exactly zero; those
    pixels hold NaN unless the metric defines a value for the 0/0 case.
    """

    name: str
    params: MetricParams
    values: np.ndarray
    degenerate: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def range(self) -> tuple[float, float]:
        return RANGES[self.name]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_csv(self, path) -> None:
        """Write ``x,y,value`` rows, row-major from the top-left pixel."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value"])
            for (y, x), v in np.ndenumerate(self.values):
                w.writerow([x, y, repr(float(v))])

    def affine(self) -> tuple[float, float]:
        """(offset, step) such that value ~= offset + byte * step."""
        finite = self.values[np.isfinite(self.values)]
        if finite.size == 0:
            return 0.0, 0.0
        lo, hi = float(finite.min()), float(finite.max())
        return lo, (hi - lo) / 255.0

    def to_pgm(self, path) -> Path:
        """Write an 8-bit PGM plus a JSON sidecar describing the mapping.

        Returns the sidecar path (the PGM path with a ``.json`` suffix).
        """
        offset, step = self.affine()
        v = np.nan_to_num(self.values, nan=offset)
        scaled = np.zeros_like(v) if step == 0 else np.clip((v - offset) / step, 0, 255)
        path = Path(path)
        path.write_bytes(encode_pgm(scaled))
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps(self.sidecar(offset, step), indent=2, sort_keys=True))
        return sidecar

    def sidecar(self, offset: float, step: float) -> dict:
        return {
            "schema": 1,
            "metric": self.name,
            "params": self.params.to_dict(),
            "width": self.shape[1],
            "height": self.shape[0],
            "offset": offset,
            "step": step,
            "range": list(self.range),
            "degenerate": self.degenerate,
            **self.meta,
        }


def _ratio(num, den, degenerate_value=np.nan):
    """num / den with zero denominators replaced and counted."""
    bad = den == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / np.where(bad, 1.0, den)
    out[bad] = degenerate_value
    return out, int(np.count_nonzero(bad))


def _nan_count(values) -> int:
    return int(np.count_nonzero(np.isnan(values)))


def _luminance(s: StatsField, p: MetricParams):
    return _ratio(2 * s.mu1 * s.mu2 + p.c1, s.mu1**2 + s.mu2**2 + p.c1)


def ssim_three_term(s: StatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """Luminance x contrast x structure, with C3 = C2 / 2."""
    sd1, sd2 = np.sqrt(s.var1), np.sqrt(s.var2)
    lum, _ = _luminance(s, p)
    con, _ = _ratio(2 * sd1 * sd2 + p.c2, s.var1 + s.var2 + p.c2)
    struct, _ = _ratio(s.cov + p.c3, sd1 * sd2 + p.c3)
    values = lum * con * struct
    return MetricMap("ssim3", p, values, _nan_count(values))


def ssim_two_term(s: StatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """S_L * S_V from the classic statistics."""
    lum, _ = _luminance(s, p)
    var, _ = _ratio(2 * s.cov + p.c2, s.var1 + s.var2 + p.c2)
    values = lum * var
    return MetricMap("ssim", p, values, _nan_count(values))


def sl_from_stats(s: StatsField, p: MetricParams = MetricParams()) -> MetricMap:
    values, n = _luminance(s, p)
    return MetricMap("sl", p, values, n)


def sv_from_stats(s: StatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """(2 cov + C2) / (var1 + var2 + C2); 0/0 is defined as 1."""
    values, n = _ratio(2 * s.cov + p.c2, s.var1 + s.var2 + p.c2, 1.0)
    return MetricMap("sv", p, values, n)


def sl_map(y: SymStatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """Luminance index as a Michelson-style contrast of mu_plus and mu_minus."""
    num = y.mu_plus**2 - y.mu_minus**2 + 2 * p.c1
    den = y.mu_plus**2 + y.mu_minus**2 + 2 * p.c1
    values, n = _ratio(num, den)
    return MetricMap("sl", p, values, n)


def sv_map(y: SymStatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """Covariance-free variance index.

    Equal to (2 cov + C2) / (var1 + var2 + C2) through the sum/difference
    identities. Two constant windows (0/0 in exact_zero mode) give 1.
    """
    num = y.var_plus - y.var_minus + 2 * p.c2
    den = y.var_plus + y.var_minus + 2 * p.c2
    values, n = _ratio(num, den, 1.0)
    return MetricMap("sv", p, values, n)


def dissimilarity_map(y: SymStatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """1 - S_V written directly as 2 var_minus / (var_plus + var_minus + 2 C2)."""
    values, n = _ratio(2 * y.var_minus, y.var_plus + y.var_minus + 2 * p.c2, 0.0)
    return MetricMap("dissimilarity", p, values, n)


def dq_map(y: SymStatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """Dissimilarity Quotient sd_minus / sqrt(var_plus + var_minus + 2 C2).

    Always in [0, 1]. Zero where both windows are constant.
    """
    den = np.sqrt(y.var_plus + y.var_minus + 2 * p.c2)
    values, n = _ratio(np.sqrt(y.var_minus), den, 0.0)
    # sd_minus <= den holds exactly in reals; guard the last ulp
    np.minimum(values, 1.0, out=values)
    return MetricMap("dq", p, values, n)


def nrmse(f1, f2) -> float:
    """||f2 - f1|| / ||f1|| over the whole image, f1 being the reference."""
    a, b = as_array(f1), as_array(f2)
    _check_same_shape(a, b)
    ref = float(np.linalg.norm(a))
    if ref == 0:
        raise ValueError("NRMSE undefined for an all-zero reference image")
    return float(np.linalg.norm(b - a)) / ref


def windowed_mse(f1, f2, spec: WindowSpec = WindowSpec()) -> np.ndarray:
    """Window-weighted mean of (f2 - f1)^2 at every output pixel."""
    a, b = as_array(f1), as_array(f2)
    _check_same_shape(a, b)
    return local_mean((b - a) ** 2, spec)


def mse_window_check(y: SymStatsField, f1, f2, spec: WindowSpec = WindowSpec()) -> float:
    """Max |var_minus - windowed MSE| over pixels whose difference mean is zero.

    Returns 0.0 when no pixel has |mu_minus| < 1e-12.
    """
    mse = windowed_mse(f1, f2, spec)
    zero_mean = np.abs(y.mu_minus) < 1e-12
    if not zero_mean.any():
        return 0.0
    return float(np.max(np.abs(y.var_minus - mse)[zero_mean]))


def mse_identity_residual(y: SymStatsField, f1, f2, spec: WindowSpec = WindowSpec()) -> float:
    """Max |var_minus - (windowed MSE - mu_minus^2)| over all pixels."""
    mse = windowed_mse(f1, f2, spec)
    return float(np.max(np.abs(y.var_minus - (mse - y.mu_minus**2))))


def ssim_symmetric(y: SymStatsField, p: MetricParams = MetricParams()) -> MetricMap:
    """S_L * S_V from the sum/difference statistics."""
    values = sl_map(y, p).values * sv_map(y, p).values
    return MetricMap("ssim", p, values, _nan_count(values))
