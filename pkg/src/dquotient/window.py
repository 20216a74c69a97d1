"""Sliding-window local statistics in the original and sum/difference forms.

Every output pixel is a weighted sum over a size x size neighbourhood with
weights summing to one, so variances are weighted population variances
(no Bessel correction). With that convention the sum/difference statistics
relate to the original ones by exact algebraic identities, which
:func:`identity_report` measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image_io import _check_same_shape, as_array, sum_diff

# rows of output processed per block; bounds the (rows, W, k, k) temporaries
_ROW_BLOCK = 32


class WindowKind(str, Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


class Border(str, Enum):
    VALID_ONLY = "valid_only"
    SYMMETRIC_PAD = "symmetric_pad"


@dataclass(frozen=True)
class WindowSpec:
    kind: WindowKind = WindowKind.GAUSSIAN
    size: int = 11
    sigma: float = 1.5
    border: Border = Border.VALID_ONLY

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind(self.kind))
        object.__setattr__(self, "border", Border(self.border))
        if int(self.size) != self.size or self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"window size must be an odd positive integer, got {self.size}")
        if self.kind is WindowKind.GAUSSIAN and not self.sigma > 0:
            raise ValueError(f"gaussian sigma must be positive, got {self.sigma}")

    @property
    def radius(self) -> int:
        return self.size // 2

    def output_shape(self, shape: tuple[int, int]) -> tuple[int, int]:
        if self.border is Border.SYMMETRIC_PAD:
            return shape
        return shape[0] - self.size + 1, shape[1] - self.size + 1


def make_kernel(spec: WindowSpec) -> np.ndarray:
    """size x size weight grid, nonnegative and summing to one."""
    k = spec.size
    if spec.kind is WindowKind.UNIFORM:
        return np.full((k, k), 1.0 / (k * k))
    r = np.arange(k) - spec.radius
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * spec.sigma**2))
    return g / g.sum()


@dataclass(frozen=True, eq=False)
class StatsField:
    """Per-pixel local means, variances and covariance of an image pair."""

    mu1: np.ndarray
    mu2: np.ndarray
    var1: np.ndarray
    var2: np.ndarray
    cov: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.mu1.shape

    @property
    def width(self) -> int:
        return self.shape[1]

    @property
    def height(self) -> int:
        return self.shape[0]


@dataclass(frozen=True, eq=False)
class SymStatsField:
    """Per-pixel means and variances of the sum and difference images."""

    mu_plus: np.ndarray
    mu_minus: np.ndarray
    var_plus: np.ndarray
    var_minus: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.mu_plus.shape

    @property
    def width(self) -> int:
        return self.shape[1]

    @property
    def height(self) -> int:
        return self.shape[0]


def window_moments(a, b, weights):
    """Weighted (mean_a, mean_b, var_a, var_b, cov) of one window.

    Works on any matching-shape arrays, including 1-D ones, as long as the
    weights sum to one.
    """
    a, b, w = (np.asarray(x, dtype=np.float64) for x in (a, b, weights))
    mu_a = float(np.sum(w * a))
    mu_b = float(np.sum(w * b))
    da, db = a - mu_a, b - mu_b
    return (
        mu_a,
        mu_b,
        max(float(np.sum(w * da * da)), 0.0),
        max(float(np.sum(w * db * db)), 0.0),
        float(np.sum(w * da * db)),
    )


def _padded(arr: np.ndarray, spec: WindowSpec) -> np.ndarray:
    if spec.border is Border.SYMMETRIC_PAD:
        return np.pad(arr, spec.radius, mode="symmetric")
    if arr.shape[0] < spec.size or arr.shape[1] < spec.size:
        raise ValueError(
            f"window of size {spec.size} does not fit a {arr.shape[1]}x{arr.shape[0]} image"
        )
    return arr


def _shifted_mean(win: np.ndarray, w: np.ndarray) -> np.ndarray:
    # centre pixel + weighted mean of offsets: exact for constant windows
    r = w.shape[0] // 2
    centre = win[:, :, r, r]
    return centre + np.einsum("ijkl,kl->ij", win - centre[:, :, None, None], w)


def _moments(a: np.ndarray, b: np.ndarray, spec: WindowSpec, cross: bool):
    """Two-pass weighted moments over every window position."""
    w = make_kernel(spec)
    wa = sliding_window_view(_padded(a, spec), w.shape)
    wb = sliding_window_view(_padded(b, spec), w.shape)
    out_shape = wa.shape[:2]
    mu_a, mu_b = np.empty(out_shape), np.empty(out_shape)
    var_a, var_b = np.empty(out_shape), np.empty(out_shape)
    cov = np.empty(out_shape) if cross else None
    for r0 in range(0, out_shape[0], _ROW_BLOCK):
        rows = slice(r0, r0 + _ROW_BLOCK)
        xa, xb = wa[rows], wb[rows]
        ma = _shifted_mean(xa, w)
        mb = _shifted_mean(xb, w)
        da = xa - ma[:, :, None, None]
        db = xb - mb[:, :, None, None]
        mu_a[rows], mu_b[rows] = ma, mb
        var_a[rows] = np.einsum("ijkl,ijkl,kl->ij", da, da, w)
        var_b[rows] = np.einsum("ijkl,ijkl,kl->ij", db, db, w)
        if cross:
            cov[rows] = np.einsum("ijkl,ijkl,kl->ij", da, db, w)
    np.maximum(var_a, 0.0, out=var_a)
    np.maximum(var_b, 0.0, out=var_b)
    return mu_a, mu_b, var_a, var_b, cov


def local_stats(f1, f2, spec: WindowSpec = WindowSpec()) -> StatsField:
    """Local mu1, mu2, var1, var2 and cov of an image pair."""
    a, b = as_array(f1), as_array(f2)
    _check_same_shape(a, b)
    return StatsField(*_moments(a, b, spec, cross=True))


def sym_stats(f1, f2, spec: WindowSpec = WindowSpec()) -> SymStatsField:
    """Local statistics of the sum image f2 + f1 and difference image f2 - f1."""
    f_plus, f_minus = sum_diff(f1, f2)
    mu_p, mu_m, var_p, var_m, _ = _moments(f_plus.values, f_minus.values, spec, cross=False)
    return SymStatsField(mu_p, mu_m, var_p, var_m)


def identity_report(s: StatsField, y: SymStatsField) -> dict[str, float]:
    """Max absolute residual of each of the six sum/difference identities."""
    if s.shape != y.shape:
        raise ValueError(f"grid mismatch: {s.shape} vs {y.shape}")

    def worst(lhs, rhs):
        return float(np.max(np.abs(lhs - rhs)))

    return {
        "mu_plus = mu2 + mu1": worst(y.mu_plus, s.mu2 + s.mu1),
        "mu_minus = mu2 - mu1": worst(y.mu_minus, s.mu2 - s.mu1),
        "4 mu1 mu2 = mu_plus^2 - mu_minus^2": worst(
            4 * s.mu1 * s.mu2, y.mu_plus**2 - y.mu_minus**2
        ),
        "2 mu1^2 + 2 mu2^2 = mu_plus^2 + mu_minus^2": worst(
            2 * s.mu1**2 + 2 * s.mu2**2, y.mu_plus**2 + y.mu_minus**2
        ),
        "4 cov = var_plus - var_minus": worst(4 * s.cov, y.var_plus - y.var_minus),
        "2 var1 + 2 var2 = var_plus + var_minus": worst(
            2 * s.var1 + 2 * s.var2, y.var_plus + y.var_minus
        ),
    }


def identity_residuals(s: StatsField, y: SymStatsField) -> float:
    """Largest residual over all six identities and all pixels."""
    return max(identity_report(s, y).values())


def local_mean(img, spec: WindowSpec = WindowSpec()) -> np.ndarray:
    """Weighted local mean of a single image under the window."""
    w = make_kernel(spec)
    win = sliding_window_view(_padded(as_array(img), spec), w.shape)
    out = np.empty(win.shape[:2])
    for r0 in range(0, out.shape[0], _ROW_BLOCK):
        rows = slice(r0, r0 + _ROW_BLOCK)
        out[rows] = _shifted_mean(win[rows], w)
    return out
