"""Gain-equivariant, offset-invariant pre-transforms applied before statistics."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .image_io import Image, as_array


class TransformKind(str, Enum):
    NONE = "none"
    GRADIENT_MAGNITUDE = "gradient_magnitude"
    LAPLACIAN = "laplacian"
    RIESZ_MAGNITUDE = "riesz_magnitude"


# short names accepted on the command line
CLI_NAMES = {
    "none": TransformKind.NONE,
    "grad": TransformKind.GRADIENT_MAGNITUDE,
    "laplacian": TransformKind.LAPLACIAN,
    "riesz": TransformKind.RIESZ_MAGNITUDE,
}


def _hint(img) -> float:
    return img.range_hint if isinstance(img, Image) else 1.0


def _require(arr: np.ndarray, n: int):
    if arr.shape[0] < n or arr.shape[1] < n:
        raise ValueError(f"transform needs an image of at least {n}x{n}, got {arr.shape[1]}x{arr.shape[0]}")


def gradient_magnitude(img) -> Image:
    """sqrt(gx^2 + gy^2) from central differences, one-sided at the borders."""
    f = as_array(img)
    _require(f, 3)
    gy, gx = np.gradient(f)
    return Image(np.hypot(gx, gy), _hint(img))


def laplacian(img) -> Image:
    """5-point Laplacian; the one-pixel border is set to zero."""
    f = as_array(img)
    _require(f, 3)
    out = np.zeros_like(f)
    out[1:-1, 1:-1] = (
        f[1:-1, 2:] + f[1:-1, :-2] + f[2:, 1:-1] + f[:-2, 1:-1] - 4 * f[1:-1, 1:-1]
    )
    return Image(out, _hint(img))


def riesz_multipliers(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Frequency responses -i u/|w| and -i v/|w| in unshifted FFT layout.

    ``u`` runs along columns (x) and ``v`` along rows (y), both signed
    integer frequencies. DC and, for even sizes, the Nyquist row/column are
    zero so the filtered output is exactly real.
    """
    h, w = shape
    v = np.fft.fftfreq(h) * h
    u = np.fft.fftfreq(w) * w
    uu, vv = np.meshgrid(u, v)
    radius = np.hypot(uu, vv)
    radius[0, 0] = 1.0
    h1 = -1j * uu / radius
    h2 = -1j * vv / radius
    h1[0, 0] = h2[0, 0] = 0
    if h % 2 == 0:
        h1[h // 2, :] = h2[h // 2, :] = 0
    if w % 2 == 0:
        h1[:, w // 2] = h2[:, w // 2] = 0
    return h1, h2


def riesz_components(img) -> tuple[np.ndarray, np.ndarray]:
    f = as_array(img)
    _require(f, 2)
    spectrum = np.fft.fft2(f)
    h1, h2 = riesz_multipliers(f.shape)
    return np.fft.ifft2(spectrum * h1).real, np.fft.ifft2(spectrum * h2).real


def riesz_magnitude(img) -> Image:
    """Monogenic envelope sqrt(f0^2 + r1^2 + r2^2), f0 being f minus its mean.

    The Riesz pair alone gives |sin| for a cosine input; folding the
    zero-mean signal back in makes the result the local amplitude, which is
    1 everywhere for a unit cosine. Removing the mean keeps it
    offset-invariant.
    """
    f = as_array(img)
    r1, r2 = riesz_components(f)
    f0 = f - f.mean()
    return Image(np.sqrt(f0**2 + r1**2 + r2**2), _hint(img))


_DISPATCH = {
    TransformKind.GRADIENT_MAGNITUDE: gradient_magnitude,
    TransformKind.LAPLACIAN: laplacian,
    TransformKind.RIESZ_MAGNITUDE: riesz_magnitude,
}


def apply_transform(kind, img) -> Image:
    kind = TransformKind(kind)
    if kind is TransformKind.NONE:
        return img if isinstance(img, Image) else Image(as_array(img))
    return _DISPATCH[kind](img)
