"""Grayscale image container plus PGM (P2/P5) reading and writing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PGMError(ValueError):
    """Malformed or truncated PGM data."""


class UnsupportedFormatError(PGMError):
    """PGM variant outside the supported P2/P5, maxval <= 255 subset."""


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable height x width grid of real luminance values.

    ``range_hint`` is the declared dynamic range (255 for raw 8-bit data,
    1.0 once normalized). Negative values are allowed so difference and
    transform outputs fit the same type.
    """

    values: np.ndarray
    range_hint: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"image must be a nonempty 2-D grid, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "range_hint", float(self.range_hint))

    @classmethod
    def from_list(cls, width: int, height: int, values, range_hint: float = 1.0) -> "Image":
        """Build from a flat row-major sequence."""
        flat = np.asarray(values, dtype=np.float64).ravel()
        if width <= 0 or height <= 0:
            raise ValueError("width and height must be positive")
        if flat.size != width * height:
            raise ValueError(
                f"expected {width * height} values for {width}x{height}, got {flat.size}"
            )
        return cls(flat.reshape(height, width), range_hint)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def tolist(self) -> list[float]:
        return self.values.ravel().tolist()

    def __repr__(self):
        return f"Image({self.width}x{self.height}, range_hint={self.range_hint:g})"


def as_array(img) -> np.ndarray:
    """Pixel grid of an Image, or a float64 view of an array-like."""
    if isinstance(img, Image):
        return img.values
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grid, got shape {arr.shape}")
    return arr


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[::-1]} vs {b.shape[::-1]} (w x h)")


def _tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset just past the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise PGMError("truncated PGM header")
        if data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> Image:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"unsupported magic {magic!r}; only P2 and P5 are read")
    header, pos = _tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in header[1:])
    except ValueError:
        raise PGMError(f"malformed PGM header: {header!r}") from None
    if width <= 0 or height <= 0:
        raise PGMError(f"bad dimensions {width}x{height}")
    if maxval <= 0:
        raise PGMError(f"bad maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormatError(f"maxval {maxval} > 255 (16-bit PGM) is not supported")
    npix = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        payload = data[pos + 1 : pos + 1 + npix]
        if len(payload) < npix:
            raise PGMError(f"truncated payload: expected {npix} bytes, got {len(payload)}")
        pixels = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = data[pos:]
        words = []
        for line in body.splitlines():
            words.extend(line.split(b"#", 1)[0].split())
        if len(words) < npix:
            raise PGMError(f"truncated payload: expected {npix} samples, got {len(words)}")
        try:
            pixels = np.array([int(w) for w in words[:npix]], dtype=np.int64)
        except ValueError:
            raise PGMError("non-integer sample in P2 raster") from None
    if pixels.max() > maxval or pixels.min() < 0:
        raise PGMError(f"sample outside [0, {maxval}]")
    return Image(pixels.reshape(height, width).astype(np.float64), range_hint=maxval)


def read_pgm(path) -> Image:
    """Read a P2 or P5 PGM with maxval <= 255 into an Image (range_hint = maxval)."""
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(img) -> bytes:
    arr = as_array(img)
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("PGM values must lie in [0, 255]; scale before writing")
    # round half up, not numpy's half-to-even
    raster = np.floor(arr + 0.5).astype(np.uint8)
    h, w = arr.shape
    return b"P5\n%d %d\n255\n" % (w, h) + raster.tobytes()


def write_pgm(img, path) -> None:
    """Write a binary P5 PGM with maxval 255, rounding values half-up."""
    Path(path).write_bytes(encode_pgm(img))


def normalize(img: Image) -> Image:
    """Divide by the declared range so the result has range_hint 1.0."""
    if img.range_hint <= 0:
        raise ValueError("range_hint must be positive")
    if img.range_hint == 1.0:
        return img
    return Image(img.values / img.range_hint, range_hint=1.0)


def sum_diff(f1, f2) -> tuple[Image, Image]:
    """Return the sum image f2 + f1 and the difference image f2 - f1."""
    a, b = as_array(f1), as_array(f2)
    _check_same_shape(a, b)
    hint = f1.range_hint if isinstance(f1, Image) else 1.0
    return Image(b + a, hint), Image(b - a, hint)


def from_sum_diff(f_plus, f_minus) -> tuple[Image, Image]:
    """Invert :func:`sum_diff`, returning (2*f1, 2*f2)."""
    p, m = as_array(f_plus), as_array(f_minus)
    _check_same_shape(p, m)
    return Image(p - m), Image(p + m)
