"""Single-channel 8-bit images, binary PGM (P5) I/O, and quality metrics."""

import math
from dataclasses import dataclass

import numpy as np

#: PSNR value reported when two images are identical (zero MSE).
INFINITE = math.inf

PEAK = 255


class PgmError(ValueError):
    """Malformed or unsupported PGM data."""


@dataclass(frozen=True)
class Image:
    """A width x height plane of 8-bit intensities, stored row-major.

    ``pixels`` is a 2-D uint8 array of shape (height, width).  Zero-area
    images are permitted in memory (they round-trip through the codec
    container) but cannot be written as PGM.
    """

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.ndim != 2 or p.dtype != np.uint8:
            raise ValueError("pixels must be a 2-D uint8 array")
        if not p.flags.c_contiguous:
            object.__setattr__(self, "pixels", np.ascontiguousarray(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


def _check_same_size(a: Image, b: Image):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def read_pgm(data: bytes) -> Image:
    """Parse a binary PGM ("P5", maxval 255) byte stream.

    Comments (# to end of line) are accepted in the header, per the Netpbm
    convention.  Raises PgmError with a distinct message for a bad magic,
    malformed header, unsupported maxval, or truncated pixel data.
    """
    if len(data) < 2 or data[:2] != b"P5":
        raise PgmError("not a binary PGM: missing P5 magic")

    pos = 2
    fields = []
    while len(fields) < 3:
        if pos >= len(data):
            raise PgmError("malformed header: unexpected end of data")
        c = data[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c in b"#":
            while pos < len(data) and data[pos] not in b"\n":
                pos += 1
        elif c in b"0123456789":
            start = pos
            while pos < len(data) and data[pos] in b"0123456789":
                pos += 1
            fields.append(int(data[start:pos]))
        else:
            raise PgmError(f"malformed header: unexpected byte {data[pos]:#x}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos] not in b" \t\r\n":
        raise PgmError("malformed header: missing whitespace before raster")
    pos += 1

    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise PgmError(f"malformed header: non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval} (only 255)")

    n = width * height
    raster = data[pos : pos + n]
    if len(raster) < n:
        raise PgmError(f"truncated pixel data: expected {n} bytes, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Image(pixels.copy())


def write_pgm(img: Image) -> bytes:
    """Serialize an Image as binary PGM; read_pgm(write_pgm(img)) == img."""
    if img.width == 0 or img.height == 0:
        raise PgmError("cannot write a zero-area image as PGM")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB: 10*log10(255^2 / MSE).

    Returns INFINITE for identical images.
    """
    _check_same_size(a, b)
    diff = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    mse = float(np.mean(diff * diff)) if diff.size else 0.0
    if mse == 0.0:
        return INFINITE
    return 10.0 * math.log10(PEAK * PEAK / mse)


def linf_error(a: Image, b: Image) -> int:
    """Maximum per-pixel absolute difference."""
    _check_same_size(a, b)
    if a.pixels.size == 0:
        return 0
    diff = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    return int(np.max(np.abs(diff)))


def format_psnr(value: float) -> str:
    """Render a PSNR value for CLI output ("inf" for identical images)."""
    return "inf" if value == INFINITE else f"{value:.4f}"
