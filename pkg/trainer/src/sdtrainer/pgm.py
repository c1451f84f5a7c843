"""Minimal binary PGM (P5, maxval 255) reader/writer.

The trainer talks to the codec package only through files, so it carries
its own copy of the exchange-format code.
"""

import numpy as np


def read_pgm(data: bytes) -> np.ndarray:
    if data[:2] != b"P5":
        raise ValueError("not a binary PGM")
    pos = 2
    fields = []
    while len(fields) < 3:
        c = data[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c in b"#":
            while data[pos] not in b"\n":
                pos += 1
        else:
            start = pos
            while data[pos] in b"0123456789":
                pos += 1
            fields.append(int(data[start:pos]))
    pos += 1
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    n = width * height
    raster = data[pos : pos + n]
    if len(raster) < n:
        raise ValueError("truncated PGM raster")
    return np.frombuffer(raster, np.uint8).reshape(height, width).copy()


def write_pgm(pixels: np.ndarray) -> bytes:
    if pixels.dtype != np.uint8 or pixels.ndim != 2:
        raise ValueError("expected a 2-D uint8 array")
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes()
