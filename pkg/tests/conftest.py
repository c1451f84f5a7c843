"""Shared fixtures: a deterministic 20-image test corpus.

Sixteen pseudo-natural images (smooth background waves, step structures,
band-limited texture, fine grain) plus four synthetic stress images
(constant, ramp, checkerboard, white noise).  The generator parameters
are frozen: the acceptance suite's rate/PSNR expectations were computed
against exactly these images.
"""

import numpy as np
import pytest

from nlcodec import Image


def make_natural(width: int, height: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    img = np.full((height, width), 128.0)
    for _ in range(3):
        fx, fy = rng.uniform(0.3, 2.5, 2)
        px, py = rng.uniform(0, 2 * np.pi, 2)
        amp = rng.uniform(15, 40)
        img += amp * np.cos(2 * np.pi * fx * xx / width + px) * np.cos(
            2 * np.pi * fy * yy / height + py
        )
    for _ in range(3):
        x0, x1 = np.sort(rng.integers(0, width, 2))
        y0, y1 = np.sort(rng.integers(0, height, 2))
        img[y0 : y1 + 1, x0 : x1 + 1] += rng.uniform(-45, 45)
    t = rng.normal(0, 1, (height + 2, width + 2))
    t = (
        t[:-2, :-2] + t[1:-1, :-2] + t[2:, :-2]
        + t[:-2, 1:-1] + t[1:-1, 1:-1] + t[2:, 1:-1]
        + t[:-2, 2:] + t[1:-1, 2:] + t[2:, 2:]
    ) / 9.0
    img += 6.0 * t
    img += rng.normal(0, 2.0, (height, width))
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def natural_images(count: int = 16, size: int = 64):
    return [Image(make_natural(size, size, 100 + s)) for s in range(count)]


def synthetic_images():
    rng = np.random.default_rng(0)
    ramp = np.tile((np.arange(64, dtype=np.uint16) * 4).astype(np.uint8), (64, 1))
    checker = (np.indices((64, 64)).sum(axis=0) % 2 * 255).astype(np.uint8)
    return [
        Image(np.full((48, 48), 77, np.uint8)),
        Image(ramp),
        Image(checker),
        Image(rng.integers(0, 256, (64, 64)).astype(np.uint8)),
    ]


@pytest.fixture(scope="session")
def naturals():
    return natural_images()


@pytest.fixture(scope="session")
def corpus20(naturals):
    return naturals + synthetic_images()
