"""Shared fixtures: synthetic grayscale corpus and codec-CLI plumbing.

The generator produces smooth multi-wave backgrounds with band-limited
texture and fine grain; training-gain expectations in the acceptance
tests were calibrated against exactly this distribution.
"""

import shutil
import sys

import numpy as np
import pytest


def codec_command() -> str:
    """Command line for the codec CLI (external interface of the primary)."""
    if shutil.which("nlcodec"):
        return "nlcodec"
    return f"{sys.executable} -m nlcodec.cli"


def make_image(size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    img = np.full((size, size), 128.0)
    for _ in range(3):
        fx, fy = rng.uniform(0.3, 2.5, 2)
        px, py = rng.uniform(0, 2 * np.pi, 2)
        img += rng.uniform(15, 40) * np.cos(2 * np.pi * fx * xx / size + px) * np.cos(
            2 * np.pi * fy * yy / size + py
        )
    t = rng.normal(0, 1, (size + 2, size + 2))
    t = (
        t[:-2, :-2] + t[1:-1, :-2] + t[2:, :-2]
        + t[:-2, 1:-1] + t[1:-1, 1:-1] + t[2:, 1:-1]
        + t[:-2, 2:] + t[1:-1, 2:] + t[2:, 2:]
    ) / 9.0
    img += 6.0 * t
    img += rng.normal(0, 2.0, (size, size))
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


@pytest.fixture(scope="session")
def codec_cmd():
    return codec_command()
