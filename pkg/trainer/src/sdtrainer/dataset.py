"""Paired-patch dataset construction through the codec's CLI.

Each training image is compressed and hard-decoded at every tau in the
configured set by invoking the codec executable (one source of truth for
the quantizer semantics), then both planes are cut into aligned patches.
Patches that would straddle the image border are dropped.  Every pair is
checked against the error bound at ingestion; a violation means the
codec installation is broken, not the data.
"""

import os
import shlex
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pgm import read_pgm, write_pgm


class DatasetError(RuntimeError):
    """CLI invocation failure or an ingestion bound violation."""


@dataclass
class TrainingPair:
    x_patch: np.ndarray  # clean uint8 patch
    y_patch: np.ndarray  # hard-decoded uint8 patch
    tau: int


def _run(cmd, what):
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise DatasetError(
            f"{what} failed (exit {proc.returncode}): {' '.join(cmd)}\n{proc.stderr.strip()}"
        )


def hard_decode(image_path: Path, tau: int, codec_cmd: str, workdir: Path) -> np.ndarray:
    """Encode + decode one image at the given bound via the codec CLI."""
    base = shlex.split(codec_cmd)
    nlc = workdir / f"{image_path.stem}_t{tau}.nlc"
    out = workdir / f"{image_path.stem}_t{tau}.pgm"
    _run(base + ["encode", "--tau", str(tau), str(image_path), str(nlc)], "encode")
    _run(base + ["decode", str(nlc), str(out)], "decode")
    return read_pgm(out.read_bytes())


def patch_origins(height: int, width: int, size: int, stride: int):
    """Top-left corners of all complete size x size patches."""
    return [
        (r, c)
        for r in range(0, height - size + 1, stride)
        for c in range(0, width - size + 1, stride)
    ]


def build_dataset(image_dir, cfg) -> list:
    """TrainingPairs for every image x tau x patch position.

    The per-(image, tau) CLI round trips dominate wall time and are
    independent, so they run on a small thread pool (the work happens in
    child processes).  Pair order is deterministic regardless.
    """
    images = sorted(Path(image_dir).glob("*.pgm"))
    if not images:
        raise DatasetError(f"no .pgm images in {image_dir}")
    pairs = []
    with tempfile.TemporaryDirectory(prefix="sdtrainer_") as tmp:
        workdir = Path(tmp)
        jobs = [(path, tau) for path in images for tau in cfg.tau_set]
        workers = min(4, os.cpu_count() or 1, len(jobs)) or 1
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decoded = list(
                pool.map(lambda j: hard_decode(j[0], j[1], cfg.codec_cmd, workdir), jobs)
            )
        planes = dict(zip(jobs, decoded))
        for image_path in images:
            x = read_pgm(image_path.read_bytes())
            origins = patch_origins(*x.shape, cfg.patch_size, cfg.patch_stride)
            if not origins:
                continue
            for tau in cfg.tau_set:
                y = planes[(image_path, tau)]
                if y.shape != x.shape:
                    raise DatasetError(f"decoded size mismatch for {image_path.name}")
                err = int(np.max(np.abs(x.astype(np.int64) - y.astype(np.int64))))
                if err > tau:
                    raise DatasetError(
                        f"ingestion bound violated on {image_path.name}: "
                        f"linf {err} > tau {tau} (codec/CLI mismatch)"
                    )
                p = cfg.patch_size
                for r, c in origins:
                    pairs.append(
                        TrainingPair(
                            x[r : r + p, c : c + p].copy(),
                            y[r : r + p, c : c + p].copy(),
                            tau,
                        )
                    )
    return pairs


def write_image_dir(images, directory) -> Path:
    """Dump uint8 arrays as img000.pgm, img001.pgm, ... (test/tool helper)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, arr in enumerate(images):
        (directory / f"img{i:03d}.pgm").write_bytes(write_pgm(arr))
    return directory
