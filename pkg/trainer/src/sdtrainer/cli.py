"""Trainer command line: build the dataset through the codec CLI, train,
and export runtime-loadable weights.

Usage: sdtrainer train CONFIG, where CONFIG is a key=value text file
(see config.py for the keys; image_dir and output are the essentials).
"""

import argparse
import sys
from pathlib import Path

from .config import load_config
from .dataset import DatasetError, build_dataset
from .export import export_weights
from .train import TrainingDiverged, train


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    if not cfg.image_dir:
        print("error: config must set image_dir", file=sys.stderr)
        return 2
    print(f"building dataset from {cfg.image_dir} (tau set {cfg.tau_set})")
    pairs = build_dataset(cfg.image_dir, cfg)
    print(f"{len(pairs)} training pairs of {cfg.patch_size}x{cfg.patch_size}")
    result = train(pairs, cfg, log=print)
    Path(cfg.output).write_bytes(export_weights(result.model))
    print(f"wrote {cfg.output}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sdtrainer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("train", help="train a model per a key=value config file")
    p.add_argument("config", help="path to the config file")
    p.set_defaults(func=_cmd_train)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, TrainingDiverged, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
