"""Desk-scale trainer for the codec's soft-decoding network.

Consumes the codec package strictly through its external surfaces: the
CLI for compression, PGM for images, .lsdw for exported weights.
"""

from .config import TrainConfig, load_config, parse_config
from .dataset import DatasetError, TrainingPair, build_dataset
from .export import export_weights, read_lsdw
from .model import SDNet, band_truncate, restore_to_uint8
from .train import TrainingDiverged, TrainResult, mean_hard_psnr, mean_soft_psnr, train

__version__ = "0.1.0"

__all__ = [
    "DatasetError",
    "SDNet",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "TrainingPair",
    "band_truncate",
    "build_dataset",
    "export_weights",
    "load_config",
    "mean_hard_psnr",
    "mean_soft_psnr",
    "parse_config",
    "read_lsdw",
    "restore_to_uint8",
    "train",
]
