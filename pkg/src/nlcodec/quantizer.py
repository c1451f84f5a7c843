"""Uniform residual quantizer with a hard per-pixel error bound.

A residual e is mapped to the bin index m = sign(e) * (|e| + tau) // (2*tau + 1)
and reconstructed as m * (2*tau + 1), which keeps |e - e_hat| <= tau for
every input.  The negative branch must truncate toward zero: a true floor
there would put e = -1 at tau = 2 into the -5 bin (error 4 > tau).
"""

from dataclasses import dataclass
from typing import NamedTuple

from .backend import njit

TAU_MAX = 8

#: Predictor identifiers carried in the bitstream header.
PREDICTOR_GAP = 0


class QuantizedResidual(NamedTuple):
    index: int  # transmitted symbol m
    reconstruction: int  # e_hat = m * (2*tau + 1)


@dataclass(frozen=True)
class CodecConfig:
    tau: int
    predictor_id: int = PREDICTOR_GAP

    def __post_init__(self):
        if not 0 <= self.tau <= TAU_MAX:
            raise ValueError(f"tau must be in [0, {TAU_MAX}], got {self.tau}")
        if self.predictor_id != PREDICTOR_GAP:
            raise ValueError(f"unknown predictor id {self.predictor_id}")


@njit(cache=True)
def quantize_index(e, tau):
    """Bin index m for residual e at bound tau."""
    step = 2 * tau + 1
    m = (abs(e) + tau) // step
    return -m if e < 0 else m


@njit(cache=True)
def clamp_pixel(v):
    if v < 0:
        return 0
    if v > 255:
        return 255
    return v


def quantize(e: int, tau: int) -> QuantizedResidual:
    """Quantize a residual; |e - reconstruction| <= tau always holds."""
    m = int(quantize_index(e, tau))
    return QuantizedResidual(m, m * (2 * tau + 1))


def reconstruct_pixel(prediction: int, e_hat: int) -> int:
    """Decoded pixel value clamp(prediction + e_hat, 0, 255).

    Clamping cannot break the error bound: the true pixel lies in
    [0, 255], so moving the sum back into range moves it toward the truth.
    """
    return int(clamp_pixel(prediction + e_hat))
