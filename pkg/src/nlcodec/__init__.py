"""Near-lossless image compression with a hard per-pixel error bound.

Encoder/decoder pair built on causal gradient-adjusted prediction and
uniform residual quantization (every decoded pixel within tau of the
original), plus a CNN soft-decoding runtime whose band-truncated output
is guaranteed within 2*tau of the original in the worst case.
"""

from .backend import NUMBA_ENABLED, backend_name
from .codec import EncodeResult, decode_image, encode_image
from .image import INFINITE, Image, PgmError, linf_error, psnr, read_pgm, write_pgm
from .losses import joint_loss, l2_loss, quasi_linf_grad, quasi_linf_loss, truncated_l2_loss
from .quantizer import CodecConfig, QuantizedResidual, quantize, reconstruct_pixel
from .sdnet import forward, soft_decode
from .weights import Arch, ModelWeights, load_weights, random_model, save_weights, zero_model

__version__ = "0.1.0"

__all__ = [
    "Arch",
    "CodecConfig",
    "EncodeResult",
    "INFINITE",
    "Image",
    "ModelWeights",
    "NUMBA_ENABLED",
    "PgmError",
    "QuantizedResidual",
    "backend_name",
    "decode_image",
    "encode_image",
    "forward",
    "joint_loss",
    "l2_loss",
    "linf_error",
    "load_weights",
    "psnr",
    "quantize",
    "quasi_linf_grad",
    "quasi_linf_loss",
    "random_model",
    "read_pgm",
    "reconstruct_pixel",
    "save_weights",
    "soft_decode",
    "truncated_l2_loss",
    "write_pgm",
    "zero_model",
]
