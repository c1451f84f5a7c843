"""Soft-decoding network: forward graph and the bounded restoration pipeline.

The graph is an encoder-decoder residual CNN: a 3x3 head over two input
channels (decoded luminance / 255 and a constant tau / 8 conditioning
plane), one stride-2 downsampling residual block, ``num_blocks`` dilated
residual blocks, one 2x upsampling residual block, a 3x3 tail back to one
channel, and a global skip adding the decoded image.  Whatever the
weights, the final band truncation confines every output pixel to
[y - tau, y + tau], which combined with the codec bound gives the 2*tau
worst-case guarantee against the original.
"""

import numpy as np

from .image import Image
from .quantizer import TAU_MAX
from .tensor import (
    ConvParams,
    conv2d,
    dilated_residual_block,
    downsampled_residual_block,
    relu,
    truncated_activation,
    upsampled_residual_block,
)
from .weights import ModelWeights


def _params(m: ModelWeights, prefix: str, stride: int = 1, dilation: int = 1) -> ConvParams:
    return ConvParams(
        weights=m.tensors[prefix + ".weight"],
        bias=m.tensors[prefix + ".bias"],
        stride=stride,
        dilation=dilation,
        padding="same",
    )


def _pad_to_even(y: np.ndarray):
    h, w = y.shape
    ph, pw = h % 2, w % 2
    if ph or pw:
        y = np.pad(y, ((0, ph), (0, pw)), mode="reflect")
    return y, (h, w)


def forward(y_img: Image, tau: int, m: ModelWeights) -> np.ndarray:
    """Pre-truncation network output in pixel units, same size as y_img.

    Odd-sized inputs are reflect-padded to even dims for the down/up pair
    and cropped back afterwards.
    """
    if not 0 <= tau <= TAU_MAX:
        raise ValueError(f"tau must be in [0, {TAU_MAX}], got {tau}")
    m.validate()
    if y_img.width == 0 or y_img.height == 0:
        raise ValueError("cannot soft-decode an empty image")
    if y_img.width < 2 or y_img.height < 2:
        raise ValueError("soft decoding needs at least a 2x2 image")
    y, orig_hw = _pad_to_even(y_img.pixels.astype(np.float32))

    x = np.stack([y / np.float32(255.0), np.full_like(y, np.float32(tau / 8.0))])
    dil = m.arch.dilation

    x = relu(conv2d(x, _params(m, "head")))
    x = downsampled_residual_block(
        x,
        _params(m, "down.conv1", stride=2),
        _params(m, "down.conv2"),
        _params(m, "down.skip", stride=2),
    )
    for i in range(m.arch.num_blocks):
        x = dilated_residual_block(
            x,
            _params(m, f"block{i}.conv1", dilation=dil),
            _params(m, f"block{i}.conv2", dilation=dil),
        )
    x = upsampled_residual_block(x, _params(m, "up.conv1"), _params(m, "up.conv2"))
    x = conv2d(x, _params(m, "tail"))[0]

    pred = y + np.float32(255.0) * x
    return pred[: orig_hw[0], : orig_hw[1]]


def truncate_to_band(x_pre: np.ndarray, y_img: Image, tau: int) -> Image:
    """Band-truncate, round half away from zero, re-clamp, and quantize.

    The re-clamp after rounding keeps integer outputs inside
    [y - tau, y + tau] even when rounding would step just past a band
    edge.
    """
    y = y_img.pixels
    t = truncated_activation(x_pre, y, tau).astype(np.float64)
    r = np.sign(t) * np.floor(np.abs(t) + 0.5)
    yf = y.astype(np.float64)
    r = np.clip(r, yf - tau, yf + tau)
    return Image(np.clip(r, 0.0, 255.0).astype(np.uint8))


def soft_decode(y_img: Image, tau: int, m: ModelWeights) -> Image:
    """Restore a hard-decoded image; every pixel stays within tau of it."""
    return truncate_to_band(forward(y_img, tau, m), y_img, tau)
