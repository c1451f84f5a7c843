"""Deterministic inference-time tensor ops: dilated/strided convolution,
nearest-neighbor upsampling, residual blocks, and the band-truncation
activation.

Tensors are plain float32 numpy arrays of shape (channels, height, width).
Convolutions accumulate in float64 with a fixed per-output reduction order
(input channel outer, then kernel rows, then kernel columns), so repeated
evaluation is bit-identical.  The numba kernel and the vectorized numpy
fallback agree within float64 rounding of the same sums.
"""

from dataclasses import dataclass

import numpy as np

from .backend import NUMBA_ENABLED, njit


@dataclass(frozen=True)
class ConvParams:
    """Convolution weights [out_c, in_c, kh, kw], bias [out_c], geometry.

    padding "same" pads by dilation*(k-1)//2 per side (odd kernels only);
    an integer or (pad_h, pad_w) pair gives explicit zero padding.
    """

    weights: np.ndarray
    bias: np.ndarray
    stride: int = 1
    dilation: int = 1
    padding: object = "same"

    def __post_init__(self):
        w, b = self.weights, self.bias
        if w.ndim != 4:
            raise ValueError("weights must have shape [out_c, in_c, kh, kw]")
        if b.shape != (w.shape[0],):
            raise ValueError("bias length must equal out_c")
        if self.stride < 1 or self.dilation < 1:
            raise ValueError("stride and dilation must be >= 1")
        if self.padding == "same" and (w.shape[2] % 2 == 0 or w.shape[3] % 2 == 0):
            raise ValueError("same padding requires odd kernel sizes")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("weights and bias must be finite")

    def pad_hw(self):
        if self.padding == "same":
            return (
                self.dilation * (self.weights.shape[2] - 1) // 2,
                self.dilation * (self.weights.shape[3] - 1) // 2,
            )
        if isinstance(self.padding, int):
            return self.padding, self.padding
        ph, pw = self.padding
        return int(ph), int(pw)


def conv_out_size(size: int, k: int, stride: int, dilation: int, pad: int) -> int:
    return (size + 2 * pad - dilation * (k - 1) - 1) // stride + 1


@njit(cache=True)
def _conv2d_loops(x, w, b, stride, dilation, ph, pw, out):
    # Weight-stationary loop nest: every output element still accumulates
    # its terms in the fixed (in-channel, ky, kx) order, so results are
    # bit-identical to the naive per-output ordering, but the inner span
    # is contiguous and branch-free.  np.float64() is a real cast under
    # numba (float() is not); accumulation stays in double precision.
    in_c, h, wid = x.shape
    out_c, _, kh, kw = w.shape
    _, oh, ow = out.shape
    acc = np.empty((oh, ow), np.float64)
    for o in range(out_c):
        acc[:, :] = np.float64(b[o])
        for i in range(in_c):
            for ky in range(kh):
                ybase = ky * dilation - ph
                oy_lo = max(0, (-ybase + stride - 1) // stride)
                oy_hi = min(oh - 1, (h - 1 - ybase) // stride)
                for kx in range(kw):
                    wv = np.float64(w[o, i, ky, kx])
                    xbase = kx * dilation - pw
                    ox_lo = max(0, (-xbase + stride - 1) // stride)
                    ox_hi = min(ow - 1, (wid - 1 - xbase) // stride)
                    for oy in range(oy_lo, oy_hi + 1):
                        iy = oy * stride + ybase
                        for ox in range(ox_lo, ox_hi + 1):
                            acc[oy, ox] += wv * np.float64(x[i, iy, ox * stride + xbase])
        for oy in range(oh):
            for ox in range(ow):
                out[o, oy, ox] = np.float32(acc[oy, ox])


def _conv2d_numpy(x, w, b, stride, dilation, ph, pw, oh, ow):
    in_c, h, wid = x.shape
    out_c, _, kh, kw = w.shape
    xp = np.zeros((in_c, h + 2 * ph, wid + 2 * pw), np.float64)
    xp[:, ph : ph + h, pw : pw + wid] = x
    w64 = w.astype(np.float64)
    acc = np.broadcast_to(b.astype(np.float64)[:, None, None], (out_c, oh, ow)).copy()
    for ky in range(kh):
        for kx in range(kw):
            ys = ky * dilation
            xs = kx * dilation
            patch = xp[:, ys : ys + (oh - 1) * stride + 1 : stride,
                       xs : xs + (ow - 1) * stride + 1 : stride]
            acc += np.einsum("oi,ihw->ohw", w64[:, :, ky, kx], patch)
    return acc.astype(np.float32)


def conv2d(x: np.ndarray, p: ConvParams) -> np.ndarray:
    """2-D convolution (cross-correlation) with zero padding."""
    if x.ndim != 3 or x.shape[0] != p.weights.shape[1]:
        raise ValueError(
            f"input channels {x.shape} do not match weights {p.weights.shape}"
        )
    x = np.ascontiguousarray(x, dtype=np.float32)
    ph, pw = p.pad_hw()
    oh = conv_out_size(x.shape[1], p.weights.shape[2], p.stride, p.dilation, ph)
    ow = conv_out_size(x.shape[2], p.weights.shape[3], p.stride, p.dilation, pw)
    if oh <= 0 or ow <= 0:
        raise ValueError("kernel does not fit the padded input")
    if NUMBA_ENABLED:
        out = np.empty((p.weights.shape[0], oh, ow), np.float32)
        _conv2d_loops(
            x,
            np.ascontiguousarray(p.weights, dtype=np.float32),
            np.ascontiguousarray(p.bias, dtype=np.float32),
            p.stride,
            p.dilation,
            ph,
            pw,
            out,
        )
        return out
    return _conv2d_numpy(
        x, np.asarray(p.weights, np.float32), np.asarray(p.bias, np.float32),
        p.stride, p.dilation, ph, pw, oh, ow,
    )


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, np.float32(0.0))


def upsample2x(x: np.ndarray) -> np.ndarray:
    """Nearest-neighbor 2x spatial replication."""
    return np.repeat(np.repeat(x, 2, axis=1), 2, axis=2)


def dilated_residual_block(x: np.ndarray, p1: ConvParams, p2: ConvParams) -> np.ndarray:
    """x + conv(relu(conv(x))); both convs 3x3, stride 1, dilated."""
    y = conv2d(relu(conv2d(x, p1)), p2)
    if y.shape != x.shape:
        raise ValueError(f"residual branch shape {y.shape} != input {x.shape}")
    return x + y


def downsampled_residual_block(
    x: np.ndarray, p1: ConvParams, p2: ConvParams, skip: ConvParams
) -> np.ndarray:
    """Stride-2 residual block: conv(relu(conv_s2(x))) + conv1x1_s2(x)."""
    return conv2d(relu(conv2d(x, p1)), p2) + conv2d(x, skip)


def upsampled_residual_block(x: np.ndarray, p1: ConvParams, p2: ConvParams) -> np.ndarray:
    """2x upsampling residual block: u = up2x(x); u + conv(relu(conv(u)))."""
    u = upsample2x(x)
    return u + conv2d(relu(conv2d(u, p1)), p2)


def _check_band_shapes(x_pre: np.ndarray, y: np.ndarray):
    if x_pre.ndim == 3:
        if x_pre.shape[0] != 1 or x_pre.shape[1:] != y.shape:
            raise ValueError(f"shape mismatch: {x_pre.shape} vs image {y.shape}")
    elif x_pre.shape != y.shape:
        raise ValueError(f"shape mismatch: {x_pre.shape} vs image {y.shape}")


def truncated_activation(x_pre: np.ndarray, y: np.ndarray, tau: int) -> np.ndarray:
    """Clip each pixel of x_pre (pixel units) into [y - tau, y + tau].

    y is the hard-decoded uint8 plane; the output therefore can never
    stray more than tau from it, whatever produced x_pre.
    """
    _check_band_shapes(x_pre, y)
    yf = y.astype(np.float32)
    return np.clip(x_pre, yf - np.float32(tau), yf + np.float32(tau))


def truncated_activation_grad(x_pre: np.ndarray, y: np.ndarray, tau: int) -> np.ndarray:
    """Derivative mask of the truncation: 1 inside the band, 0 outside."""
    _check_band_shapes(x_pre, y)
    yf = y.astype(np.float32)
    inside = (x_pre >= yf - tau) & (x_pre <= yf + tau)
    return inside.astype(np.float32)
