"""End-to-end near-lossless encoder and decoder.

Encoding walks the image in raster order: gather the causal window from
the *reconstructed* plane, predict, quantize the residual, reconstruct,
and feed the reconstruction into later windows.  The decoder replays the
identical prediction/reconstruction path, so the two stay in lockstep and
every decoded pixel lands within tau of its original.
"""

from dataclasses import dataclass

import numpy as np

from .backend import njit
from .entropy import (
    HEADER_LEN,
    INIT_A,
    INIT_N,
    NUM_CONTEXTS,
    RESET_N,
    BitstreamError,
    BitstreamHeader,
    check_padding,
    context_id,
    encode_plane,
    pack_header,
    parse_header,
    read_codeword,
    rice_k,
)
from .image import Image, linf_error
from .predictor import gap_gradients, gap_predict, window_values
from .quantizer import CodecConfig, quantize_index


@dataclass(frozen=True)
class EncodeResult:
    bitstream: bytes
    bpp: float
    achieved_linf: int


@njit(cache=True)
def _encode_pass(x, tau):
    """Raster prediction/quantization pass.

    Returns (indices, contexts, recon); recon is the decoder-identical
    reconstruction the predictor was fed.
    """
    h, w = x.shape
    recon = np.zeros((h, w), np.uint8)
    indices = np.zeros((h, w), np.int32)
    contexts = np.zeros((h, w), np.uint8)
    step = 2 * tau + 1
    for r in range(h):
        for c in range(w):
            wv, ww, n, nn, ne, nw, nne = window_values(recon, r, c)
            dh, dv = gap_gradients(wv, ww, n, nn, ne, nw, nne)
            contexts[r, c] = context_id(dh, dv)
            pred = gap_predict(wv, ww, n, nn, ne, nw, nne)
            e = int(x[r, c]) - pred
            m = quantize_index(e, tau)
            indices[r, c] = m
            y = pred + m * step
            if y < 0:
                y = 0
            elif y > 255:
                y = 255
            recon[r, c] = y
    return indices, contexts, recon


@njit(cache=True)
def _decode_pass(payload, width, height, tau):
    """Fused entropy-decode + reconstruction pass.

    Returns (recon, status, bit position); status 0 on success, -1 on a
    truncated payload, -2 on a symbol no legal residual can produce.
    """
    recon = np.zeros((height, width), np.uint8)
    acc = np.full(NUM_CONTEXTS, INIT_A, np.int64)
    cnt = np.full(NUM_CONTEXTS, INIT_N, np.int64)
    nbits = payload.shape[0] * 8
    pos = 0
    step = 2 * tau + 1
    max_m = (255 + tau) // step
    for r in range(height):
        for c in range(width):
            wv, ww, n, nn, ne, nw, nne = window_values(recon, r, c)
            dh, dv = gap_gradients(wv, ww, n, nn, ne, nw, nne)
            cid = context_id(dh, dv)
            k = rice_k(acc[cid], cnt[cid])
            u, pos = read_codeword(payload, pos, nbits, k)
            if pos < 0:
                return recon, -1, 0
            m = u // 2 if u % 2 == 0 else -(u + 1) // 2
            if m > max_m or m < -max_m:
                return recon, -2, pos
            pred = gap_predict(wv, ww, n, nn, ne, nw, nne)
            y = pred + m * step
            if y < 0:
                y = 0
            elif y > 255:
                y = 255
            recon[r, c] = y
            acc[cid] += u
            cnt[cid] += 1
            if cnt[cid] == RESET_N:
                acc[cid] = (acc[cid] + 1) >> 1
                cnt[cid] = RESET_N >> 1
    return recon, 0, pos


def encode_image(img: Image, cfg: CodecConfig) -> EncodeResult:
    """Compress an image under the per-pixel bound cfg.tau."""
    h, w = img.pixels.shape
    if w == 0 or h == 0:
        header = pack_header(BitstreamHeader(w, h, cfg.tau, cfg.predictor_id))
        return EncodeResult(header, 0.0, 0)
    indices, contexts, recon = _encode_pass(img.pixels, cfg.tau)
    stream = encode_plane(indices, contexts, cfg.tau, cfg.predictor_id)
    achieved = linf_error(img, Image(recon))
    if achieved > cfg.tau:
        raise AssertionError(f"encoder bound violation: {achieved} > tau={cfg.tau}")
    return EncodeResult(stream, len(stream) * 8 / (w * h), achieved)


def decode_image(data: bytes) -> Image:
    """Reconstruct the hard-decoded image from an .nlc stream."""
    header = parse_header(data)
    payload = data[HEADER_LEN:]
    if header.width * header.height == 0:
        if payload:
            raise BitstreamError("payload longer than the decoded symbol count requires")
        return Image(np.zeros((header.height, header.width), np.uint8))
    buf = np.frombuffer(payload, dtype=np.uint8)
    recon, status, bits = _decode_pass(buf, header.width, header.height, header.tau)
    if status == -1:
        raise BitstreamError("truncated payload: ran out of bits mid-symbol")
    if status == -2:
        raise BitstreamError("invalid symbol: residual outside representable range")
    check_padding(payload, bits)
    return Image(recon)


def decode_header(data: bytes) -> BitstreamHeader:
    """Parse and validate only the container header."""
    return parse_header(data)
