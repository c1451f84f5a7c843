"""Context-adaptive Rice coding of quantizer indices and the .nlc container.

Signed indices are zigzag-mapped to unsigned symbols and Rice-coded with a
per-context parameter k adapted from running magnitude statistics, JPEG-LS
style.  Four contexts bucket the predictor's local activity (dh + dv).
The bit order (MSB-first within each byte) and the byte order of all
header fields are fixed, so streams decode identically on any platform.

Container layout (.nlc): magic "NLC1", version byte 1, width and height as
32-bit little-endian, tau byte, predictor-id byte, then the bit-packed
payload zero-padded to a byte boundary.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .backend import njit
from .predictor import CausalWindow, gradients
from .quantizer import TAU_MAX

MAGIC = b"NLC1"
VERSION = 1
HEADER_LEN = 15

NUM_CONTEXTS = 4
INIT_A = 4
INIT_N = 1
RESET_N = 64
ESCAPE_Q = 24  # unary quotients >= this switch to a 32-bit escape field
K_CAP = 24


class BitstreamError(ValueError):
    """Corrupt, truncated, or unsupported compressed data."""


@dataclass(frozen=True)
class BitstreamHeader:
    width: int
    height: int
    tau: int
    predictor_id: int


@dataclass
class RiceContext:
    """Adaptive Rice state for one context bucket: magnitude sum and count."""

    acc: int = INIT_A
    count: int = INIT_N

    def update(self, u: int):
        self.acc += u
        self.count += 1
        if self.count == RESET_N:
            self.acc = (self.acc + 1) // 2
            self.count = RESET_N // 2


def zigzag(m: int) -> int:
    """Interleave signed integers into unsigned: 0,-1,1,-2,2 -> 0,1,2,3,4."""
    return 2 * m if m >= 0 else -2 * m - 1


def unzigzag(u: int) -> int:
    return u // 2 if u % 2 == 0 else -(u + 1) // 2


def zigzag_array(m: np.ndarray) -> np.ndarray:
    m = m.astype(np.int64)
    return np.where(m >= 0, 2 * m, -2 * m - 1)


def unzigzag_array(u: np.ndarray) -> np.ndarray:
    u = u.astype(np.int64)
    return np.where(u % 2 == 0, u // 2, -(u + 1) // 2)


@njit(cache=True)
def rice_k(acc, count):
    """Smallest k >= 0 with count * 2**k >= acc, capped at K_CAP."""
    k = 0
    while (count << k) < acc and k < 24:
        k += 1
    return k


@njit(cache=True)
def context_id(dh, dv):
    """Activity bucket for gradients: [0,4] [5,16] [17,64] [65,inf)."""
    act = dh + dv
    if act <= 4:
        return 0
    if act <= 16:
        return 1
    if act <= 64:
        return 2
    return 3


def adapt_k(ctx: RiceContext) -> int:
    """Rice parameter implied by a context's current statistics."""
    return int(rice_k(ctx.acc, ctx.count))


def select_context(win: CausalWindow) -> int:
    """Context id in {0..3} from a causal window's activity."""
    dh, dv = gradients(win)
    return int(context_id(dh, dv))


def rice_encode(u: int, k: int) -> str:
    """Rice codeword for unsigned u as a bit string (test/reference form).

    Quotient u >> k in unary (zeros, then a one) followed by the k low
    bits, or the 24-zeros escape followed by u as 32 bits.
    """
    if u < 0 or k < 0 or k > K_CAP:
        raise ValueError("u must be >= 0 and 0 <= k <= 24")
    q = u >> k
    if q < ESCAPE_Q:
        rem = format(u & ((1 << k) - 1), f"0{k}b") if k else ""
        return "0" * q + "1" + rem
    return "0" * ESCAPE_Q + format(u, "032b")


def rice_decode(bits: str, k: int):
    """Inverse of rice_encode: returns (u, bits_consumed)."""
    q = 0
    pos = 0
    while q < ESCAPE_Q:
        if pos >= len(bits):
            raise BitstreamError("truncated codeword: unary prefix")
        b = bits[pos]
        pos += 1
        if b == "1":
            break
        q += 1
    if q == ESCAPE_Q:
        if pos + 32 > len(bits):
            raise BitstreamError("truncated codeword: escape field")
        return int(bits[pos : pos + 32], 2), pos + 32
    if pos + k > len(bits):
        raise BitstreamError("truncated codeword: remainder")
    r = int(bits[pos : pos + k], 2) if k else 0
    return (q << k) | r, pos + k


@njit(cache=True)
def pack_symbols(symbols, contexts, out):
    """Rice-code unsigned symbols into the zeroed byte buffer ``out``.

    Each symbol is coded with the k implied by its context's state before
    that state is updated.  Returns the bit length used, or -1 on buffer
    overflow (the caller sizes out generously, so -1 signals a bug).
    """
    acc = np.full(NUM_CONTEXTS, INIT_A, np.int64)
    cnt = np.full(NUM_CONTEXTS, INIT_N, np.int64)
    cap = out.shape[0] * 8
    pos = 0
    for i in range(symbols.shape[0]):
        u = symbols[i]
        c = contexts[i]
        k = rice_k(acc[c], cnt[c])
        q = u >> k
        if q < ESCAPE_Q:
            if pos + q + 1 + k > cap:
                return -1
            pos += q
            out[pos >> 3] |= 1 << (7 - (pos & 7))
            pos += 1
            for j in range(k - 1, -1, -1):
                if (u >> j) & 1:
                    out[pos >> 3] |= 1 << (7 - (pos & 7))
                pos += 1
        else:
            if pos + ESCAPE_Q + 32 > cap:
                return -1
            pos += ESCAPE_Q
            for j in range(31, -1, -1):
                if (u >> j) & 1:
                    out[pos >> 3] |= 1 << (7 - (pos & 7))
                pos += 1
        acc[c] += u
        cnt[c] += 1
        if cnt[c] == RESET_N:
            acc[c] = (acc[c] + 1) >> 1
            cnt[c] = RESET_N >> 1
    return pos


@njit(cache=True)
def read_codeword(data, pos, nbits, k):
    """Read one Rice(k) codeword starting at bit ``pos``.

    Returns (u, next bit position), or (0, -1) if the payload runs out
    mid-codeword.
    """
    q = 0
    hit_one = False
    while q < ESCAPE_Q:
        if pos >= nbits:
            return 0, -1
        # int() keeps the accumulators int64 under numpy-2 promotion rules
        bit = int(data[pos >> 3] >> (7 - (pos & 7))) & 1
        pos += 1
        if bit:
            hit_one = True
            break
        q += 1
    if not hit_one:
        if pos + 32 > nbits:
            return 0, -1
        u = 0
        for _ in range(32):
            u = (u << 1) | (int(data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
        return u, pos
    if pos + k > nbits:
        return 0, -1
    r = 0
    for _ in range(k):
        r = (r << 1) | (int(data[pos >> 3] >> (7 - (pos & 7))) & 1)
        pos += 1
    return (q << k) | r, pos


@njit(cache=True)
def unpack_symbols(data, contexts, out):
    """Decode len(out) symbols from a packed payload, given their contexts.

    Returns the final bit position, or -1 if the payload runs out
    mid-symbol.
    """
    acc = np.full(NUM_CONTEXTS, INIT_A, np.int64)
    cnt = np.full(NUM_CONTEXTS, INIT_N, np.int64)
    nbits = data.shape[0] * 8
    pos = 0
    for i in range(out.shape[0]):
        c = contexts[i]
        k = rice_k(acc[c], cnt[c])
        u, pos = read_codeword(data, pos, nbits, k)
        if pos < 0:
            return -1
        out[i] = u
        acc[c] += u
        cnt[c] += 1
        if cnt[c] == RESET_N:
            acc[c] = (acc[c] + 1) >> 1
            cnt[c] = RESET_N >> 1
    return pos


def pack_header(h: BitstreamHeader) -> bytes:
    return MAGIC + struct.pack("<BIIBB", VERSION, h.width, h.height, h.tau, h.predictor_id)


def parse_header(data: bytes) -> BitstreamHeader:
    if len(data) < HEADER_LEN:
        raise BitstreamError(f"stream shorter than header ({len(data)} < {HEADER_LEN} bytes)")
    if data[:4] != MAGIC:
        raise BitstreamError("bad magic: not an NLC1 stream")
    version, width, height, tau, predictor_id = struct.unpack("<BIIBB", data[4:HEADER_LEN])
    if version != VERSION:
        raise BitstreamError(f"unsupported version {version}")
    if tau > TAU_MAX:
        raise BitstreamError(f"tau {tau} out of range [0, {TAU_MAX}]")
    if predictor_id != 0:
        raise BitstreamError(f"unknown predictor id {predictor_id}")
    return BitstreamHeader(width, height, tau, predictor_id)


def check_padding(payload: bytes, bits_used: int):
    """Require < 8 unread bits after the last symbol, all of them zero."""
    total = len(payload) * 8
    if total - bits_used >= 8:
        raise BitstreamError("payload longer than the decoded symbol count requires")
    if bits_used < total:
        last = payload[-1]
        rem = total - bits_used
        if last & ((1 << rem) - 1):
            raise BitstreamError("nonzero padding bits after final symbol")


def encode_plane(indices: np.ndarray, contexts: np.ndarray, tau: int, predictor_id: int = 0) -> bytes:
    """Full .nlc container for a plane of quantizer indices.

    ``indices`` and ``contexts`` are (height, width) arrays aligned
    pixel-for-pixel; contexts condition the Rice parameter adaptation.
    """
    if indices.shape != contexts.shape:
        raise ValueError("indices and contexts must have identical shapes")
    height, width = indices.shape
    header = pack_header(BitstreamHeader(width, height, tau, predictor_id))
    n = indices.size
    if n == 0:
        return header
    symbols = zigzag_array(indices.ravel())
    ctx = np.ascontiguousarray(contexts.ravel(), dtype=np.uint8)
    out = np.zeros(n * 8 + 16, dtype=np.uint8)
    bits = int(pack_symbols(symbols, ctx, out))
    if bits < 0:
        raise AssertionError("rice packing overflow")
    return header + out[: (bits + 7) // 8].tobytes()


def decode_plane(data: bytes, contexts: np.ndarray | None = None):
    """Inverse of encode_plane: returns (header, index plane).

    ``contexts`` must be the same per-pixel context ids used when
    encoding; omitted means all-zero contexts (as encode_plane's tests
    use).  The real codec recomputes contexts causally during its fused
    decode instead of calling this.
    """
    header = parse_header(data)
    n = header.width * header.height
    indices = np.zeros(n, dtype=np.int64)
    payload = data[HEADER_LEN:]
    if n == 0:
        if payload:
            raise BitstreamError("payload longer than the decoded symbol count requires")
        return header, indices.reshape(header.height, header.width).astype(np.int32)
    if contexts is None:
        ctx = np.zeros(n, dtype=np.uint8)
    else:
        if contexts.size != n:
            raise ValueError("contexts size must equal width*height")
        ctx = np.ascontiguousarray(contexts.ravel(), dtype=np.uint8)
    buf = np.frombuffer(payload, dtype=np.uint8)
    bits = int(unpack_symbols(buf, ctx, indices))
    if bits < 0:
        raise BitstreamError("truncated payload: ran out of bits mid-symbol")
    check_padding(payload, bits)
    plane = unzigzag_array(indices).astype(np.int32)
    return header, plane.reshape(header.height, header.width)
