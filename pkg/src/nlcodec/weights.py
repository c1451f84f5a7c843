"""Portable model weights: architecture header plus ordered named tensors.

File format (.lsdw, little-endian): magic "LSDW", version byte 1, the
architecture triple (num_blocks, base_channels, dilation) as three u16,
tensor count as u32, then per tensor {name-length byte, ASCII name, rank
byte, dims as u32 each, float32 values}, and a trailing CRC-32 of all
tensor value bytes in file order.
"""

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"LSDW"
VERSION = 1


class WeightsError(ValueError):
    """Malformed weight file or architecture mismatch."""


@dataclass(frozen=True)
class Arch:
    num_blocks: int = 8
    base_channels: int = 64
    dilation: int = 2

    def __post_init__(self):
        if self.num_blocks < 1 or self.base_channels < 1 or self.dilation < 1:
            raise WeightsError(f"invalid architecture {self}")


def expected_tensors(arch: Arch):
    """Ordered (name, shape) pairs the architecture implies."""
    c = arch.base_channels
    spec = [
        ("head.weight", (c, 2, 3, 3)),
        ("head.bias", (c,)),
        ("down.conv1.weight", (c, c, 3, 3)),
        ("down.conv1.bias", (c,)),
        ("down.conv2.weight", (c, c, 3, 3)),
        ("down.conv2.bias", (c,)),
        ("down.skip.weight", (c, c, 1, 1)),
        ("down.skip.bias", (c,)),
    ]
    for i in range(arch.num_blocks):
        spec += [
            (f"block{i}.conv1.weight", (c, c, 3, 3)),
            (f"block{i}.conv1.bias", (c,)),
            (f"block{i}.conv2.weight", (c, c, 3, 3)),
            (f"block{i}.conv2.bias", (c,)),
        ]
    spec += [
        ("up.conv1.weight", (c, c, 3, 3)),
        ("up.conv1.bias", (c,)),
        ("up.conv2.weight", (c, c, 3, 3)),
        ("up.conv2.bias", (c,)),
        ("tail.weight", (1, c, 3, 3)),
        ("tail.bias", (1,)),
    ]
    return spec


@dataclass
class ModelWeights:
    arch: Arch = field(default_factory=Arch)
    tensors: dict = field(default_factory=dict)  # name -> float32 ndarray, ordered

    def validate(self):
        spec = expected_tensors(self.arch)
        names = list(self.tensors)
        if names != [n for n, _ in spec]:
            raise WeightsError(
                f"tensor set does not match architecture {self.arch}: "
                f"expected {len(spec)} tensors, found {len(names)}"
            )
        for name, shape in spec:
            t = self.tensors[name]
            if tuple(t.shape) != shape:
                raise WeightsError(f"tensor {name} has shape {t.shape}, expected {shape}")
            if not np.all(np.isfinite(t)):
                raise WeightsError(f"tensor {name} contains non-finite values")
        return self


def zero_model(arch: Arch = Arch()) -> ModelWeights:
    """All-zero weights: the identity soft decoder."""
    tensors = {n: np.zeros(s, np.float32) for n, s in expected_tensors(arch)}
    return ModelWeights(arch, tensors).validate()


def random_model(arch: Arch = Arch(), seed: int = 0, scale: float = 0.1) -> ModelWeights:
    """Gaussian random weights, for guarantee tests that must ignore quality."""
    rng = np.random.default_rng(seed)
    tensors = {
        n: rng.normal(0.0, scale, s).astype(np.float32) for n, s in expected_tensors(arch)
    }
    return ModelWeights(arch, tensors).validate()


def save_weights(m: ModelWeights) -> bytes:
    """Serialize to the .lsdw byte format; load_weights inverts exactly."""
    m.validate()
    out = bytearray()
    out += MAGIC
    out += struct.pack("<B", VERSION)
    out += struct.pack("<HHH", m.arch.num_blocks, m.arch.base_channels, m.arch.dilation)
    out += struct.pack("<I", len(m.tensors))
    crc = 0
    for name, t in m.tensors.items():
        encoded = name.encode("ascii")
        out += struct.pack("<B", len(encoded))
        out += encoded
        out += struct.pack("<B", t.ndim)
        for d in t.shape:
            out += struct.pack("<I", d)
        payload = np.ascontiguousarray(t, dtype="<f4").tobytes()
        out += payload
        crc = zlib.crc32(payload, crc)
    out += struct.pack("<I", crc & 0xFFFFFFFF)
    return bytes(out)


def load_weights(data: bytes) -> ModelWeights:
    """Parse and validate a .lsdw byte sequence."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise WeightsError("bad magic: not an LSDW weight file")
    pos = 4
    try:
        (version,) = struct.unpack_from("<B", data, pos)
        pos += 1
        if version != VERSION:
            raise WeightsError(f"unsupported version {version}")
        nb, bc, dil = struct.unpack_from("<HHH", data, pos)
        pos += 6
        arch = Arch(nb, bc, dil)
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        tensors = {}
        crc = 0
        for _ in range(count):
            (nlen,) = struct.unpack_from("<B", data, pos)
            pos += 1
            name = data[pos : pos + nlen].decode("ascii")
            pos += nlen
            (rank,) = struct.unpack_from("<B", data, pos)
            pos += 1
            dims = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
            n = int(np.prod(dims)) if rank else 1
            payload = data[pos : pos + 4 * n]
            if len(payload) < 4 * n:
                raise WeightsError("truncated tensor payload")
            pos += 4 * n
            tensors[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
            crc = zlib.crc32(payload, crc)
        (stored_crc,) = struct.unpack_from("<I", data, pos)
        pos += 4
    except struct.error as exc:
        raise WeightsError(f"truncated weight file: {exc}") from None
    if pos != len(data):
        raise WeightsError("trailing bytes after checksum")
    if stored_crc != (crc & 0xFFFFFFFF):
        raise WeightsError(
            f"checksum failure: stored {stored_crc:#010x}, computed {crc & 0xFFFFFFFF:#010x}"
        )
    return ModelWeights(arch, tensors).validate()
