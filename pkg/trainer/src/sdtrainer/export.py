"""Weight export to the runtime's .lsdw container.

The byte layout is the cross-component contract: magic "LSDW", version 1,
arch triple as u16 LE, tensor count u32, per-tensor records {name-length,
ASCII name, rank, u32 dims, float32 LE values}, trailing CRC-32 of all
value bytes.  Tensor order follows the architecture definition.
"""

import struct
import zlib

import numpy as np

MAGIC = b"LSDW"
VERSION = 1


def tensor_order(num_blocks):
    names = ["head", "down.conv1", "down.conv2", "down.skip"]
    names += [f"block{i}.conv{j}" for i in range(num_blocks) for j in (1, 2)]
    names += ["up.conv1", "up.conv2", "tail"]
    return [n + suffix for n in names for suffix in (".weight", ".bias")]


def collect_tensors(model) -> dict:
    """Ordered name -> float32 array mapping from an SDNet instance.

    The runtime multiplies the tail output by 255 (it works on a 0..1
    residual convention) while the trainer's tail predicts pixel units,
    so the tail parameters are divided by 255 here; the composed
    function is identical.
    """
    mods = {
        "head": model.head,
        "down.conv1": model.down_conv1,
        "down.conv2": model.down_conv2,
        "down.skip": model.down_skip,
        "up.conv1": model.up_conv1,
        "up.conv2": model.up_conv2,
        "tail": model.tail,
    }
    for i, block in enumerate(model.blocks):
        mods[f"block{i}.conv1"] = block.conv1
        mods[f"block{i}.conv2"] = block.conv2
    out = {}
    for name in tensor_order(model.num_blocks):
        prefix, kind = name.rsplit(".", 1)
        tensor = getattr(mods[prefix], kind).detach().cpu().numpy()
        if prefix == "tail":
            tensor = tensor / 255.0
        out[name] = np.ascontiguousarray(tensor, dtype=np.float32)
    return out


def export_weights(model) -> bytes:
    """Serialize a trained SDNet for the inference runtime."""
    tensors = collect_tensors(model)
    out = bytearray()
    out += MAGIC
    out += struct.pack("<B", VERSION)
    out += struct.pack("<HHH", model.num_blocks, model.base_channels, model.dilation)
    out += struct.pack("<I", len(tensors))
    crc = 0
    for name, tensor in tensors.items():
        encoded = name.encode("ascii")
        out += struct.pack("<B", len(encoded))
        out += encoded
        out += struct.pack("<B", tensor.ndim)
        for d in tensor.shape:
            out += struct.pack("<I", d)
        payload = tensor.astype("<f4").tobytes()
        out += payload
        crc = zlib.crc32(payload, crc)
    out += struct.pack("<I", crc & 0xFFFFFFFF)
    return bytes(out)


def read_lsdw(data: bytes):
    """Minimal parser for round-trip unit tests: (arch triple, tensors)."""
    if data[:4] != MAGIC or data[4] != VERSION:
        raise ValueError("not an LSDW v1 file")
    arch = struct.unpack_from("<HHH", data, 5)
    (count,) = struct.unpack_from("<I", data, 11)
    pos = 15
    tensors = {}
    crc = 0
    for _ in range(count):
        nlen = data[pos]
        pos += 1
        name = data[pos : pos + nlen].decode("ascii")
        pos += nlen
        rank = data[pos]
        pos += 1
        dims = struct.unpack_from(f"<{rank}I", data, pos)
        pos += 4 * rank
        n = int(np.prod(dims))
        payload = data[pos : pos + 4 * n]
        pos += 4 * n
        crc = zlib.crc32(payload, crc)
        tensors[name] = np.frombuffer(payload, "<f4").reshape(dims).copy()
    (stored,) = struct.unpack_from("<I", data, pos)
    if stored != (crc & 0xFFFFFFFF):
        raise ValueError("checksum mismatch")
    return arch, tensors
