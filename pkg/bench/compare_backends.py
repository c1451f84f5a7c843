"""Benchmark the numba kernels against the pure-numpy fallback.

Backend selection happens at import time via NLCODEC_NUMBA, so each
backend is timed in a fresh subprocess.  JIT compilation is excluded by
a warmup pass inside the worker.

Run: python bench/compare_backends.py [--size 512] [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys


def worker(size: int, repeats: int) -> dict:
    import time

    import numpy as np

    import nlcodec as nl

    rng = np.random.default_rng(0)
    base = rng.normal(128, 20, (size, size))
    base += np.cumsum(rng.normal(0, 1, (size, size)), axis=1)  # mild texture
    img = nl.Image(np.clip(base, 0, 255).astype(np.uint8))
    cfg = nl.CodecConfig(tau=2)
    model = nl.random_model(nl.Arch(8, 64, 2), seed=1, scale=0.05)

    # warmup: compile kernels / prime caches
    small = nl.Image(img.pixels[:16, :16].copy())
    stream = nl.encode_image(small, cfg).bitstream
    nl.soft_decode(nl.decode_image(stream), 2, model)

    def best(fn):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    result = {"backend": nl.backend_name()}
    encoded = nl.encode_image(img, cfg)
    result["encode_s"] = best(lambda: nl.encode_image(img, cfg))
    result["decode_s"] = best(lambda: nl.decode_image(encoded.bitstream))
    y = nl.decode_image(encoded.bitstream)
    sd_img = nl.Image(img.pixels[: size // 4, : size // 4].copy())
    sd_stream = nl.encode_image(sd_img, cfg).bitstream
    sd_y = nl.decode_image(sd_stream)
    result["soft_decode_s"] = best(lambda: nl.soft_decode(sd_y, 2, model))
    result["bpp"] = encoded.bpp
    result["soft_size"] = sd_y.pixels.shape
    return result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=512, help="codec image side (default 512)")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best-of (default 5)")
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        print(json.dumps(worker(args.size, args.repeats)))
        return

    results = {}
    for flag, label in (("1", "numba"), ("0", "numpy")):
        env = dict(os.environ, NLCODEC_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker", "--size", str(args.size),
             "--repeats", str(args.repeats)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])

    nb, py = results["numba"], results["numpy"]
    size = args.size
    print(f"image {size}x{size}, tau=2, default 8-block/64-channel model on "
          f"{py['soft_size'][0]}x{py['soft_size'][1]} crop ({nb['bpp']:.2f} bpp)")
    print(f"{'kernel':<14}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for key, label in (("encode_s", "encode"), ("decode_s", "decode"),
                       ("soft_decode_s", "soft-decode")):
        ratio = py[key] / nb[key] if nb[key] > 0 else float("inf")
        print(f"{label:<14}{nb[key]:>12.4f}{py[key]:>12.4f}{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
