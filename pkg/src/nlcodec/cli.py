"""Command-line surface of the toolkit.

Subcommands: encode, decode, soft-decode, metrics, verify, sweep.
Exit codes: 0 success, 2 usage error, 3 I/O or format error, 4 bound
violation (verify).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .codec import decode_image, encode_image
from .entropy import BitstreamError
from .image import PgmError, format_psnr, linf_error, psnr, read_pgm, write_pgm
from .quantizer import TAU_MAX, CodecConfig
from .sdnet import forward, truncate_to_band
from .weights import WeightsError, load_weights

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_BOUND = 4


def _tau(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau must be an integer, got {text!r}")
    if not 0 <= v <= TAU_MAX:
        raise argparse.ArgumentTypeError(f"tau must be in [0, {TAU_MAX}], got {v}")
    return v


def _read_image(path: str):
    return read_pgm(Path(path).read_bytes())


def _cmd_encode(args) -> int:
    img = _read_image(args.input)
    result = encode_image(img, CodecConfig(tau=args.tau))
    Path(args.output).write_bytes(result.bitstream)
    return EXIT_OK


def _cmd_decode(args) -> int:
    img = decode_image(Path(args.input).read_bytes())
    Path(args.output).write_bytes(write_pgm(img))
    return EXIT_OK


def _cmd_soft_decode(args) -> int:
    data = Path(args.input).read_bytes()
    y = decode_image(data)
    tau = data[13]  # header tau byte, already validated by decode_image
    model = load_weights(Path(args.weights).read_bytes())
    pre = forward(y, tau, model)
    if args.dump_forward:
        Path(args.dump_forward).write_bytes(pre.astype("<f4").tobytes())
    restored = truncate_to_band(pre, y, tau)
    Path(args.output).write_bytes(write_pgm(restored))
    return EXIT_OK


def _cmd_metrics(args) -> int:
    ref = _read_image(args.reference)
    test = _read_image(args.test)
    print(f"psnr={format_psnr(psnr(ref, test))} linf={linf_error(ref, test)}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    data = Path(args.input).read_bytes()
    ref = _read_image(args.reference)
    decoded = decode_image(data)
    tau = data[13]
    hard_err = linf_error(decoded, ref)
    if hard_err > tau:
        print(f"bound violated: hard-decode linf={hard_err} > tau={tau}", file=sys.stderr)
        return EXIT_BOUND
    if args.soft:
        model = load_weights(Path(args.soft).read_bytes())
        restored = truncate_to_band(forward(decoded, tau, model), decoded, tau)
        band_err = linf_error(restored, decoded)
        soft_err = linf_error(restored, ref)
        if band_err > tau or soft_err > 2 * tau:
            print(
                f"bound violated: soft-decode linf={soft_err} > 2*tau={2 * tau}"
                f" (band error {band_err})",
                file=sys.stderr,
            )
            return EXIT_BOUND
        print(f"ok: hard linf={hard_err} <= {tau}, soft linf={soft_err} <= {2 * tau}")
        return EXIT_OK
    print(f"ok: hard linf={hard_err} <= {tau}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.tau_min > args.tau_max:
        print("error: --tau-min exceeds --tau-max", file=sys.stderr)
        return EXIT_USAGE
    ref = _read_image(args.reference)
    print("tau,bpp,psnr,linf")
    for tau in range(args.tau_min, args.tau_max + 1):
        result = encode_image(ref, CodecConfig(tau=tau))
        decoded = decode_image(result.bitstream)
        print(
            f"{tau},{result.bpp:.4f},{format_psnr(psnr(ref, decoded))},"
            f"{linf_error(ref, decoded)}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlcodec",
        description="Near-lossless image codec with per-pixel error bound and CNN soft decoding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="compress a PGM image")
    p.add_argument("--tau", type=_tau, required=True, help=f"error bound in [0, {TAU_MAX}]")
    p.add_argument("input", help="input PGM (P5) file")
    p.add_argument("output", help="output .nlc file")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="hard-decode an .nlc stream")
    p.add_argument("input", help="input .nlc file")
    p.add_argument("output", help="output PGM file")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("soft-decode", help="hard-decode then CNN-restore an .nlc stream")
    p.add_argument("input", help="input .nlc file")
    p.add_argument("--weights", required=True, help=".lsdw weight file")
    p.add_argument("output", help="output PGM file")
    p.add_argument(
        "--dump-forward",
        metavar="FILE",
        help="also write the raw pre-truncation output (row-major float32 LE)",
    )
    p.set_defaults(func=_cmd_soft_decode)

    p = sub.add_parser("metrics", help="PSNR and max absolute error between two PGMs")
    p.add_argument("reference")
    p.add_argument("test")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("verify", help="recompute the error bound of a stream from scratch")
    p.add_argument("input", help=".nlc file")
    p.add_argument("reference", help="original PGM the stream was encoded from")
    p.add_argument("--soft", metavar="WEIGHTS", help="also check the 2*tau soft-decode bound")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="rate-distortion CSV over a range of tau values")
    p.add_argument("--tau-min", type=_tau, default=0)
    p.add_argument("--tau-max", type=_tau, default=TAU_MAX)
    p.add_argument("reference", help="PGM image to sweep")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PgmError, BitstreamError, WeightsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
