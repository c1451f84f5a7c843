"""Acceptance suite: the primary exit criteria, one test per criterion.

Each test prints one "[ACCEPT] <criterion>: PASS/FAIL" line.  The suite
needs no trained models: it uses zero-weight and random-weight networks
only.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from nlcodec import (
    Arch,
    CodecConfig,
    Image,
    decode_image,
    encode_image,
    linf_error,
    psnr,
    random_model,
    soft_decode,
    write_pgm,
)
from nlcodec.cli import main as cli_main
from nlcodec.entropy import (
    HEADER_LEN,
    BitstreamError,
    decode_plane,
    encode_plane,
)
from nlcodec.losses import quasi_linf_grad, quasi_linf_loss
from nlcodec.tensor import ConvParams, conv2d

from test_tensor import conv_oracle


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\n[ACCEPT] {name}: FAIL")
        raise
    print(f"\n[ACCEPT] {name}: PASS")


def test_eq5_bound_exhaustive():
    """|x - reconstruct(pred, quantize(x-pred, tau))| <= tau on the full
    256 x 256 x 9 grid, in under 10 seconds."""
    with criterion("Eq.5 bound exhaustive (all x, pred, tau; < 10 s)"):
        start = time.perf_counter()
        x = np.arange(256, dtype=np.int64).reshape(-1, 1)
        pred = np.arange(256, dtype=np.int64).reshape(1, -1)
        e = x - pred
        violations = 0
        for tau in range(9):
            step = 2 * tau + 1
            m = np.sign(e) * ((np.abs(e) + tau) // step)
            y = np.clip(pred + m * step, 0, 255)
            violations += int(np.sum(np.abs(x - y) > tau))
        elapsed = time.perf_counter() - start
        assert violations == 0
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_lossless_mode_bit_identical(corpus20):
    """tau=0 encode/decode is bit-identical on the 20-image corpus."""
    with criterion("Lossless mode bit-identical on 20-image corpus"):
        assert len(corpus20) == 20
        mismatches = 0
        for img in corpus20:
            decoded = decode_image(encode_image(img, CodecConfig(tau=0)).bitstream)
            if decoded != img or write_pgm(decoded) != write_pgm(img):
                mismatches += 1
        assert mismatches == 0


def test_end_to_end_tau_bound_via_verify(corpus20, tmp_path):
    """verify exits 0 for tau in 1..8 over the corpus (bound recomputed
    from scratch by the CLI, not trusted from the encoder)."""
    with criterion("End-to-end tau bound (verify exit 0, tau 1..8)"):
        for i, img in enumerate(corpus20):
            ref = tmp_path / f"ref{i}.pgm"
            ref.write_bytes(write_pgm(img))
            for tau in range(1, 9):
                nlc = tmp_path / f"s{i}_{tau}.nlc"
                assert cli_main(["encode", "--tau", str(tau), str(ref), str(nlc)]) == 0
                assert cli_main(["verify", str(nlc), str(ref)]) == 0


def test_hard_decode_psnr_matches_published_rates(naturals):
    """Mean hard-decode PSNR lands within +/-0.6 dB of the published
    CALIC figures: 49.95 dB at tau=1 and 45.19 dB at tau=2."""
    with criterion("Hard-decode PSNR vs published tau=1/tau=2 (+/-0.6 dB; < 1 min)"):
        # tiny warmup so JIT compilation is not billed to the codec
        warm = Image(np.zeros((8, 8), np.uint8))
        decode_image(encode_image(warm, CodecConfig(tau=1)).bitstream)
        start = time.perf_counter()
        means = {}
        for tau, published in ((1, 49.95), (2, 45.19)):
            values = []
            for img in naturals:
                decoded = decode_image(encode_image(img, CodecConfig(tau=tau)).bitstream)
                values.append(psnr(img, decoded))
            means[tau] = float(np.mean(values))
            assert abs(means[tau] - published) <= 0.6, (
                f"tau={tau}: mean {means[tau]:.3f} dB vs published {published}"
            )
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0, f"took {elapsed:.2f}s"
        print(f"  tau=1: {means[1]:.3f} dB, tau=2: {means[2]:.3f} dB, {elapsed:.2f}s")


def test_entropy_round_trip_and_corruption():
    """10^6 random zigzagged symbols round-trip exactly; structurally
    corrupted streams (truncation, header tampering, length extension,
    dirty padding) always raise, never return an image."""
    with criterion("Entropy round-trip 10^6 symbols + corruption errors"):
        rng = np.random.default_rng(77)
        h, w = 1000, 1000
        small = rng.geometric(0.2, (h, w)) - 1
        spikes = rng.integers(0, 600, (h, w)) * (rng.random((h, w)) < 0.01)
        sign = rng.choice((-1, 1), (h, w))
        indices = (sign * (small + spikes)).astype(np.int32)
        contexts = rng.integers(0, 4, (h, w)).astype(np.uint8)
        stream = encode_plane(indices, contexts, tau=2)
        _, decoded = decode_plane(stream, contexts)
        assert np.array_equal(decoded, indices)

        img = Image(rng.integers(0, 256, (32, 32)).astype(np.uint8))
        data = encode_image(img, CodecConfig(tau=2)).bitstream
        corrupt = []
        corrupt += [data[:cut] for cut in range(len(data))]  # every truncation
        corrupt.append(data + b"\x00")  # length extension
        corrupt.append(b"XXXX" + data[4:])  # magic
        bad_version = bytearray(data)
        bad_version[4] = 7
        corrupt.append(bytes(bad_version))
        bad_tau = bytearray(data)
        bad_tau[13] = 9
        corrupt.append(bytes(bad_tau))
        bad_pred = bytearray(data)
        bad_pred[14] = 5
        corrupt.append(bytes(bad_pred))
        grown = bytearray(data)
        grown[5] = 255  # widen the claimed image; payload cannot satisfy it
        corrupt.append(bytes(grown))
        for blob in corrupt:
            with pytest.raises(BitstreamError):
                decode_image(bytes(blob))


def test_conv_oracle_200_draws():
    """conv2d vs naive direct convolution on 200 random parameter draws
    (stride, dilation in {1,2}; kernels {1,3,4}) within 1e-5 absolute."""
    with criterion("Conv oracle, 200 random draws, <= 1e-5"):
        rng = np.random.default_rng(88)
        worst = 0.0
        for draw in range(200):
            k = int(rng.choice((1, 3, 4)))
            stride = int(rng.integers(1, 3))
            dilation = int(rng.integers(1, 3))
            in_c = int(rng.integers(1, 4))
            out_c = int(rng.integers(1, 4))
            h = int(rng.integers(k * dilation, 12))
            w = int(rng.integers(k * dilation, 12))
            pad = ("same" if k % 2 else int(rng.integers(0, 3)))
            x = rng.normal(0, 1, (in_c, h, w)).astype(np.float32)
            p = ConvParams(
                weights=rng.normal(0, 1, (out_c, in_c, k, k)).astype(np.float32),
                bias=rng.normal(0, 1, out_c).astype(np.float32),
                stride=stride,
                dilation=dilation,
                padding=pad,
            )
            ph, pw = p.pad_hw()
            want = conv_oracle(x, p.weights, p.bias, stride, dilation, ph, pw)
            got = conv2d(x, p)
            worst = max(worst, float(np.max(np.abs(got - want))) if want.size else 0.0)
        assert worst <= 1e-5, f"worst deviation {worst:.2e}"


def test_loss_suite():
    """quasi_linf_loss = 0 iff the max error is within tau (10^4 random
    cases); analytic gradient matches central differences to 1e-4
    relative away from the kinks."""
    with criterion("Loss suite: zero-iff-band (10^4 cases) + gradient check"):
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            tau = int(rng.integers(0, 9))
            n = int(rng.integers(1, 17))
            a = rng.integers(0, 256, n).astype(np.float64)
            b = np.clip(a + rng.integers(-12, 13, n), 0, 255).astype(np.float64)
            loss = quasi_linf_loss(a, b, tau)
            within = np.max(np.abs(a - b)) <= tau
            assert (loss == 0.0) == within

        h = 1e-3
        checked = 0
        for _ in range(100):
            tau = int(rng.integers(1, 9))
            x = rng.integers(0, 256, (4, 4)).astype(np.float64)
            xh = x + rng.normal(0, 2 * tau, (4, 4))
            err = np.abs(xh - x)
            keep = np.abs(err - tau) > 10 * h  # away from the kinks
            grad = quasi_linf_grad(xh, x, tau)
            for idx in np.ndindex(4, 4):
                if not keep[idx]:
                    continue
                up, dn = xh.copy(), xh.copy()
                up[idx] += h
                dn[idx] -= h
                fd = (quasi_linf_loss(up, x, tau) - quasi_linf_loss(dn, x, tau)) / (2 * h)
                if fd == 0.0:
                    assert grad[idx] == 0.0
                else:
                    assert abs(grad[idx] - fd) <= 1e-4 * abs(fd)
                    checked += 1
        assert checked > 100


def test_unconditional_soft_decode_guarantee():
    """With random weights, 100 random images, every tau in 1..8: the
    restored image stays within tau of the hard decode and within 2*tau
    of the original.  Holds by construction, regardless of model
    quality."""
    with criterion("Unconditional soft-decode guarantee (|X^-Y|<=tau, |X^-X|<=2tau)"):
        rng = np.random.default_rng(123)
        archs = [Arch(1, 4, 2), Arch(2, 6, 2), Arch(2, 8, 2), Arch(3, 4, 2)]
        models = [
            random_model(a, seed=i, scale=0.7) for i, a in enumerate(archs)
        ]
        band_violations = 0
        e2e_violations = 0
        for i in range(100):
            h = int(rng.integers(4, 17)) * 2
            w = int(rng.integers(4, 17)) * 2
            x = Image(rng.integers(0, 256, (h, w)).astype(np.uint8))
            model = models[i % len(models)]
            for tau in range(1, 9):
                y = decode_image(encode_image(x, CodecConfig(tau=tau)).bitstream)
                xhat = soft_decode(y, tau, model)
                if linf_error(xhat, y) > tau:
                    band_violations += 1
                if linf_error(xhat, x) > 2 * tau:
                    e2e_violations += 1
        # spot-check the default-size architecture once
        big = random_model(Arch(), seed=7, scale=0.3)
        x = Image(rng.integers(0, 256, (16, 16)).astype(np.uint8))
        y = decode_image(encode_image(x, CodecConfig(tau=4)).bitstream)
        xhat = soft_decode(y, 4, big)
        assert linf_error(xhat, y) <= 4 and linf_error(xhat, x) <= 8
        assert band_violations == 0
        assert e2e_violations == 0


def test_rate_monotonicity(corpus20):
    """Mean bpp over the corpus strictly decreases from tau=0 to tau=8."""
    with criterion("Rate monotonicity: mean bpp strictly decreasing in tau"):
        means = []
        for tau in range(9):
            bpps = [encode_image(img, CodecConfig(tau=tau)).bpp for img in corpus20]
            means.append(float(np.mean(bpps)))
        assert all(a > b for a, b in zip(means, means[1:])), means
        print("  mean bpp:", " ".join(f"{v:.3f}" for v in means))
