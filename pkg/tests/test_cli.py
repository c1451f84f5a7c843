import subprocess
import sys

import numpy as np
import pytest

from nlcodec import Arch, Image, random_model, read_pgm, save_weights, write_pgm, zero_model
from nlcodec.cli import main

from conftest import make_natural


@pytest.fixture
def workdir(tmp_path):
    img = Image(make_natural(32, 32, 900))
    ref = tmp_path / "ref.pgm"
    ref.write_bytes(write_pgm(img))
    return tmp_path, ref, img


class TestEncodeDecode:
    def test_round_trip_files(self, workdir):
        tmp, ref, img = workdir
        nlc = tmp / "out.nlc"
        out = tmp / "back.pgm"
        assert main(["encode", "--tau", "0", str(ref), str(nlc)]) == 0
        assert main(["decode", str(nlc), str(out)]) == 0
        assert read_pgm(out.read_bytes()) == img

    def test_lossy_round_trip_within_bound(self, workdir):
        tmp, ref, img = workdir
        nlc = tmp / "out.nlc"
        out = tmp / "back.pgm"
        assert main(["encode", "--tau", "4", str(ref), str(nlc)]) == 0
        assert main(["decode", str(nlc), str(out)]) == 0
        back = read_pgm(out.read_bytes())
        diff = np.abs(back.pixels.astype(int) - img.pixels.astype(int))
        assert diff.max() <= 4


class TestMetrics:
    def test_identical_files_golden_line(self, workdir, capsys):
        tmp, ref, _ = workdir
        assert main(["metrics", str(ref), str(ref)]) == 0
        assert capsys.readouterr().out == "psnr=inf linf=0\n"

    def test_known_pair_golden_line(self, tmp_path, capsys):
        a = tmp_path / "a.pgm"
        b = tmp_path / "b.pgm"
        a.write_bytes(write_pgm(Image(np.array([[0, 0]], np.uint8))))
        b.write_bytes(write_pgm(Image(np.array([[5, 0]], np.uint8))))
        assert main(["metrics", str(a), str(b)]) == 0
        # 10*log10(255^2 / 12.5) = 37.16165...
        assert capsys.readouterr().out == "psnr=37.1617 linf=5\n"


class TestVerify:
    def test_fresh_stream_verifies(self, workdir, capsys):
        tmp, ref, _ = workdir
        nlc = tmp / "out.nlc"
        for tau in (0, 1, 5):
            assert main(["encode", "--tau", str(tau), str(ref), str(nlc)]) == 0
            assert main(["verify", str(nlc), str(ref)]) == 0
        capsys.readouterr()

    def test_wrong_reference_violates(self, workdir, capsys):
        tmp, ref, img = workdir
        nlc = tmp / "out.nlc"
        other = tmp / "other.pgm"
        other.write_bytes(write_pgm(Image(255 - img.pixels)))
        assert main(["encode", "--tau", "1", str(ref), str(nlc)]) == 0
        assert main(["verify", str(nlc), str(other)]) == 4
        capsys.readouterr()

    def test_soft_verify_with_random_weights(self, workdir, capsys):
        tmp, ref, _ = workdir
        nlc = tmp / "out.nlc"
        wfile = tmp / "m.lsdw"
        wfile.write_bytes(save_weights(random_model(Arch(2, 4, 2), seed=1, scale=0.7)))
        assert main(["encode", "--tau", "3", str(ref), str(nlc)]) == 0
        assert main(["verify", str(nlc), str(ref), "--soft", str(wfile)]) == 0
        capsys.readouterr()


class TestSoftDecodeCommand:
    def test_zero_weights_matches_hard_decode(self, workdir):
        tmp, ref, _ = workdir
        nlc = tmp / "out.nlc"
        hard = tmp / "hard.pgm"
        soft = tmp / "soft.pgm"
        wfile = tmp / "m.lsdw"
        wfile.write_bytes(save_weights(zero_model(Arch(1, 4, 2))))
        assert main(["encode", "--tau", "2", str(ref), str(nlc)]) == 0
        assert main(["decode", str(nlc), str(hard)]) == 0
        assert main(["soft-decode", str(nlc), "--weights", str(wfile), str(soft)]) == 0
        assert hard.read_bytes() == soft.read_bytes()

    def test_dump_forward_writes_float_plane(self, workdir):
        tmp, ref, img = workdir
        nlc = tmp / "out.nlc"
        soft = tmp / "soft.pgm"
        raw = tmp / "fwd.f32"
        wfile = tmp / "m.lsdw"
        wfile.write_bytes(save_weights(random_model(Arch(1, 4, 2), seed=2)))
        assert main(["encode", "--tau", "2", str(ref), str(nlc)]) == 0
        assert main(
            ["soft-decode", str(nlc), "--weights", str(wfile), str(soft), "--dump-forward", str(raw)]
        ) == 0
        plane = np.frombuffer(raw.read_bytes(), dtype="<f4")
        assert plane.size == img.width * img.height
        assert np.all(np.isfinite(plane))


class TestSweep:
    def test_csv_shape_and_monotone_bpp(self, workdir, capsys):
        tmp, ref, _ = workdir
        assert main(["sweep", "--tau-min", "1", "--tau-max", "8", str(ref)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "tau,bpp,psnr,linf"
        assert len(lines) == 9
        rows = [line.split(",") for line in lines[1:]]
        taus = [int(r[0]) for r in rows]
        bpps = [float(r[1]) for r in rows]
        linfs = [int(r[3]) for r in rows]
        assert taus == list(range(1, 9))
        assert all(a >= b for a, b in zip(bpps, bpps[1:]))
        assert all(linfs[i] <= taus[i] for i in range(8))

    def test_tau_zero_row_reports_inf(self, workdir, capsys):
        tmp, ref, _ = workdir
        assert main(["sweep", "--tau-min", "0", "--tau-max", "0", str(ref)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1].startswith("0,")
        assert lines[1].split(",")[2] == "inf"
        assert lines[1].split(",")[3] == "0"


class TestExitCodes:
    def test_missing_file_is_io_error(self, tmp_path, capsys):
        assert main(["decode", str(tmp_path / "nope.nlc"), str(tmp_path / "x.pgm")]) == 3
        capsys.readouterr()

    def test_corrupt_stream_is_io_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.nlc"
        bad.write_bytes(b"not a stream")
        assert main(["decode", str(bad), str(tmp_path / "x.pgm")]) == 3
        capsys.readouterr()

    def test_bad_tau_is_usage_error(self, workdir):
        tmp, ref, _ = workdir
        with pytest.raises(SystemExit) as exc:
            main(["encode", "--tau", "9", str(ref), str(tmp / "x.nlc")])
        assert exc.value.code == 2

    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_module_entry_point(self, workdir):
        tmp, ref, _ = workdir
        proc = subprocess.run(
            [sys.executable, "-m", "nlcodec.cli", "metrics", str(ref), str(ref)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == "psnr=inf linf=0\n"
