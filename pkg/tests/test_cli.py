import json
import subprocess
import sys

import numpy as np
import pytest

from dquotient.cli import main
from dquotient.distort import DistortionSpec, apply_distortion, make_texture
from dquotient.image_io import Image, read_pgm, write_pgm


@pytest.fixture
def images(tmp_path):
    ref = make_texture(4, size=48)
    noisy = apply_distortion(ref, DistortionSpec("gaussian_noise", 0.05, seed=8))
    paths = {}
    for name, img in [("ref", ref), ("noisy", noisy)]:
        p = tmp_path / f"{name}.pgm"
        write_pgm(Image(np.clip(img.values * 255, 0, 255)), p)
        paths[name] = p
    small = tmp_path / "small.pgm"
    write_pgm(Image(np.zeros((40, 40))), small)
    paths["small"] = small
    return paths


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCompare:
    def test_identical(self, images, capsys):
        code, out, _ = run(["compare", images["ref"], images["ref"]], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["schema"] == 1
        assert report["ssim"] == 1.0 and report["dq"] == 0.0 and report["nrmse"] == 0.0
        assert report["ssim_three_term"] == pytest.approx(1.0, abs=1e-15)
        for key in ("s_l", "s_v", "one_minus_ssim"):
            assert key in report

    def test_mismatch(self, images, capsys):
        code, _, err = run(["compare", images["ref"], images["small"]], capsys)
        assert code == 3 and "dimension mismatch" in err

    def test_missing_file(self, images, tmp_path, capsys):
        code, _, _ = run(["compare", images["ref"], tmp_path / "nope.pgm"], capsys)
        assert code == 2

    def test_bad_pgm(self, images, tmp_path, capsys):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
        code, _, _ = run(["compare", images["ref"], bad], capsys)
        assert code == 2

    def test_bad_flag(self, images, capsys):
        with pytest.raises(SystemExit) as e:
            main(["compare", str(images["ref"]), str(images["ref"]), "--pool", "-1"])
        assert e.value.code == 3

    def test_even_window_rejected(self, images, capsys):
        code, _, err = run(["compare", images["ref"], images["noisy"], "--size", "6"], capsys)
        assert code == 3

    def test_deterministic(self, images, tmp_path, capsys):
        outs = []
        for i in range(2):
            out = tmp_path / f"c{i}.json"
            assert run(["compare", images["ref"], images["noisy"], "--out", out], capsys)[0] == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert 0 < json.loads(outs[0])["dq"] < 1

    def test_csv_and_flags(self, images, capsys):
        code, out, _ = run(
            ["compare", images["ref"], images["noisy"], "--format", "csv", "--window", "uniform",
             "--size", "7", "--border", "pad", "--exact-zero", "--transform", "riesz", "--pool", "2"],
            capsys,
        )
        assert code == 0
        rows = dict(line.split(",") for line in out.strip().splitlines()[1:])
        assert 0 < float(rows["dq"]) < 1

    @pytest.mark.parametrize("transform", ["grad", "laplacian", "riesz"])
    def test_transforms(self, images, capsys, transform):
        code, out, _ = run(["compare", images["ref"], images["ref"], "--transform", transform], capsys)
        assert code == 0 and json.loads(out)["dq"] == 0


class TestMap:
    def test_identical_dq_all_zero(self, images, tmp_path, capsys):
        out = tmp_path / "m.pgm"
        code, _, _ = run(["map", images["ref"], images["ref"], "--out", out], capsys)
        assert code == 0
        img = read_pgm(out)
        assert not img.values.any()
        assert img.shape == (38, 38)
        meta = json.loads(out.with_suffix(".json").read_text())
        assert meta["metric"] == "dq" and meta["offset"] == 0 and meta["step"] == 0

    def test_padded_keeps_size(self, images, tmp_path, capsys):
        out = tmp_path / "m.pgm"
        code, _, _ = run(["map", images["ref"], images["noisy"], "--border", "pad", "--out", out], capsys)
        assert code == 0 and read_pgm(out).shape == (48, 48)

    def test_csv(self, images, tmp_path, capsys):
        out = tmp_path / "m.csv"
        code, _, _ = run(["map", images["ref"], images["noisy"], "--metric", "ssim", "--format", "csv", "--out", out], capsys)
        assert code == 0
        assert out.read_text().splitlines()[0] == "x,y,value"
        assert len(out.read_text().splitlines()) == 1 + 38 * 38

    def test_mismatch(self, images, tmp_path, capsys):
        assert run(["map", images["ref"], images["small"], "--out", tmp_path / "x.pgm"], capsys)[0] == 3


class TestSweep:
    def test_single_zero_level(self, images, capsys):
        code, out, _ = run(["sweep", images["ref"], "--levels", "0"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "level,ssim,one_minus_ssim,dq,nrmse"
        assert len(lines) == 2
        assert float(lines[1].split(",")[3]) == 0

    def test_eight_levels_increasing(self, capsys):
        levels = "0.01,0.02,0.03,0.05,0.07,0.09,0.12,0.15"
        code, out, _ = run(["sweep", "--texture", "1", "--levels", levels, "--seed", "3"], capsys)
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 8
        dq = [float(r.split(",")[3]) for r in rows]
        assert all(a < b for a, b in zip(dq, dq[1:]))

    def test_deterministic(self, tmp_path, capsys):
        outs = []
        for i in range(2):
            out = tmp_path / f"s{i}.csv"
            run(["sweep", "--texture", "2", "--levels", "0.02,0.05", "--seed", "9", "--out", out], capsys)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_dump_maps(self, images, tmp_path, capsys):
        d = tmp_path / "maps"
        code, _, _ = run(["sweep", images["ref"], "--levels", "0.02,0.05", "--dump-maps", d], capsys)
        assert code == 0
        assert sorted(p.name for p in d.iterdir()) == ["dq_000.json", "dq_000.pgm", "dq_001.json", "dq_001.pgm"]

    def test_blur_kind(self, images, capsys):
        code, out, _ = run(["sweep", images["ref"], "--kind", "blur", "--levels", "0.5,1,2"], capsys)
        assert code == 0 and len(out.strip().splitlines()) == 4

    def test_bad_levels(self, images, capsys):
        assert run(["sweep", images["ref"], "--levels", "0.1,abc"], capsys)[0] == 3
        assert run(["sweep", images["ref"], "--levels", "0.2,0.1"], capsys)[0] == 3

    def test_needs_one_reference(self, images, capsys):
        assert run(["sweep", "--levels", "0.1"], capsys)[0] == 3
        assert run(["sweep", images["ref"], "--texture", "1", "--levels", "0.1"], capsys)[0] == 3


class TestCorrelate:
    def test_report(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,80\nb,0.3,40\nc,0.2,60\n")
        code, out, _ = run(["correlate", p, "--pool", "2"], capsys)
        assert code == 0
        r = json.loads(out)
        assert r["p"] == 2 and r["spearman"] == pytest.approx(-1.0)

    def test_bad_csv(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        p.write_text("id,metric,score\na,0.1,80\na,0.3,40\n")
        assert run(["correlate", p], capsys)[0] == 3


class TestSelftest:
    def test_default_passes(self, capsys):
        code, out, _ = run(["selftest", "--trials", "10"], capsys)
        assert code == 0
        assert "selftest passed" in out
        for name in (
            "mu_plus = mu2 + mu1",
            "mu_minus = mu2 - mu1",
            "4 mu1 mu2 = mu_plus^2 - mu_minus^2",
            "2 mu1^2 + 2 mu2^2 = mu_plus^2 + mu_minus^2",
            "4 cov = var_plus - var_minus",
            "2 var1 + 2 var2 = var_plus + var_minus",
        ):
            assert name in out

    def test_trial_count(self, capsys):
        code, out, _ = run(["selftest", "--trials", "500", "--image-size", "16", "--size", "5"], capsys)
        assert code == 0 and "500 random" in out

    def test_failure_exit_code(self, capsys, monkeypatch):
        import dquotient.cli as cli

        monkeypatch.setattr(cli, "run_battery", lambda *a: {"forced": 1.0})
        assert run(["selftest"], capsys)[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "dquotient", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
