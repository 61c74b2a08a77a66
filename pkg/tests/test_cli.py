import json
import subprocess
import sys

import numpy as np
import pytest

import oracles
from emsq import io
from emsq.cli import main
from emsq.gaussian import CovMat4, entanglement_report, epr_duan
from emsq.model import filtered_output_cm, reference_device

REPORTED = CovMat4.normal_form(oracles.REPORTED_V11, oracles.REPORTED_V33, oracles.REPORTED_V13)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def cm_file(tmp_path, cm, name="cm.json"):
    path = tmp_path / name
    io.write_cm(path, cm)
    return path


class TestMetrics:
    def test_reported_cm(self, tmp_path, capsys):
        code, out, _ = run(capsys, "metrics", "--cm", cm_file(tmp_path, REPORTED), "--linewidth-hz", 282)
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["delta_epr"] == pytest.approx(0.46, abs=1e-12)
        assert rep["e_n"] == pytest.approx(oracles.REPORTED_E_N, rel=1e-12)
        assert rep["discord"] == pytest.approx(1.56, abs=0.01)
        assert rep["ebit_rate"] == pytest.approx(rep["e_f"] * 282)

    def test_vacuum(self, tmp_path, capsys):
        code, out, _ = run(capsys, "metrics", "--cm", cm_file(tmp_path, CovMat4.vacuum()))
        rep = json.loads(out)["report"]
        assert code == 0
        assert rep["delta_epr"] == 1.0
        assert rep["e_n"] == rep["e_f"] == rep["discord"] == 0.0

    def test_csv(self, tmp_path, capsys):
        code, out, _ = run(capsys, "metrics", "--cm", cm_file(tmp_path, REPORTED), "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("#") and "delta_epr" in lines[1].split(",")
        assert len(lines) == 3

    def test_unphysical(self, tmp_path, capsys):
        code, _, err = run(capsys, "metrics", "--cm", cm_file(tmp_path, CovMat4(0.1 * np.eye(4))))
        assert code == 2
        assert json.loads(err)["message"] == "unphysical covariance"

    def test_device_model(self, capsys):
        code, out, _ = run(capsys, "metrics")
        assert code == 0
        data = json.loads(out)
        dev = reference_device()
        op = dev.operating_point()
        expected = entanglement_report(filtered_output_cm(op, 100.0))
        assert data["report"]["delta_epr"] == expected.delta_epr
        assert data["report"]["ebit_rate"] == pytest.approx(expected.e_f * op.gamma_eff / (2 * np.pi))

    def test_unstable_device(self, tmp_path, capsys):
        text = (tmp_path / "dev.cfg")
        from emsq.config import load_config

        raw = dict(load_config().raw, p_red_dbm="-95")
        text.write_text("\n".join(f"{k} = {v}" for k, v in raw.items()))
        code, _, err = run(capsys, "metrics", "--config", text)
        assert code == 2
        assert json.loads(err)["error"] == "UnstableSystem"

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        code, stdout, _ = run(capsys, "--out", out, "metrics", "--cm", cm_file(tmp_path, REPORTED))
        assert code == 0 and stdout == ""
        assert json.loads(out.read_text())["report"]["delta_epr"] == pytest.approx(0.46)


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            ["nonsense"],
            ["metrics", "--phi", "abc"],
            ["angle", "--n-angles", "0"],
            ["sweep", "--grid", "a,b"],
            ["sweep", "--grid=-80,-82,-79"],
            ["sweep", "--pump-noise", "1"],
            ["--format", "xml", "metrics"],
        ],
    )
    def test_exit_1(self, argv, capsys):
        try:
            code = main(argv)
        except SystemExit as exc:
            code = exc.code
        assert code == 1

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "metrics", "--cm", tmp_path / "nope.json")
        assert code == 1
        assert json.loads(err)["error"] == "FormatError"

    def test_missing_convention(self, tmp_path, capsys):
        path = tmp_path / "cm.json"
        path.write_text(json.dumps({"v": REPORTED.v.tolist()}))
        code, _, _ = run(capsys, "metrics", "--cm", path)
        assert code == 1

    def test_bad_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("bogus_key = 1\n")
        code, _, err = run(capsys, "sweep", "--config", path)
        assert code == 1 and json.loads(err)["error"] == "ConfigError"


class TestAngle:
    def test_reported_cm_minimum(self, tmp_path, capsys):
        out = tmp_path / "angle.csv"
        code, _, _ = run(capsys, "angle", "--cm", cm_file(tmp_path, REPORTED), "--out", out)
        assert code == 0
        rows = io.read_table(out)
        assert len(rows) == 360
        best = min(rows, key=lambda r: r["x_minus_var"])
        assert best["x_minus_var"] == pytest.approx(0.23, abs=1e-12)
        assert best["phi_rad"] == 0.0
        assert best["squeezing_db_x"] == pytest.approx(-3.37, abs=0.01)
        assert out.read_text().startswith("# ")

    def test_rows_match_library(self, tmp_path, capsys):
        code, out, _ = run(capsys, "angle", "--cm", cm_file(tmp_path, REPORTED), "--n-angles", 7, "--format", "json")
        rows = json.loads(out)
        for r in rows:
            assert r["delta_epr"] == epr_duan(REPORTED, r["phi_rad"]).delta_epr


class TestSweepCommand:
    def test_stable_region_entangled(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(capsys, "sweep", "--points", 11, "--out", out)
        assert code == 0
        rows = io.read_table(out)
        assert len(rows) == 11
        assert any(not r["stable"] for r in rows)
        stable = [r for r in rows if r["stable"]]
        assert stable and all(r["delta_epr"] < 1 for r in stable)

    def test_all_unstable(self, capsys):
        code, out, _ = run(capsys, "sweep", "--p-min", -100, "--p-max", -92, "--points", 5, "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert all(r["stable"] is False and r["error"] == "unstable" for r in rows)

    def test_pump_noise(self, capsys):
        code, out, _ = run(capsys, "sweep", "--grid=-84.4,-78", "--pump-noise", "1e11,1e11", "--format", "json")
        rows = json.loads(out)
        assert rows[0]["delta_epr"] < 1 < rows[1]["delta_epr"]

    def test_deterministic(self, capsys):
        a = run(capsys, "sweep", "--points", 5)[1]
        b = run(capsys, "sweep", "--points", 5)[1]
        assert a == b

    def test_round_trip_exact(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        run(capsys, "sweep", "--grid", "-84.4", "--format", "json", "--out", out)
        row = json.loads(out.read_text())[0]
        rep = entanglement_report(filtered_output_cm(reference_device().operating_point(), 100.0))
        assert row["delta_epr"] == rep.delta_epr


class TestCalibrateCommand:
    def test_synthetic(self, capsys, tmp_path):
        code, out, _ = run(capsys, "calibrate", "--write-points", tmp_path / "pts")
        assert code == 0
        res = json.loads(out)
        assert [r["channel"] for r in res] == [1, 2]
        assert res[0]["gain_db"] == pytest.approx(83.20, abs=0.1)
        assert res[1]["n_add"] == pytest.approx(11.5, abs=0.3)
        assert (tmp_path / "pts.ch1.csv").exists()

    def test_from_points(self, capsys, tmp_path):
        run(capsys, "calibrate", "--rel-noise", 0, "--write-points", tmp_path / "pts")
        code, out, _ = run(capsys, "calibrate", "--points", tmp_path / "pts.ch2.csv", "--channel", 2)
        res = json.loads(out)
        assert code == 0
        assert res[0]["gain_db"] == pytest.approx(79.99, abs=1e-9)

    def test_bad_range(self, capsys):
        code, _, _ = run(capsys, "calibrate", "--t-min", 1.0, "--t-max", 0.5)
        assert code == 1

    def test_too_few_points(self, capsys):
        code, _, err = run(capsys, "calibrate", "--n-points", 2)
        assert code == 1 and json.loads(err)["error"] == "InsufficientPoints"


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("exp")
    results = []
    for name in ("a", "b"):
        out = base / name
        proc = subprocess.run(
            [sys.executable, "-m", "emsq.cli", "--seed", "7", "experiment", "--out", str(out)],
            capture_output=True, text=True,
        )
        results.append((proc, out))
    return results


class TestExperiment:
    def test_exit_and_files(self, runs):
        proc, out = runs[0]
        assert proc.returncode == 0, proc.stderr
        for name in (
            "cm_true.json", "calibration_ch1.csv", "calibration_ch2.csv", "calibration.json",
            "batch_on.bin", "batch_off.bin", "cm_estimated.json", "metrics.json",
            "hist_x1x2.csv", "hist_x1x2.json", "hist_p1p2.csv", "hist_p1p2.json", "manifest.json",
        ):
            assert (out / name).exists(), name

    def test_deterministic_manifest(self, runs):
        (_, a), (_, b) = runs
        assert (a / "manifest.json").read_text() == (b / "manifest.json").read_text()
        manifest = json.loads((a / "manifest.json").read_text())
        assert manifest["inputs"]["seed"] == 7
        assert len(manifest["outputs"]) == 12

    def test_estimate_within_three_se(self, runs):
        proc, out = runs[0]
        summary = json.loads(proc.stdout)
        assert abs(summary["delta_epr_estimated"] - summary["delta_epr_true"]) <= 3 * summary["delta_epr_se"]
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["true"]["delta_epr"] < 1

    def test_batches_readable(self, runs):
        _, out = runs[0]
        on = io.read_batch(out / "batch_on.bin")
        off = io.read_batch(out / "batch_off.bin")
        assert on.n == 216000 and off.n == 604800
        assert on.pumps_on and not off.pumps_on

    def test_too_few_samples(self, tmp_path, capsys):
        code, _, err = run(capsys, "experiment", "--n-on", 10, "--out", tmp_path / "small")
        assert code == 1
        payload = json.loads(err)
        assert payload["stage"] == "estimation"
        assert payload["error"] == "InsufficientSamples"


def test_console_script(tmp_path):
    path = cm_file(tmp_path, REPORTED)
    proc = subprocess.run(["emsq", "metrics", "--cm", str(path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["delta_epr"] == pytest.approx(0.46)
