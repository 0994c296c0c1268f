"""End-to-end command-line runs, file formats and exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from catquench.io import WIG_MAGIC, read_wig

COMMON = ["--j=0.5", "--R=10", "--lambda-in=1.5", "--lambda-fi=-0.4",
          "--delta=0.5"]


def _run(args, **kw):
    return subprocess.run([sys.executable, "-m", "catquench.cli", *args],
                          capture_output=True, text=True, **kw)


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def test_spectrum_command(tmp_path):
    r = _run(["spectrum", *COMMON, "--nmax=30",
              "--lambda-grid=0.5:1.5:3", f"--out={tmp_path}"])
    assert r.returncode == 0, r.stderr
    header, rows = _read_csv(tmp_path / "spectrum.csv")
    assert header == ["lambda", "k", "energy", "parity"]
    lams = sorted({float(row[0]) for row in rows})
    assert lams == [0.5, 1.0, 1.5]
    assert all(float(row[3]) in (-1.0, 1.0) for row in rows)
    header, rows = _read_csv(tmp_path / "strength.csv")
    assert header == ["e_k", "weight", "assigned_m"]
    assert abs(sum(float(row[1]) for row in rows) - 1.0) < 1e-9
    manifest = json.loads((tmp_path / "strength.json").read_text())
    assert manifest["config"]["j"] == 0.5
    assert manifest["n_max"] >= 30


def test_quench_command_timeseries(tmp_path):
    r = _run(["quench", *COMMON, "--nmax=40", "--times=0:10:21",
              "--grid=151x151", "--extent", "1.8", "1.8",
              f"--out={tmp_path}"])
    assert r.returncode == 0, r.stderr
    header, rows = _read_csv(tmp_path / "timeseries.csv")
    assert header == ["t", "q_mean", "p_mean", "Jx", "Jy", "Jz",
                      "survival", "purity", "negativity"]
    assert len(rows) == 21
    assert abs(float(rows[0][6]) - 1.0) < 1e-9        # P(0) = 1
    assert abs(float(rows[0][7]) - 1.0) < 1e-3        # initial purity
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["residuals"]["norm"] < 1e-10


def test_wigner_command_roundtrip(tmp_path):
    r = _run(["wigner", *COMMON, "--nmax=40", "--times=0,5",
              "--grid=61x61", "--extent", "1.5", "1.5",
              "--format=wig,csv", f"--out={tmp_path}"])
    assert r.returncode == 0, r.stderr
    raw = (tmp_path / "frame_0000.wig").read_bytes()
    assert raw[:5] == WIG_MAGIC
    grid = read_wig(tmp_path / "frame_0000.wig")
    assert grid.values.shape == (61, 61)
    assert abs(grid.integrate() - 1.0) < 1e-2
    header, rows = _read_csv(tmp_path / "frame_0000.csv")
    assert header == ["q", "p", "W"] and len(rows) == 61 * 61
    # csv and binary carry the same surface
    w_csv = np.array([float(r_[2]) for r_ in rows]).reshape(61, 61)
    assert np.abs(w_csv - grid.values).max() < 1e-9
    header, _ = _read_csv(tmp_path / "marginals_0000.csv")
    assert header == ["q", "prob_q", "p", "prob_p"]
    header, rows = _read_csv(tmp_path / "orbits.csv")
    assert header == ["t", "mu", "q", "p"]
    assert {float(r_[1]) for r_ in rows} == {-1.0, 1.0}


def test_scan_command(tmp_path):
    r = _run(["scan", *COMMON, "--nmax=40",
              "--lambda-fi-grid=-0.5:-0.3:3", f"--out={tmp_path}"])
    assert r.returncode == 0, r.stderr
    header, rows = _read_csv(tmp_path / "scan.csv")
    assert header == ["lambda_fi", "m", "weight_dfunction", "weight_quantum",
                      "period_ode", "period_weak"]
    assert len(rows) == 3 * 2                          # 3 couplings x 2 branches
    for row in rows:
        assert abs(float(row[2]) - float(row[3])) < 0.05
    meta = json.loads((tmp_path / "scan.json").read_text())
    assert abs(meta["lambda_fi_balanced"] - (-24.0 / 65.0)) < 1e-12


def test_second_quench_command(tmp_path):
    r = _run(["second-quench", *COMMON, "--nmax=40", "--switch-time=8",
              "--times=0:6:13", "--grid=151x151", "--extent", "1.8", "1.8",
              f"--out={tmp_path}"])
    assert r.returncode == 0, r.stderr
    _, rows = _read_csv(tmp_path / "timeseries.csv")
    assert len(rows) == 13


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[model]\nj = 0.5\nR = 10\nnmax = 30\n"
        "[quench]\nlambda_in = 1.5\nlambda_fi = -0.4\n"
        "[output]\nformats = csv\n")
    out = tmp_path / "out"
    r = _run(["spectrum", f"--config={cfg}", "--lambda-grid=1.5:1.5:1",
              "--R=12", f"--out={out}"])
    assert r.returncode == 0, r.stderr
    manifest = json.loads((out / "strength.json").read_text())
    assert manifest["config"]["R"] == 12.0             # flag beats file


def test_exit_code_on_bad_config(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\ncoupling = 2.0\n")          # unknown key
    r = _run(["spectrum", f"--config={bad}", f"--out={tmp_path}"])
    assert r.returncode == 1
    assert "config error" in r.stderr
    notini = tmp_path / "notini.cfg"
    notini.write_text(json.dumps({"model": {"j": 0.5}}))  # not INI at all
    r2 = _run(["spectrum", f"--config={notini}", f"--out={tmp_path}"])
    assert r2.returncode == 1
    r3 = _run(["quench", "--j=0.3", f"--out={tmp_path}"])
    assert r3.returncode == 1


def test_read_wig_rejects_wrong_magic(tmp_path):
    p = tmp_path / "junk.wig"
    p.write_bytes(b"NOPE!" + b"\x00" * 64)
    with pytest.raises(ValueError):
        read_wig(p)
