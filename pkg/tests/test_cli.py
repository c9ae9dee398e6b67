import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from arident.cli import EXIT_BANDS, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main

WHITE = ["--lambda", "0.3333333333333333", "--delta2", "4", "--xi2", "9"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_theory_json(capsys):
    code, out, _ = run(capsys, "theory", *WHITE)
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["theory"]["theta_star"] == pytest.approx([1 / 9], rel=1e-12)
    assert d["theory"]["variance"] == pytest.approx(13.5)


def test_theory_csv(capsys):
    code, out, _ = run(capsys, "theory", *WHITE, "--format", "csv")
    assert code == EXIT_OK
    rows = out.splitlines()
    assert rows[0] == "tau,psi"
    np.testing.assert_allclose([float(r.split(",")[1]) for r in rows[1:]], [13.5, 1.5, 0.5], rtol=1e-12)


def test_theory_from_bundled_config(capsys):
    code, out, _ = run(capsys, "theory", "--config", "paper.cfg", "--scenario", "nonzero-iv-b")
    assert code == EXIT_OK
    assert json.loads(out)["theory"]["mean"] == pytest.approx(5.5)


def test_theory_colored_flag(capsys):
    code, out, _ = run(capsys, "theory", "--lambda", "0.3333333333333333", "--noise", "colored:-0.5",
                       "--delta2", "1", "--xi2", "9")
    assert code == EXIT_OK
    assert json.loads(out)["theory"]["theta_star"][0] == pytest.approx(-1 / 47, rel=1e-12)


def test_simulate_csv_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", *WHITE, "--n", "50", "--seed", "3")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "t,y" and len(lines) == 51 and lines[1].startswith("1,")
    code, out2, _ = run(capsys, "simulate", *WHITE, "--n", "50", "--seed", "3", "--format", "json")
    d = json.loads(out2)
    assert d["t"][0] == 1 and len(d["y"]) == 50
    assert d["y"][0] == float(lines[1].split(",")[1])
    path = tmp_path / "traj.csv"
    assert main(["simulate", *WHITE, "--n", "50", "--seed", "3", "--out", str(path)]) == EXIT_OK
    assert path.read_text() == out


def test_fit_plain(capsys):
    code, out, _ = run(capsys, "fit", *WHITE, "--n", "2000", "--order", "2", "--seed", "1")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["order"] == 2 and len(d["coeffs"]) == 2


def test_fit_single_scenario(capsys):
    code, out, _ = run(capsys, "fit", "--config", "paper.cfg", "--scenario", "white-ar1-single-N")
    assert code == EXIT_OK
    assert json.loads(out)["notes"]


def test_batch_outputs(capsys):
    code, out, _ = run(capsys, "batch", *WHITE, "--kappa", "4", "--n", "300", "--order", "2",
                       "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "batch_index,phi1,phi2" and lines[1].startswith("0,") and len(lines) == 5
    code, out, _ = run(capsys, "batch", *WHITE, "--kappa", "4", "--n", "300")
    d = json.loads(out)
    assert set(d) == {"order", "kappa", "n", "emp_mean", "emp_variance"}


def test_batch_workers_identical(capsys):
    _, a, _ = run(capsys, "batch", *WHITE, "--kappa", "8", "--n", "300", "--seed", "9")
    _, b, _ = run(capsys, "batch", *WHITE, "--kappa", "8", "--n", "300", "--seed", "9", "--workers", "4")
    assert a == b


def test_series(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "series", *WHITE, "--kappa", "5", "--n", "300", "--order", "2",
                     "--out", str(path))
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == ["batch", "phi1", "phi2", "running_mean1", "running_mean2",
                       "running_var1", "running_var2"]
    assert len(rows) == 6


def test_validation_exit_codes(capsys):
    code, _, err = run(capsys, "batch", *WHITE, "--kappa", "1")
    assert code == EXIT_VALIDATION and "kappa" in err
    code, _, err = run(capsys, "theory", "--lambda", "1.2")
    assert code == EXIT_VALIDATION
    code, _, err = run(capsys, "reproduce")
    assert code == EXIT_VALIDATION and "--config" in err
    code, _, _ = run(capsys, "theory", "--config", "paper.cfg", "--scenario", "nope")
    assert code == EXIT_VALIDATION


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[scenario.x]\nlambda = 0.5\nmode = batch\nkappa = 1\n")
    code, _, err = run(capsys, "reproduce", "--config", str(cfg))
    assert code == EXIT_VALIDATION
    assert "[scenario.x] kappa" in err


def test_numerical_exit_code(capsys):
    code, _, err = run(capsys, "fit", "--lambda", "0", "--delta2", "0", "--xi2", "0", "--n", "50")
    assert code == EXIT_NUMERICAL
    assert "infinitely many" in err


def test_reproduce_band_failure(capsys, tmp_path):
    cfg = tmp_path / "tight.cfg"
    cfg.write_text(
        "[scenario.tight]\nlambda = 0.3333333333333333\nq_variance = 4\nv_variance = 9\n"
        "kappa = 20\nmean_tol = 0.0000001\n"
    )
    code, out, _ = run(capsys, "reproduce", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == EXIT_BANDS
    assert out.startswith("FAIL  tight")
    assert (tmp_path / "o" / "tight.json").exists()


def test_reproduce_bundled_subset(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--config", "paper.cfg", "--scenario", "colored-ar1-N",
                       "--out", str(tmp_path))
    assert code == EXIT_OK
    assert out.startswith("PASS  colored-ar1-N")
    d = json.loads((tmp_path / "colored-ar1-N.json").read_text())
    assert d["passed"] is True


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "arident.cli", "theory", *WHITE, "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "tau,psi"
