import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from curvelab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_quadratic_row_count(tmp_path):
    assert main(["run", "--config", str(CONFIGS / "quadratic_gd.json"), "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "trajectory.csv")
    assert len(r) == 51
    assert list(r[0]) == ["n", "value", "gradnorm", "x_0", "x_1"]
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["convex_curve"] and report["regime"] == "convex_guaranteed"


def test_run_twostep_reports_violation(tmp_path):
    assert main(["run", "--config", str(CONFIGS / "twostep_counterexample.json"),
                 "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["first_convexity_violation"] == 1
    assert report["convex_curve"] is False


def test_run_divergence_is_not_an_error(tmp_path):
    cfg = write(tmp_path, "c.json", {"objective": {"kind": "scaled1d", "L": 1.0}, "scheme": "gd",
                                     "x0": [1.0], "eta": 1e6, "steps": 300})
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["diverged_at"] is not None


@pytest.mark.parametrize("data", [
    "{not json",
    {"objective": {"kind": "scaled1d", "L": 1.0}, "scheme": "gd", "x0": [1.0], "eta": 0.1},
    {"objective": {"kind": "scaled1d", "L": 1.0}, "scheme": "gd", "x0": [1.0], "eta": 0.1,
     "steps": 5, "theta": 0.2},
    {"objective": {"kind": "scaled1d", "L": 1.0}, "scheme": "inexact", "x0": [1.0], "eta": 0.1,
     "steps": 2, "delta": 0.1, "epsilons": [0.5, 0.0]},
    {"objective": {"kind": "cubic"}, "scheme": "gd", "x0": [1.0], "eta": 0.1, "steps": 5},
])
def test_run_bad_config_exit_2(tmp_path, data):
    p = tmp_path / "bad.json"
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_verify_suite_and_unknown(capsys):
    assert main(["verify", "twostep"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert main(["verify", "bogus"]) == 2


def test_sweep_quadratic_convex_up_to_two_over_L(tmp_path):
    assert main(["sweep", "--config", str(CONFIGS / "sweep_eta_quadratic.json"),
                 "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "sweep_eta_quadratic.csv")
    assert len(r) == 11
    assert all(row["convex_curve"] == "True" for row in r)


def test_sweep_inexact_violation_near_zero(tmp_path):
    assert main(["sweep", "--config", str(CONFIGS / "sweep_delta_eta_inexact.json"),
                 "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "sweep_delta_eta_inexact.csv")
    assert len(r) == 25 * 5
    smallest = [row for row in r if float(row["eta"]) == 0.01]
    assert all(row["convex_curve"] == "False" for row in smallest)


def test_sweep_single_point_and_L_axis(tmp_path):
    cfg = write(tmp_path, "s.json", {"grid": {"eta": [0.5]}, "steps": 5})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert len(rows(tmp_path / "sweep.csv")) == 1
    cfg = write(tmp_path, "s2.json", {"grid": {"eta": [0.5, 1.0], "L": [1.0, 2.0, 4.0]},
                                      "steps": 5, "output": "l.csv"})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert [row["regime"] for row in rows(tmp_path / "l.csv")][-1] == "unstable"


@pytest.mark.parametrize("grid", [{"eta": []}, {"delta": [0.1]}, {"eta": [0.1], "bogus": [1]},
                                  {"eta": [0.1], "delta": [0.1], "theta": [0.1]}])
def test_sweep_bad_grid_exit_2(tmp_path, grid):
    cfg = write(tmp_path, "s.json", {"grid": grid, "scheme": "inexact", "delta": 0.1})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_search_deterministic_bytes(tmp_path):
    cfg = str(CONFIGS / "search_default.json")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["search", "--config", cfg, "--out", str(a), "--seed", "4"]) == 0
    assert main(["search", "--config", cfg, "--out", str(b), "--seed", "4"]) == 0
    assert (a / "search_result.json").read_bytes() == (b / "search_result.json").read_bytes()


def test_search_control_not_found(tmp_path):
    assert main(["search", "--config", str(CONFIGS / "search_control.json"),
                 "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "search_control.json").read_text())["found"] is False


def test_search_and_replay(tmp_path):
    cfg = str(CONFIGS / "search_default.json")
    assert main(["search", "--config", cfg, "--out", str(tmp_path), "--replay"]) == 0
    result = tmp_path / "search_result.json"
    assert json.loads(result.read_text())["found"]
    assert main(["replay", "--config", str(result)]) == 0
    witness = tmp_path / "w.json"
    witness.write_text(json.dumps(json.loads(result.read_text())["witness"]))
    assert main(["replay", "--config", str(witness)]) == 0


def test_replay_rejects_empty_result(tmp_path):
    cfg = write(tmp_path, "r.json", {"found": False, "witness": None, "candidates_examined": 3})
    assert main(["replay", "--config", cfg]) == 2


def test_search_bad_config(tmp_path):
    cfg = write(tmp_path, "s.json", {"L": 1.0, "eta_range": [1.5, 1.9]})
    assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 2
    cfg = write(tmp_path, "s2.json", {"L": 1.0, "eta_range": [1.8, 1.9], "colour": 3})
    assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "curvelab", "verify", "local"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "3/3 checks passed" in proc.stdout
