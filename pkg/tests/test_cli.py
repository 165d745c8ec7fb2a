import csv
import json
import subprocess
import sys

import pytest

from subspace_approx.cli import load_params, main, parse_range


def test_cd_prints_bound(capsys):
    assert main(["cd", "--d", "1", "--q", "1"]) == 0
    out = capsys.readouterr().out
    assert "3.73205" in out


def test_cd_command_flag_form(capsys):
    assert main(["--command", "cd", "--d", "2", "--q", "1", "--tol", "1/1000"]) == 0
    assert "10.0" in capsys.readouterr().out


def test_cd_needs_d_and_q(capsys):
    assert main(["cd", "--d", "1"]) == 2
    assert main(["cd", "--d", "1", "--q", "1", "--tol", "0"]) == 2
    assert main(["cd", "--d", "1", "--q", "1", "--tol", "abc"]) == 2


def test_missing_or_conflicting_command(capsys):
    assert main([]) == 2
    assert main(["cd", "--command", "verify"]) == 2


def test_verify_default_passes(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--params", "d1_q1", "--out", str(out), "--threads", "1"]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert all(c["passed"] for c in rep["checks"])


def test_verify_csv(tmp_path):
    out = tmp_path / "v.csv"
    assert main(["verify", "--params", "d1_q1", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and set(rows[0]) == {"name", "passed", "detail"}


def test_verify_fails_on_corrupted_digit(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(["verify", "--params", "d1_q2", "--corrupt-digit", "1:1:5", "--out", str(out)])
    assert code == 1
    assert "FAILED zbasis" in capsys.readouterr().err
    assert json.loads(out.read_text())["passed"] is False


def test_exponents_csv(tmp_path):
    out = tmp_path / "e.csv"
    code = main(["exponents", "--params", "d1_q2", "--n-range", "1..2", "--e", "2", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["N"] for r in rows] == ["1", "2"]
    assert all(r["target"] == "16" and r["family"] == "C" for r in rows)
    assert float(rows[-1]["rel_gap"]) < 0.15


def test_exponents_gap_failure_exits_one(tmp_path):
    out = tmp_path / "e.csv"
    args = ["exponents", "--params", "d1_q2", "--n-range", "0..0", "--e", "2", "--max-gap", "1/1000000000"]
    code = main(args + ["--out", str(out)])
    assert code == 1


def test_exponents_config_errors(tmp_path, capsys):
    assert main(["exponents", "--params", "d1_q2", "--n-range", "1..5"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["exponents", "--params", "d1_q2", "--e", "7"]) == 2
    assert main(["exponents", "--params", "d1_q2", "--n-range", "3..1"]) == 2
    assert main(["exponents", "--params", "d1_q2", "--threads", "0"]) == 2


def test_bad_params_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "q": 1, "theta": 5, "alpha": "4", "M": 4}))
    assert main(["verify", "--params", str(bad)]) == 2
    assert main(["verify", "--params", str(tmp_path / "missing.json")]) == 2
    bad.write_text("{not json")
    assert main(["verify", "--params", str(bad)]) == 2


def test_oracle(tmp_path):
    out = tmp_path / "o.json"
    assert main(["oracle", "--qmax", "1000", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["violations"] == []
    assert 5 in [r["b"] for r in rep["records"]]
    # a margin below alpha is beaten by the record denominators
    assert main(["oracle", "--qmax", "1000", "--margin", "-1", "--out", str(out)]) == 1


def test_shipped_configs_load():
    assert load_params("d1_q2").q == 2
    assert load_params("d2_q1").d == 2
    assert load_params("d1_q1").M == 4


def test_parse_range():
    assert parse_range("2..4") == (2, 3, 4)
    assert parse_range("3") == (3,)


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "subspace_approx", "cd", "--d", "1", "--q", "2"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert "C_d" in out.stdout


@pytest.mark.slow
def test_exponents_default_d2_q1_passes(tmp_path):
    out = tmp_path / "e.json"
    assert main(["exponents", "--params", "d2_q1", "--format", "json", "--threads", "1", "--out", str(out)]) == 0
    est = json.loads(out.read_text())["estimates"]
    assert {(e["family"], e["e"]) for e in est} == {("D", 1), ("C", 2), ("D", 2)}
    assert all(float(e["rel_gap"]) < 0.15 for e in est)
