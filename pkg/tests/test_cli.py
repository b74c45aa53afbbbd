import json
import math
import subprocess
import sys

import pytest

from bvpdn import cli, problems
from bvpdn.problems import polynomial


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def quartic(tmp_path):
    path = tmp_path / "z22.json"
    problems.dump_problem(problems.manufactured_problem(polynomial([(2, 2, 1.0)])), path)
    return path


@pytest.fixture
def identity(tmp_path):
    path = tmp_path / "id.json"
    problems.dump_problem(problems.manufactured_problem(polynomial([(1, 0, 1.0)])), path)
    return path


def test_bounds_unit_text(capsys):
    code, out, _ = run(["bounds", "--l1", "1", "--l2", "1", "--l3", "1", "--c-abs", "0"], capsys)
    assert code == 0
    rows = dict(line.split(None, 1) for line in out.splitlines())
    assert abs(float(rows["L4"]) - 14.3105) < 1e-4
    assert abs(float(rows["r0"]) - 1.66e-3) < 1e-5
    assert "N3(0.5)" in rows


def test_bounds_all_zero_is_usage_error(capsys):
    code, _, err = run(["bounds", "--l1", "0", "--l2", "0", "--l3", "0", "--c-abs", "0"], capsys)
    assert code == 2 and "L4" in err


def test_bounds_json(capsys):
    code, out, _ = run(["bounds", "--l1", "1", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["L4"] == pytest.approx(4 / math.pi, abs=1e-15)
    assert len(data["N1"]) == len(data["t"]) == 5


@pytest.mark.parametrize("argv", [["bounds", "--l1", "-1"], ["bounds", "--l2", "abc"], ["bounds", "--bogus"], []])
def test_bad_arguments(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bounds_csv_rejected(capsys):
    assert run(["bounds", "--format", "csv"], capsys)[0] == 2


def test_eval_quartic_grid(quartic, capsys):
    code, out, _ = run(["eval", "--problem", str(quartic), "--rmax", "0.5", "--grid", "8"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 65
    header = lines[0].split(",")
    rows = [dict(zip(header, map(float, line.split(",")))) for line in lines[1:]]
    near = min(rows, key=lambda r: abs(complex(r["re_z"], r["im_z"]) - 0.5))
    assert abs(near["re_w"] - 0.0625) <= 1e-4


def test_eval_zero_problem(tmp_path, capsys):
    path = tmp_path / "zero.json"
    problems.dump_problem(problems.zero_problem(), path)
    code, out, _ = run(["eval", "--problem", str(path), "--grid", "3", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and all(r["re_w"] == 0 and r["im_w"] == 0 for r in data["rows"])


def test_eval_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{oops")
    code, _, err = run(["eval", "--problem", str(path)], capsys)
    assert code == 2 and "malformed" in err


def test_eval_missing_file(tmp_path, capsys):
    assert run(["eval", "--problem", str(tmp_path / "none.json")], capsys)[0] == 2


@pytest.mark.parametrize("extra", [["--grid", "0"], ["--rmax", "1.2"]])
def test_eval_bad_grid(quartic, extra, capsys):
    assert run(["eval", "--problem", str(quartic), *extra], capsys)[0] == 2


def test_eval_strict_escalates_warnings(quartic, capsys):
    argv = ["eval", "--problem", str(quartic), "--grid", "2", "--tol", "1e-17"]
    code, _, err = run(argv, capsys)
    assert code == 0 and "warning" in err
    assert run(argv + ["--strict"], capsys)[0] == 3


def test_eval_out_file_is_byte_identical(quartic, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["eval", "--problem", str(quartic), "--grid", "3", "--out", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_oracle(capsys):
    code, out, _ = run(["verify", "--suite", "oracle", "--seed", "7"], capsys)
    assert code == 0 and "all passed" in out


def test_verify_json_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["verify", "--suite", "pde", "--format", "json", "--out", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert all(r["passed"] for r in json.loads(a.read_text())["records"])


def test_verify_unknown_suite(capsys):
    assert run(["verify", "--suite", "nope"], capsys)[0] == 2


def test_verify_failure_exit_code(monkeypatch, capsys):
    from bvpdn import verify

    bad = verify.VerificationReport((verify.CheckRecord("x", 1, -1.0, 0j, False, {}),), 7, verify.QuadConfig())
    monkeypatch.setattr(verify, "run_suite", lambda *a, **k: bad)
    assert run(["verify"], capsys)[0] == 1


def test_landau_radius_only(capsys):
    code, out, _ = run(["landau", "--l1", "1", "--l2", "1", "--l3", "1", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and 0.0015 < data["r0"] < 0.002


def test_landau_identity_problem(identity, capsys):
    code, out, _ = run(["landau", "--problem", str(identity), "--l1", "1", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["collisions"] == 0
    assert abs(data["min_boundary_modulus"] - data["landau"]["r0"]) <= 1e-6


def test_landau_rejects_unnormalized(quartic, capsys):
    code, _, err = run(["landau", "--problem", str(quartic)], capsys)
    assert code == 2 and "J_w" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bvpdn.cli", "bounds", "--l1", "1", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["L4"] == pytest.approx(4 / math.pi)
