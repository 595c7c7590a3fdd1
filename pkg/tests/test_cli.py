import json
import subprocess
import sys

import numpy as np
import pytest

from helpers import random_instance
from lyapopt import cli
from lyapopt.dual import ascend
from lyapopt.scenario import FIXTURE_DIR, save_scenario


def fx(name):
    return str(FIXTURE_DIR / f"{name}.json")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_s1_oracle(capsys):
    code, out, _ = run(["solve", fx("S1"), "--oracle"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["gap"] == 0 and rep["oracleOptimum"] == 0.125 and rep["primalCost"] == 0.125
    assert rep["certificate"]["verdict"] == "optimal"
    assert set(rep) >= {"dualValue", "primalCost", "gap", "adjoint", "policy", "certificate", "oracleOptimum"}


def test_solve_missing(capsys):
    code, out, err = run(["solve", "missing.json"], capsys)
    assert code == 2 and out == "" and "missing.json" in err


def test_solve_invalid(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dim": 1}))
    code, _, err = run(["solve", str(p)], capsys)
    assert code == 2 and "space" in err


def test_solve_s3_gap(capsys):
    code, out, _ = run(["solve", fx("S3")], capsys)
    assert code == 3 and json.loads(out)["gap"] == pytest.approx(0.25)


def test_solve_infeasible(tmp_path, capsys):
    from lyapopt.constraints import Singleton
    from lyapopt.scenario import load_fixture

    p = tmp_path / "inf.json"
    save_scenario(load_fixture("S1").with_constraint(Singleton([0.3])), p)
    code, out, _ = run(["solve", str(p), "--oracle"], capsys)
    rep = json.loads(out)
    assert code == 4 and rep["primalCost"] is None and rep["oracleFeasible"] is False


def test_solve_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["solve", fx("S2"), "--out", str(a), "--oracle"]) == 0
    assert cli.main(["solve", fx("S2"), "--out", str(b), "--oracle"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_exit_codes_match_status(tmp_path, capsys):
    rng = np.random.default_rng(11)
    for k in range(8):
        s = random_instance(rng, max_atoms=5)
        p = tmp_path / f"r{k}.json"
        save_scenario(s, p)
        code, out, _ = run(["solve", str(p)], capsys)
        status = ascend(s).status
        assert code == {"solved": 0, "gapOpen": 3, "infeasible": 4}[status]
        assert json.loads(out)["status"] == status


def test_sweep_value(capsys):
    code, out, _ = run(["sweep", "value", fx("S1"), "--grid", "-0.5:0.25:0.5"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x1,lower,upper,status" and len(lines) == 6
    uppers = [float(line.split(",")[2]) for line in lines[1:]]
    assert uppers == pytest.approx([0, 1 / 32, 4 / 32, 9 / 32, 16 / 32], abs=1e-15)


def test_sweep_value_workers_env(capsys, monkeypatch):
    _, serial, _ = run(["sweep", "value", fx("S1"), "--grid=-0.5:0.25:0.5"], capsys)
    monkeypatch.setenv(cli.WORKERS_ENV, "3")
    _, parallel, _ = run(["sweep", "value", fx("S1"), "--grid", "-0.5:0.25:0.5"], capsys)
    assert serial == parallel
    monkeypatch.setenv(cli.WORKERS_ENV, "many")
    assert run(["sweep", "value", fx("S1"), "--grid", "0"], capsys)[0] == 2


@pytest.mark.parametrize("spec", ["bogus", "0:0:1", "1:0.1:0", "0:1:2,0:1:2", ""])
def test_sweep_value_bad_grid(spec, capsys):
    code, _, err = run(["sweep", "value", fx("S1"), "--grid", spec], capsys)
    assert code == 2 and err


def test_parse_grid_product():
    g = cli.parse_grid("0:0.5:1,2", 2)
    assert [p.tolist() for p in g] == [[0, 2], [0.5, 2], [1, 2]]


def test_sweep_lyapunov(capsys):
    code, out, _ = run(["sweep", "lyapunov", fx("S1"), "--levels", "3"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "level,atomCount,deficit,sampleCount" and len(lines) == 4
    d = [float(line.split(",")[2]) for line in lines[1:]]
    assert d[0] >= d[1] >= d[2]


def test_certify(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"policy": [1, 1, 0, 0], "adjoint": [0.5]}))
    code, out, _ = run(["certify", fx("S1"), str(p)], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "optimal"
    p.write_text(json.dumps({"policy": [0, 0, 1, 1], "adjoint": [0.5]}))
    code, out, _ = run(["certify", fx("S1"), str(p)], capsys)
    assert code == 3 and json.loads(out)["suboptimalityBound"] == pytest.approx(0.25)
    p.write_text(json.dumps({"policy": [1, 0, 0, 0], "adjoint": [0.5]}))
    code, out, _ = run(["certify", fx("S1"), str(p)], capsys)
    assert code == 4 and json.loads(out)["feasResidual"] == pytest.approx(0.25)
    p.write_text(json.dumps({"policy": [1, 0]}))
    assert run(["certify", fx("S1"), str(p)], capsys)[0] == 2


def test_round(tmp_path, capsys):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"weights": [[0.5, 0, 0.5]]}))
    code, out, _ = run(["round", fx("S3"), str(p)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["policy"] == [0, 2] and rep["pureIntegral"] == [-0.25, 0.5]
    assert rep["scenario"]["space"] == {"uniform": 2}
    p.write_text(json.dumps([[0.7, 0.7, 0]]))
    assert run(["round", fx("S3"), str(p)], capsys)[0] == 2


def test_demo(capsys):
    code, out, _ = run(["demo"], capsys)
    assert code == 0
    assert "S1: atoms=4 status=solved" in out and "S3: atoms=1 status=gapOpen" in out
    assert "S3 refined x2: atoms=2 status=solved" in out


def test_fixtures_export(tmp_path, capsys):
    assert cli.main(["fixtures", str(tmp_path / "fx")]) == 0
    code, _, _ = run(["solve", str(tmp_path / "fx" / "S1.json")], capsys)
    assert code == 0


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["solve", fx("S1"), "--max-iter", "zero"], capsys)[0] == 2
    assert run(["solve", fx("S1"), "--max-iter", "0"], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "rep.json"
    proc = subprocess.run([sys.executable, "-m", "lyapopt", "solve", fx("S1"), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(out.read_text())["primalCost"] == 0.125
