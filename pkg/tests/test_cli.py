import csv
import io
import json
import subprocess
import sys

import pytest

from fomlab.cli import main, table_rows


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_json(capsys):
    code, out, _ = run(capsys, "run", "--method", "ogmg", "-N", "10", "--problem", "quadratic")
    assert code == 0
    doc = json.loads(out)
    assert doc["grad_norm_sq_final"] == pytest.approx(1 / 79.5357825143482, rel=1e-12)
    assert len(doc["per_iter"]) == 11


def test_run_csv_round_trips_floats(capsys):
    code, out, _ = run(capsys, "run", "--method", "gm", "-N", "3", "--problem", "worst:gm-huber", "--csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[-1]["grad_norm_sq"]) == pytest.approx(1 / 7, rel=1e-14)


def test_run_chain_and_fsfom(capsys):
    code, out, _ = run(capsys, "run", "--method", "chain", "-N", "2", "--csv")
    assert code == 0 and len(out.strip().splitlines()) == 4
    a = json.loads(run(capsys, "run", "--method", "fsfom-ogmg", "-N", "5", "--problem", "least_squares")[1])
    b = json.loads(run(capsys, "run", "--method", "ogmg", "-N", "5", "--problem", "least_squares")[1])
    assert a["grad_norm_sq_final"] == pytest.approx(b["grad_norm_sq_final"], rel=1e-9)


def test_problem_file(tmp_path, capsys):
    doc = {"kind": "least_squares", "x0": [1.0, 1.0],
           "data": {"A": [[1.0, 0.0], [0.0, 2.0]], "b": [0.0, 0.0], "fstar": 0.0, "minimizer": [0.0, 0.0]}}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "run", "--method", "gm", "-N", "2", "--problem", str(path))
    assert code == 0
    assert json.loads(out)["L"] == pytest.approx(4.0)


def test_certify_and_dump(tmp_path, capsys):
    h, c = tmp_path / "h.json", tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "--method", "ogmg", "-N", "6", "--dump-triangle", str(h),
                       "--dump-cert", str(c), "--L", "2", "--R", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["feasible"] and doc["N"] == 6
    code, out, _ = run(capsys, "certify", "--triangle", str(h), "--cert", str(c))
    assert code == 0 and json.loads(out)["feasible"]


def test_certify_infeasible_exit_code(tmp_path, capsys):
    h, c = tmp_path / "h.json", tmp_path / "c.json"
    run(capsys, "certify", "--method", "gm", "-N", "4", "--dump-triangle", str(h))
    run(capsys, "certify", "--method", "ogmg", "-N", "4", "--dump-cert", str(c))
    code, out, _ = run(capsys, "certify", "--triangle", str(h), "--cert", str(c))
    assert code == 3
    doc = json.loads(out)
    assert doc["feasible"] is False and doc["bound"] is None


def test_worst(capsys):
    code, out, _ = run(capsys, "worst", "--method", "gm", "-N", "5")
    assert code == 0
    assert json.loads(out)["measured"] == pytest.approx(1 / 11, rel=1e-12)
    code, out, _ = run(capsys, "worst", "--method", "ogmg", "--flavor", "quadratic", "-N", "4", "--csv")
    assert code == 0 and out.splitlines()[1].endswith(",1")


def test_theta(capsys):
    doc = json.loads(run(capsys, "theta", "--variant", "ogmg", "-N", "2")[1])
    assert doc["theta0_sq"] == pytest.approx(8.07830365682409, rel=1e-13)
    assert doc["variant"] == "ogmg_tilde"


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--N-list", "1,10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["N"] for r in rows] == ["1", "10"]
    assert float(rows[1]["ogmg_huber_reciprocal"]) == pytest.approx(79.5358, rel=1e-5)
    r = table_rows([30])[0]
    assert r[3] == pytest.approx(547.810612804233, rel=1e-10)


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--methods", "gm,ogmg,chain", "--N-list", "2,4", "--problem", "logistic")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["method"], r["N"]) for r in rows] == [("gm", "2"), ("gm", "4"), ("ogmg", "2"),
                                                    ("ogmg", "4"), ("chain", "2"), ("chain", "4")]


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    assert run(capsys, "theta", "-N", "3", "--out", str(path))[1] == ""
    assert json.loads(path.read_text())["N"] == 3


@pytest.mark.parametrize("argv", [
    ["run", "-N", "0"],
    ["run", "-N", "3", "--method", "newton"],
    ["run", "-N", "3", "--problem", "nope"],
    ["certify", "--method", "gm"],
    ["certify", "--triangle", "x.json"],
    ["worst", "--method", "gm", "--flavor", "quadratic", "-N", "3"],
    ["sweep", "--methods", "gm,bogus"],
    ["--tol", "psd", "theta", "-N", "2"],
    ["run", "--method", "chain", "-N", "1"],
])
def test_config_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_tolerance_override_makes_worst_fail(capsys):
    code, _, _ = run(capsys, "--tol", "exact=1e-30", "worst", "--method", "ogmg", "-N", "20")
    assert code == 3


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "fomlab", "theta", "-N", "1", "--csv"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines() == ["i,theta", "0,2.0", "1,1.0"]
