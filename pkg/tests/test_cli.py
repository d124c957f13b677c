import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dancing import suites
from dancing.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, MATE_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_all_is_deterministic(tmp_path):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        assert main(["verify", "--suite", "all", "--seed", "7", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    data = json.loads(paths[0].read_text())
    assert data["schema"] == 1 and data["all_pass"] and data["seed"] == 7
    names = [c["name"] for c in data["checks"]]
    assert names == sorted(names)


def test_verify_symmetry_reports_dimension(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "symmetry")
    assert code == EXIT_OK
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["symmetry.algebra_dimension14"]["pass"]


def test_verify_curvature_reports_scalar(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "curvature", "--seed", "3")
    assert code == EXIT_OK
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["curvature.scalar_minus12"]["residual"] < 1e-3


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--suite", "bogus")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--tol", "-1")[0] == EXIT_USAGE
    assert run(capsys, "mates", "--const", "0")[0] == EXIT_USAGE
    assert run(capsys, "wcurve", "--family", "Y3", "--param", "2")[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE


def test_failing_check_exits_one(capsys, monkeypatch):
    monkeypatch.setitem(suites.SUITES, "octonion", (0, lambda rng, tol: [suites.Check("x.fail", 1.0, 0.5)]))
    code, out, err = run(capsys, "verify", "--suite", "octonion")
    assert code == EXIT_FAIL
    assert "FAIL x.fail" in err
    assert json.loads(out)["all_pass"] is False


def test_nonfinite_residual_fails():
    assert not suites.Check("n", float("nan"), 1.0).passed
    assert not suites.Check("n", float("inf"), 1.0, above=True).passed
    assert suites.Check("n", 2.0, 1.0, above=True).passed


def test_unknown_suite_raises():
    with pytest.raises(KeyError):
        suites.run_suite("nope")


def test_integrate(capsys, tmp_path):
    code, out, err = run(capsys, "integrate", "--seed", "2", "--t1", "5")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "q1", "q2", "q3", "p1", "p2", "p3"]
    vals = np.array(rows[1:], float)
    assert vals[0, 0] == 0.0 and vals[-1, 0] == 5.0
    assert np.abs(np.einsum("ij,ij->i", vals[:, 1:4], vals[:, 4:]) - 1).max() < 1e-9
    target = tmp_path / "traj.csv"
    assert main(["integrate", "--seed", "2", "--t1", "5", "--out", str(target)]) == EXIT_OK
    assert target.read_text().splitlines()[0] == "t,q1,q2,q3,p1,p2,p3"


def test_integrate_blowup_is_reported(capsys):
    code, _, err = run(capsys, "integrate", "--amplitude", "1")
    assert code == EXIT_FAIL
    assert "error" in err


def test_mates_csv_and_svg(capsys, tmp_path):
    svg = tmp_path / "m.svg"
    code, out, _ = run(capsys, "mates", "--circle", "--y0", "1", "--y1", "0", "--y2", "1", "--svg", str(svg))
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == MATE_HEADER
    res = np.array([float(r[-1]) for r in rows[1:]])
    assert res.max() < 1e-7
    theta = np.array([float(r[0]) for r in rows[1:]])
    assert np.all(np.diff(theta) >= 0)
    assert svg.read_text().count('class="mate"') >= 1


def test_mates_stop_at_zero(capsys):
    assert run(capsys, "mates", "--y0", "1", "--y1", "-10", "--y2", "0")[0] == EXIT_FAIL
    code, _, err = run(capsys, "mates", "--y0", "1", "--y1", "-10", "--y2", "0", "--stop-at-zero")
    assert code == EXIT_OK and "stopped" in err


def test_wcurve_y3_prints_zero(capsys):
    code, out, _ = run(capsys, "wcurve", "--family", "Y3")
    assert code == EXIT_OK
    kappa = [l for l in out.splitlines() if l.startswith("kappa ")]
    assert kappa[0] == "kappa 0"
    assert kappa[1] == "kappa closed form 0"
    assert abs(float(kappa[2].split()[2])) < 1e-10
    assert "l^3 + (0) l + (-1)" in out


def test_wcurve_y1_kappa(capsys, tmp_path):
    code, out, _ = run(capsys, "wcurve", "--family", "y1", "--param", "1", "--out", str(tmp_path / "w.csv"))
    assert code == EXIT_OK
    kappa = float(out.split("kappa ")[1].split()[0])
    assert kappa == pytest.approx(-(32 ** (-1 / 3)), abs=1e-14)
    assert (tmp_path / "w.csv").read_text().startswith("t,q1")


def test_circle_mates_figure(capsys):
    code, out, _ = run(capsys, "figure", "circle-mates")
    assert code == EXIT_OK
    assert out.startswith("<svg") and out.rstrip().endswith("</svg>")
    assert out.count('class="mate"') >= 8
    assert out.count('class="base"') == 1


@pytest.mark.parametrize("name", ["wcurve", "rolling"])
def test_other_figures(capsys, tmp_path, name):
    target = tmp_path / f"{name}.svg"
    assert main(["figure", name, "--svg", str(target)]) == EXIT_OK
    assert "<polyline" in target.read_text()


def test_curvature_command(capsys):
    code, out, _ = run(capsys, "curvature", "--point", "0", "0", "0", "1")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["point"] == [0, 0, 0, 1]
    assert data["petrov"] == "D"
    assert data["scalar"] == pytest.approx(-12, abs=1e-3)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("DANCING_THREADS", "1")
    assert suites._threads() == 1
    a = suites.report_json(suites.run_suite("metric", 5), "metric", 5)
    monkeypatch.setenv("DANCING_THREADS", "3")
    assert suites._threads() == 3
    b = suites.report_json(suites.run_suite("metric", 5), "metric", 5)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dancing.cli", "verify", "--suite", "octonion"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["suite"] == "octonion"
