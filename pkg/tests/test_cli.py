import json
import subprocess
import sys

import numpy as np
import pytest

import funmean.verify.core as core
from funmean.cli import REPORT_SCHEMA, build_report, main
from funmean.convex_core import GridFn
from funmean.io import load_gridfn, load_matrix, save_gridfn, save_matrix
from funmean.verify import Tally


@pytest.fixture
def pair(tmp_path):
    f = GridFn.from_function(lambda x: x * x, -1, 1, 65)
    g = GridFn.from_function(lambda x: np.exp(x) + np.abs(x - 0.3), -1, 1, 65)
    save_gridfn(tmp_path / "f.json", f)
    save_gridfn(tmp_path / "g.json", g)
    return tmp_path / "f.json", tmp_path / "g.json"


@pytest.fixture
def matrices(tmp_path):
    save_matrix(tmp_path / "a.json", np.diag([1.0, 4.0]))
    save_matrix(tmp_path / "b.json", np.diag([9.0, 1.0]))
    return tmp_path / "a.json", tmp_path / "b.json"


def _is_convex_gridfn(f):
    fin = f.finite
    assert fin.any()
    idx = np.flatnonzero(fin)
    assert np.all(np.diff(idx) == 1)
    d2 = np.diff(f.values[fin], 2)
    return np.all(d2 >= -1e-9 * max(1.0, np.abs(f.values[fin]).max()))


# --- conjugate and means ----------------------------------------------------------


def test_conjugate(pair, tmp_path):
    out = tmp_path / "fs.json"
    assert main(["conjugate", "--in", str(pair[0]), "--out", str(out),
                 "--dual", "-2", "2", "41"]) == 0
    fs = load_gridfn(out)
    assert (fs.lo, fs.hi, fs.n) == (-2.0, 2.0, 41)
    # inside [-2, 2] every slope is attained, so f* = s^2 / 4 up to O(h^2)
    assert np.allclose(fs.values, fs.x ** 2 / 4, atol=2e-3)


def test_conjugate_from_csv(tmp_path):
    src = tmp_path / "f.csv"
    src.write_text("x,value\n-1,1\n0,0.5\n1,0\n")
    out = tmp_path / "fs.json"
    assert main(["conjugate", "--in", str(src), "--out", str(out), "--n", "5"]) == 0
    assert _is_convex_gridfn(load_gridfn(out))


@pytest.mark.parametrize("argv", [
    ["--kind", "arith"], ["--kind", "harm", "--lambda", "0.3"],
    ["--kind", "geom", "--lambda", "0.7", "--nodes", "16"],
    ["--kind", "log"], ["--kind", "log", "--route", "geo", "--nodes", "16"],
    ["--kind", "G", "--lambda", "0.4", "--s", "0.5", "--nodes", "16"],
    ["--kind", "U", "--s", "0.5", "--nodes", "16"],
])
def test_mean_outputs_are_convex_grid_functions(pair, tmp_path, argv):
    out = tmp_path / "m.json"
    assert main(["mean", *argv, "--in", str(pair[0]), str(pair[1]), "--out", str(out)]) == 0
    res = load_gridfn(out)
    assert res.n == 65 and _is_convex_gridfn(res)
    f, g = load_gridfn(pair[0]), load_gridfn(pair[1])
    # every mean in the list lies below the arithmetic mean of its operands
    lam = 0.5
    if "--lambda" in argv:
        lam = float(argv[argv.index("--lambda") + 1])
    assert np.all(res.values <= (1 - lam) * f.values + lam * g.values + 1e-6)


def test_mean_of_equal_inputs_is_the_input(pair, tmp_path):
    out = tmp_path / "m.json"
    assert main(["mean", "--kind", "log", "--in", str(pair[1]), str(pair[1]),
                 "--out", str(out)]) == 0
    assert np.allclose(load_gridfn(out).values, load_gridfn(pair[1]).values, atol=1e-10)


@pytest.mark.parametrize("argv", [
    ["--kind", "G", "--lambda", "0.5"],
    ["--kind", "arith", "--lambda", "1.5"],
    ["--kind", "G", "--lambda", "1.0", "--s", "0.5"],
    ["--kind", "geom", "--nodes", "0"],
    ["--kind", "cubic"],
])
def test_mean_usage_errors(pair, tmp_path, argv):
    out = tmp_path / "m.json"
    assert main(["mean", *argv, "--in", str(pair[0]), str(pair[1]), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_input_is_a_usage_error(tmp_path):
    assert main(["conjugate", "--in", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.json")]) == 2


# --- operator means ---------------------------------------------------------------


@pytest.mark.parametrize("kind, want", [
    ("arith", [5.0, 2.5]), ("harm", [1.8, 1.6]), ("geom", [3.0, 2.0]),
    ("parallel", [0.9, 0.8]), ("log", [8 / np.log(9), 3 / np.log(4)]),
])
def test_opmean(matrices, tmp_path, kind, want):
    out = tmp_path / "m.json"
    assert main(["opmean", "--kind", kind, "--in", str(matrices[0]), str(matrices[1]),
                 "--out", str(out)]) == 0
    assert np.allclose(load_matrix(out), np.diag(want), atol=1e-13)


def test_opmean_diamond_may_be_indefinite(tmp_path):
    save_matrix(tmp_path / "a.json", [[1.0]])
    save_matrix(tmp_path / "b.json", [[0.1]])
    out = tmp_path / "d.json"
    assert main(["opmean", "--kind", "diamond", "--in", str(tmp_path / "a.json"),
                 str(tmp_path / "b.json"), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["d"] == 1 and doc["entries"][0] == pytest.approx(-8.0, abs=1e-13)


def test_opmean_dimension_mismatch(matrices, tmp_path):
    save_matrix(tmp_path / "c.json", np.eye(3))
    assert main(["opmean", "--kind", "arith", "--in", str(matrices[0]),
                 str(tmp_path / "c.json"), "--out", str(tmp_path / "o.json")]) == 2


# --- quadcheck ------------------------------------------------------------------------


def test_quadcheck_to_stdout(capsys):
    assert main(["quadcheck"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] is True
    assert {"measures", "phi", "integrals", "i_s", "I"} <= set(doc)
    assert len(doc["i_s"]) == 9
    assert all(r["in_bounds"] for r in doc["i_s"])


def test_quadcheck_to_file(tmp_path):
    out = tmp_path / "q.json"
    assert main(["quadcheck", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["integrals"]["all_asserted_pass"] is True


# --- verify ------------------------------------------------------------------------


@pytest.fixture
def broken_suite(monkeypatch):
    def trial(rng, cfg):
        t = Tally()
        t.leq(np.array([1.0]), np.array([0.0]))
        return t

    s = core.Suite("always-broken", ("999",), "test", trial, lambda cfg: 1e-9, {}, "fails")
    monkeypatch.setitem(core._REGISTRY, "always-broken", s)
    return s


def test_verify_pass_writes_json(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "chain-440", "--trials", "5", "--seed", "42",
                 "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True and doc["suites"][0]["suite_name"] == "chain-440"
    assert "PASS chain-440" in capsys.readouterr().err


def test_verify_violation_exit_code(broken_suite, capsys):
    assert main(["verify", "--suite", "always-broken", "--trials", "2", "--seed", "0"]) == 1
    assert "FAIL always-broken" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["--suite", "no-such-suite", "--trials", "2", "--seed", "0"],
    ["--suite", "chain-440", "--trials", "0", "--seed", "0"],
    ["--suite", "chain-440", "--trials", "2"],
])
def test_verify_usage_errors(argv):
    assert main(["verify", *argv]) == 2


def test_no_command_is_a_usage_error():
    assert main([]) == 2


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "verify" in capsys.readouterr().out


@pytest.mark.slow
def test_verify_all_suites():
    assert main(["verify", "--suite", "all", "--trials", "50", "--seed", "1"]) == 0


# --- report ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_report():
    return build_report(trials=2, seed=5)


def test_report_schema(small_report):
    doc = json.loads(json.dumps(small_report))
    assert doc["schema"] == REPORT_SCHEMA
    assert doc["passed"] is True
    assert set(doc["nodes"]) >= {"nu", "mu", "lebesgue"}
    for key, entry in doc["tags"].items():
        assert key.startswith("(") and key.endswith(")")
        assert set(entry) == {"pass", "margin", "checks"}
        assert entry["pass"] is True and entry["checks"]
    assert "(547)" in doc["tags"] and "(440)" in doc["tags"]
    assert len(doc["suites"]) == len(core.suites())


def test_report_failure_propagates(broken_suite, capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["report", "--seed", "1", "--trials", "1", "--out", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert doc["passed"] is False
    assert doc["tags"]["(999)"]["pass"] is False
    assert doc["tags"]["(999)"]["margin"] == pytest.approx(-1.0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "funmean", "opmean", "--kind", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
