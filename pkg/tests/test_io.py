import json

import numpy as np
import pytest

from funmean.convex_core import GridFn
from funmean.errors import DimensionError
from funmean.io import (load_gridfn, load_matrix, matrix_to_json, read_json, save_gridfn,
                        save_matrix, write_json)


def test_gridfn_round_trip(tmp_path):
    f = GridFn(-1.0, 2.0, [np.inf, 1.0, 0.25, 0.5, np.inf])
    p = tmp_path / "f.json"
    save_gridfn(p, f)
    doc = json.loads(p.read_text())
    assert doc["values"][0] == "inf" and doc["lo"] == -1.0
    g = load_gridfn(p)
    assert (g.lo, g.hi) == (f.lo, f.hi)
    assert np.array_equal(g.values, f.values)


def test_csv_is_convexified(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("x,value\n# a tent is replaced by its hull\n-1,0\n0,1\n1,0\n")
    f = load_gridfn(p)
    assert (f.lo, f.hi, f.n) == (-1.0, 1.0, 3)
    assert np.array_equal(f.values, [0.0, 0.0, 0.0])
    g = load_gridfn(p, n=11)
    assert g.n == 11 and np.all(g.values == 0)


def test_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2,3\n")
    with pytest.raises(ValueError):
        load_gridfn(p)
    p.write_text("x,value\n")
    with pytest.raises(ValueError):
        load_gridfn(p)
    p.write_text("0,1\nx,2\n")
    with pytest.raises(ValueError):
        load_gridfn(p)


def test_matrix_round_trip(tmp_path):
    a = np.array([[2.0, 0.5], [0.5, 1.0]])
    p = tmp_path / "a.json"
    save_matrix(p, a)
    assert read_json(p) == {"d": 2, "entries": [2.0, 0.5, 0.5, 1.0]}
    assert np.array_equal(load_matrix(p), a)


def test_indefinite_matrices_can_be_written_but_not_loaded(tmp_path):
    p = tmp_path / "m.json"
    save_matrix(p, [[-8.0]])
    assert read_json(p)["entries"] == [-8.0]
    with pytest.raises(ValueError):
        load_matrix(p)
    with pytest.raises(DimensionError):
        matrix_to_json(np.ones((2, 3)))
    with pytest.raises(ValueError):
        matrix_to_json([[np.nan]])


def test_write_json_to_stdout(capsys):
    write_json("-", {"a": 1})
    assert json.loads(capsys.readouterr().out) == {"a": 1}
    with pytest.raises(ValueError):
        write_json("-", {"a": float("nan")})
