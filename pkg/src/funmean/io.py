"""Reading and writing grid functions and matrices.

Grid functions are JSON ``{"lo", "hi", "values"}`` with ``"inf"`` standing
for +inf, or CSV ``x,value`` rows that are convexified onto a uniform grid.
Matrices are JSON ``{"d", "entries"}`` in row-major order.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .convex_core import GridFn, SpdMatrix, convexify
from .errors import DimensionError

__all__ = ["load_gridfn", "save_gridfn", "load_matrix", "save_matrix", "matrix_to_json",
           "read_json", "write_json"]


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, doc) -> None:
    text = json.dumps(doc, indent=2, allow_nan=False)
    if path is None or str(path) == "-":
        print(text)
        return
    Path(path).write_text(text + "\n", encoding="utf-8")


def _csv_points(path) -> np.ndarray:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row if c.strip()]
            if not cells or cells[0].startswith("#"):
                continue
            if len(cells) != 2:
                raise ValueError(f"{path}: expected 'x,value' rows, got {row!r}")
            try:
                rows.append((float(cells[0]), float(cells[1])))
            except ValueError:
                if rows:  # only the first row may be a header
                    raise
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows)


def load_gridfn(path, n: int | None = None) -> GridFn:
    """Load a grid function from ``.json`` or ``.csv``.

    CSV points go through :func:`convexify` on ``[min x, max x]`` with ``n``
    nodes (default: one per row).
    """
    if str(path).lower().endswith(".csv"):
        return convexify(_csv_points(path), n=n)
    return GridFn.from_json(read_json(path))


def save_gridfn(path, f: GridFn) -> None:
    write_json(path, f.to_json())


def load_matrix(path) -> np.ndarray:
    """Load a validated SPD matrix as an array."""
    return SpdMatrix.from_json(read_json(path)).entries


def matrix_to_json(a) -> dict:
    """Row-major JSON for any square symmetric matrix, positive or not."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not all(math.isfinite(v) for v in a.ravel()):
        raise ValueError("matrix entries must be finite")
    return {"d": int(a.shape[0]), "entries": [float(v) for v in a.ravel()]}


def save_matrix(path, a) -> None:
    write_json(path, matrix_to_json(a))
