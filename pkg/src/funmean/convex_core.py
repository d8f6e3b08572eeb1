"""Sampled convex functions on a 1-D box and quadratic forms of SPD matrices.

A :class:`GridFn` stores values on a uniform grid over ``[lo, hi]``; nodes
outside the effective domain hold ``+inf``. Between finite nodes the function
is the piecewise-linear interpolant, and outside the box it is ``+inf``, so a
grid function approximates ``f + indicator([lo, hi])`` rather than ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, ImproperError, NotConvexError
from .extreal import ExtReal, array_from_json, array_to_json, ext_add
from .linalg import sym_eig, symmetrize

__all__ = [
    "GridFn", "Samples", "SpdMatrix", "QuadraticFn", "SlopeInterval",
    "eval", "eval_many", "eval_quadratic", "convexify", "lower_hull",
    "scalar_multiply", "epi_scale", "subdifferential", "grid_sum", "resample",
    "TOL_CONVEX", "DEFAULT_N",
]

TOL_CONVEX = 1e-9
DEFAULT_N = 513
# second differences this close to zero are rounding, not a defect
_NOISE = 64 * np.finfo(float).eps
# evaluation points within this fraction of a step snap to the node
_SNAP = 1e-9


def _clean_values(values) -> np.ndarray:
    v = np.array(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if np.isnan(v).any():
        raise ValueError("values contain NaN")
    if np.isneginf(v).any():
        raise ImproperError("value -inf is not allowed for a proper function")
    return v


def _finite_range(v: np.ndarray) -> tuple[int, int]:
    idx = np.flatnonzero(np.isfinite(v))
    if idx.size == 0:
        raise ImproperError("function is identically +inf")
    i0, i1 = int(idx[0]), int(idx[-1])
    if idx.size != i1 - i0 + 1:
        raise NotConvexError("finite nodes are not contiguous (domain is not an interval)")
    return i0, i1


@dataclass(frozen=True)
class Samples:
    """Raw samples on a uniform grid with no convexity requirement."""

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        v = _clean_values(self.values)
        if not (self.lo < self.hi) or v.size < 2:
            raise ValueError("need lo < hi and at least two samples")
        v.setflags(write=False)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.values.size)


@dataclass(frozen=True, eq=False)
class GridFn:
    """Convex proper function sampled on ``n`` uniform nodes of ``[lo, hi]``.

    Values are +inf outside the effective domain. Construction rejects NaN,
    ``-inf``, non-contiguous domains and second differences below
    ``-TOL_CONVEX * max(1, max|f|)``; smaller violations are repaired by
    taking the lower convex hull.
    """

    lo: float
    hi: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"need finite lo < hi, got [{lo}, {hi}]")
        v = _clean_values(self.values)
        if v.size < 2:
            raise ValueError("a grid needs at least two nodes")
        i0, i1 = _finite_range(v)
        seg = v[i0:i1 + 1]
        if seg.size >= 3:
            scale = max(1.0, float(np.max(np.abs(seg))))
            d2 = seg[:-2] - 2.0 * seg[1:-1] + seg[2:]
            worst = float(d2.min())
            if worst < -TOL_CONVEX * scale:
                raise NotConvexError(
                    f"second difference {worst:.3e} below tolerance "
                    f"{-TOL_CONVEX * scale:.3e}")
            if worst < -_NOISE * scale:
                x = np.linspace(lo, hi, v.size)
                v = _hull_on_grid(x[i0:i1 + 1], seg, x)
        v.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "values", v)

    # --- grid geometry --------------------------------------------------
    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(self.lo, self.hi, self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def dom(self) -> tuple[int, int]:
        """Index range ``(first, last)`` of finite nodes, inclusive."""
        return _finite_range(self.values)

    @property
    def dom_interval(self) -> tuple[float, float]:
        i0, i1 = self.dom
        return float(self.x[i0]), float(self.x[i1])

    @property
    def finite(self) -> np.ndarray:
        return np.isfinite(self.values)

    # --- construction helpers -------------------------------------------
    @classmethod
    def from_function(cls, fn, lo: float, hi: float, n: int = DEFAULT_N) -> "GridFn":
        x = np.linspace(lo, hi, n)
        return cls(lo, hi, np.asarray(fn(x), dtype=float))

    @classmethod
    def indicator(cls, a: float, b: float, lo: float, hi: float,
                  n: int = DEFAULT_N) -> "GridFn":
        """Zero on nodes in ``[a, b]`` (with snapping), +inf elsewhere."""
        x = np.linspace(lo, hi, n)
        tol = _SNAP * (hi - lo) / (n - 1)
        return cls(lo, hi, np.where((x >= a - tol) & (x <= b + tol), 0.0, np.inf))

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "values": array_to_json(self.values)}

    @classmethod
    def from_json(cls, doc: dict) -> "GridFn":
        values = array_from_json(doc["values"])
        if "n" in doc and int(doc["n"]) != values.size:
            raise ValueError(f"n={doc['n']} does not match {values.size} values")
        return cls(float(doc["lo"]), float(doc["hi"]), values)

    def __call__(self, x):
        return eval_many(self, x)

    def __repr__(self) -> str:
        return f"GridFn(lo={self.lo!r}, hi={self.hi!r}, n={self.n})"


def eval_many(f: GridFn, x) -> np.ndarray:
    """Vectorised :func:`eval` returning a float array (+inf outside dom)."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.full(flat.shape, np.inf)
    h = f.h
    tol = _SNAP * h
    inside = (flat >= f.lo - tol) & (flat <= f.hi + tol)
    pos = (np.clip(flat[inside], f.lo, f.hi) - f.lo) / h
    near = np.rint(pos)
    snap = np.abs(pos - near) <= _SNAP
    k = np.clip(np.floor(pos).astype(int), 0, f.n - 2)
    frac = pos - k
    v = f.values
    with np.errstate(invalid="ignore"):
        interp = v[k] * (1.0 - frac) + v[k + 1] * frac
    interp[~(np.isfinite(v[k]) & np.isfinite(v[k + 1]))] = np.inf
    res = np.where(snap, v[near.astype(int)], interp)
    out[inside] = res
    return out.reshape(x.shape) if x.ndim else out.reshape(())


def eval(f: GridFn, x: float) -> ExtReal:  # noqa: A001 - mirrors the math name
    """Value of the piecewise-linear extension at ``x``; +inf off the box."""
    return ExtReal(float(eval_many(f, float(x))))


def resample(f: GridFn, lo: float, hi: float, n: int) -> GridFn:
    return GridFn(lo, hi, eval_many(f, np.linspace(lo, hi, n)))


# --- convex hull -----------------------------------------------------------


def lower_hull(x, y) -> np.ndarray:
    """Indices of the lower convex hull of points sorted by strictly increasing x.

    Points within rounding of a hull chord are dropped, which makes hulling
    already-hulled data reproduce the same vertices.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    stack: list[int] = []
    eps = 4.0 * np.finfo(float).eps
    for k in range(x.size):
        while len(stack) >= 2:
            i, j = stack[-2], stack[-1]
            dx1, dy1 = x[j] - x[i], y[j] - y[i]
            dx2, dy2 = x[k] - x[i], y[k] - y[i]
            cross = dx1 * dy2 - dy1 * dx2
            slack = eps * (dx2 * (abs(y[i]) + abs(y[j]) + abs(y[k]))
                           + (abs(x[i]) + abs(x[j]) + abs(x[k])) * (abs(dy1) + abs(dy2)))
            if cross <= slack:
                stack.pop()
            else:
                break
        stack.append(k)
    return np.array(stack, dtype=int)


def _hull_on_grid(px, py, xgrid) -> np.ndarray:
    """Lower hull of points ``(px, py)`` evaluated on ``xgrid``; +inf outside."""
    hv = lower_hull(px, py)
    hx, hy = px[hv], py[hv]
    out = np.full(xgrid.shape, np.inf)
    tol = _SNAP * (xgrid[1] - xgrid[0]) if xgrid.size > 1 else 0.0
    inside = (xgrid >= hx[0] - tol) & (xgrid <= hx[-1] + tol)
    out[inside] = np.interp(xgrid[inside], hx, hy)
    # keep hull vertices bit-exact where they sit on grid nodes
    pos = np.searchsorted(xgrid, hx)
    for p, xv, yv in zip(pos, hx, hy):
        for q in (p - 1, p):
            if 0 <= q < xgrid.size and abs(xgrid[q] - xv) <= tol:
                out[q] = yv
    return out


def convexify(points, lo: float | None = None, hi: float | None = None,
              n: int | None = None) -> GridFn:
    """Lower convex hull of sample points, resampled on a uniform grid.

    ``points`` is a :class:`GridFn`, :class:`Samples`, or an ``(m, 2)``
    array of ``(x, value)`` pairs. ``+inf`` values are ignored. For pair
    input the grid defaults to ``[min x, max x]`` with ``m`` nodes.
    """
    if isinstance(points, (GridFn, Samples)):
        px, py = np.asarray(points.x), np.asarray(points.values, dtype=float)
        lo = points.lo if lo is None else lo
        hi = points.hi if hi is None else hi
        n = points.values.size if n is None else n
    else:
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("points must be an (m, 2) array of (x, value) pairs")
        order = np.argsort(arr[:, 0], kind="stable")
        px, py = arr[order, 0], arr[order, 1]
        if np.isnan(py).any() or np.isneginf(py).any():
            raise ImproperError("values must be finite or +inf")
        lo = float(px.min()) if lo is None else lo
        hi = float(px.max()) if hi is None else hi
        n = arr.shape[0] if n is None else n
    keep = np.isfinite(py)
    px, py = px[keep], py[keep]
    if px.size < 2:
        raise ImproperError("convexify needs at least two finite points")
    # duplicate abscissae: keep the smallest value
    ux, first = np.unique(px, return_index=True)
    if ux.size != px.size:
        px, py = ux, np.minimum.reduceat(py, first)
    xgrid = np.linspace(lo, hi, n)
    return GridFn(lo, hi, _hull_on_grid(px, py, xgrid))


# --- scalings and sums -----------------------------------------------------


def scalar_multiply(alpha: float, f: GridFn) -> GridFn:
    """``(alpha . f)(x) = alpha * f(x)``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return GridFn(f.lo, f.hi, alpha * f.values)


def epi_scale(f: GridFn, alpha: float) -> GridFn:
    """``(f . alpha)(y) = alpha * f(y / alpha)`` on the grid ``alpha * [lo, hi]``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return GridFn(alpha * f.lo, alpha * f.hi, alpha * f.values)


def grid_sum(f: GridFn, g: GridFn) -> GridFn:
    """Pointwise ``f + g`` on the intersection box at the finer step."""
    lo, hi = max(f.lo, g.lo), min(f.hi, g.hi)
    if not lo < hi:
        raise ImproperError("boxes do not overlap")
    if f.lo == g.lo and f.hi == g.hi and f.n == g.n:
        return GridFn(lo, hi, ext_add(f.values, g.values))
    h = min(f.h, g.h)
    n = max(2, int(math.ceil((hi - lo) / h - 1e-9)) + 1)
    x = np.linspace(lo, hi, n)
    return GridFn(lo, hi, ext_add(eval_many(f, x), eval_many(g, x)))


# --- subgradients ----------------------------------------------------------


@dataclass(frozen=True)
class SlopeInterval:
    """Closed interval of subgradients; ``empty`` marks the empty set."""

    lo_slope: float
    hi_slope: float
    empty: bool = False

    def __post_init__(self):
        if not self.empty and not self.lo_slope <= self.hi_slope:
            raise ValueError("lo_slope must not exceed hi_slope")

    @classmethod
    def empty_set(cls) -> "SlopeInterval":
        return cls(math.inf, -math.inf, True)

    def contains(self, s: float, tol: float = 0.0) -> bool:
        return (not self.empty) and self.lo_slope - tol <= s <= self.hi_slope + tol

    @property
    def width(self) -> float:
        return -math.inf if self.empty else self.hi_slope - self.lo_slope

    def pick(self) -> float:
        """A finite member, preferring the midpoint."""
        if self.empty:
            raise ValueError("empty subdifferential")
        a, b = self.lo_slope, self.hi_slope
        if math.isfinite(a) and math.isfinite(b):
            return 0.5 * (a + b)
        if math.isfinite(a):
            return a
        if math.isfinite(b):
            return b
        return 0.0


def subdifferential(f: GridFn, i: int) -> SlopeInterval:
    """Difference-quotient subdifferential at node ``i``.

    Unbounded on the side where the domain ends; empty off the domain.
    """
    v = f.values
    if not (0 <= i < f.n) or not math.isfinite(v[i]):
        return SlopeInterval.empty_set()
    left = (v[i] - v[i - 1]) / f.h if i > 0 and math.isfinite(v[i - 1]) else -math.inf
    right = (v[i + 1] - v[i]) / f.h if i + 1 < f.n and math.isfinite(v[i + 1]) else math.inf
    if left > right:  # rounding on an affine stretch
        left = right = 0.5 * (left + right)
    return SlopeInterval(float(left), float(right))


# --- quadratics ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Symmetric positive-definite matrix, validated at construction."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("entries must be finite")
        amax = float(np.max(np.abs(a)))
        if np.max(np.abs(a - a.T)) > 1e-12 * amax:
            raise ValueError("matrix is not symmetric")
        a = symmetrize(a)
        if sym_eig(a)[0][0] <= 0.0:
            raise ValueError("matrix is not positive definite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def d(self) -> int:
        return int(self.entries.shape[0])

    @property
    def array(self) -> np.ndarray:
        return self.entries

    def to_json(self) -> dict:
        return {"d": self.d, "entries": [float(v) for v in self.entries.ravel()]}

    @classmethod
    def from_json(cls, doc: dict) -> "SpdMatrix":
        d = int(doc["d"])
        e = np.asarray(doc["entries"], dtype=float)
        if e.size != d * d:
            raise DimensionError(f"expected {d * d} entries, got {e.size}")
        return cls(e.reshape(d, d))

    def __repr__(self) -> str:
        return f"SpdMatrix(d={self.d})"


@dataclass(frozen=True)
class QuadraticFn:
    """``Q_A(x) = 1/2 <A x, x>``."""

    matrix: SpdMatrix

    def __call__(self, x) -> float:
        return eval_quadratic(self, x)


def eval_quadratic(q, x) -> float:
    a = q.matrix.entries if isinstance(q, QuadraticFn) else np.asarray(
        q.entries if isinstance(q, SpdMatrix) else q, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (a.shape[0],):
        raise DimensionError(f"vector of shape {x.shape} for a {a.shape[0]}-dim form")
    return 0.5 * float(x @ a @ x)
