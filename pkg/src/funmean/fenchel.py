"""Legendre-Fenchel conjugation, inf-convolution and the Fenchel gap.

Everything here is exact for piecewise-linear functions. A grid function is
read as the PL interpolant of its finite nodes (vertical walls at the domain
ends); its conjugate is again PL, with a breakpoint at every segment slope and
linear tails. :class:`PLConvex` carries that representation, so chains like
``((1-t) f* + t g*)*`` are computed without any dual-grid sampling error and
only the final result is sampled onto a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_core import (GridFn, QuadraticFn, Samples, SpdMatrix, _SNAP,
                          eval_many, eval_quadratic, lower_hull)
from .errors import ConfigurationError, ImproperError
from .extreal import ExtReal, ext_add
from .linalg import spd_inverse

__all__ = [
    "PLConvex", "conjugate", "conjugate_quadratic", "biconjugate",
    "inf_conv_brute", "inf_conv_at", "inf_conv_dual", "fenchel_gap", "default_dual_grid",
    "DUAL_PAD",
]

DUAL_PAD = 0.10


@dataclass(frozen=True, eq=False)
class PLConvex:
    """Convex piecewise-linear function on the real line.

    ``xs``/``ys`` are the vertices (``xs`` strictly increasing), ``slopes``
    the ``len(xs) - 1`` segment slopes, and ``left``/``right`` the tail
    slopes. A tail slope of ``-inf`` (left) or ``+inf`` (right) means the
    domain stops at the outer vertex.
    """

    xs: np.ndarray
    ys: np.ndarray
    slopes: np.ndarray
    left: float
    right: float

    @classmethod
    def from_grid(cls, f) -> "PLConvex":
        """PL interpolant of the finite nodes; raw samples are hulled first."""
        x = np.asarray(f.x)
        v = np.asarray(f.values, dtype=float)
        fin = np.isfinite(v)
        if not fin.any():
            raise ImproperError("function is identically +inf")
        x, v = x[fin], v[fin]
        if isinstance(f, Samples):
            keep = lower_hull(x, v)
            x, v = x[keep], v[keep]
        slopes = np.diff(v) / np.diff(x)
        if slopes.size:
            slopes = np.maximum.accumulate(slopes)
        return cls(x, v, slopes, -math.inf, math.inf)

    @property
    def dom(self) -> tuple[float, float]:
        a = self.xs[0] if self.left == -math.inf else -math.inf
        b = self.xs[-1] if self.right == math.inf else math.inf
        return float(a), float(b)

    def __call__(self, z, tol: float = 0.0) -> np.ndarray:
        """Values at ``z``; points within ``tol`` outside the domain snap onto it."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        xs, ys = self.xs, self.ys
        a, b = self.dom
        z = np.where((z < a) & (z >= a - tol), a, z)
        z = np.where((z > b) & (z <= b + tol), b, z)
        out = np.empty(z.shape)
        m = xs.size
        lt = z < xs[0]
        rt = z > xs[-1]
        mid = ~(lt | rt)
        if m >= 2:
            k = np.clip(np.searchsorted(xs, z[mid], side="right") - 1, 0, m - 2)
            zm = z[mid]
            val = ys[k] + self.slopes[k] * (zm - xs[k])
            val[zm == xs[-1]] = ys[-1]
            out[mid] = val
        else:
            out[mid] = ys[0]
        with np.errstate(invalid="ignore"):
            out[lt] = (ys[0] + self.left * (z[lt] - xs[0])) if self.left != -math.inf else np.inf
            out[rt] = (ys[-1] + self.right * (z[rt] - xs[-1])) if self.right != math.inf else np.inf
        return out

    def conjugate(self) -> "PLConvex":
        """Exact conjugate: kinks at the slopes, slopes at the vertices."""
        xs, ys, c = self.xs, self.ys, self.slopes
        m = xs.size
        bx = [c]
        by = [c * xs[:-1] - ys[:-1]]
        seg = [xs[1:-1]] if m >= 2 else [np.empty(0)]
        if self.left != -math.inf:
            bx.insert(0, [self.left])
            by.insert(0, [self.left * xs[0] - ys[0]])
            seg.insert(0, [xs[0]])
        if self.right != math.inf:
            bx.append([self.right])
            by.append([self.right * xs[-1] - ys[-1]])
            seg.append([xs[-1]])
        nx = np.concatenate([np.asarray(b, float) for b in bx])
        ny = np.concatenate([np.asarray(b, float) for b in by])
        ns = np.concatenate([np.asarray(b, float) for b in seg])
        new_left = xs[0] if self.left == -math.inf else -math.inf
        new_right = xs[-1] if self.right == math.inf else math.inf
        if nx.size == 0:  # affine function: any point is a vertex
            return PLConvex(np.array([0.0]), np.array([-ys[0]]), np.empty(0),
                            float(new_left), float(new_right))
        if nx.size > 1:
            keep = np.concatenate([[True], np.diff(nx) > 0])
            if not keep.all():
                # zero-length segments carry no information
                ns = ns[keep[1:]]
                nx, ny = nx[keep], ny[keep]
        return PLConvex(nx, ny, ns, float(new_left), float(new_right))

    def combine(self, other: "PLConvex", alpha: float, beta: float) -> "PLConvex":
        """``alpha * self + beta * other`` for positive weights."""
        if not (alpha > 0 and beta > 0):
            raise ValueError("weights must be positive")
        a1, b1 = self.dom
        a2, b2 = other.dom
        a, b = max(a1, a2), min(b1, b2)
        if a > b:
            raise ImproperError("domains do not intersect")
        pts = np.union1d(self.xs, other.xs)
        pts = pts[(pts >= a) & (pts <= b)]
        ends = [v for v in (a, b) if math.isfinite(v)]
        if ends:
            pts = np.union1d(pts, ends)
        if pts.size == 0:
            # both affine over the whole line, vertices outside each other's
            # range are impossible here, so take any point
            pts = np.array([self.xs[0]])
        ys = alpha * self(pts) + beta * other(pts)
        if pts.size >= 2:
            slopes = alpha * self._seg_slopes(pts) + beta * other._seg_slopes(pts)
        else:
            slopes = np.empty(0)
        left = -math.inf if math.isfinite(a) else alpha * self.left + beta * other.left
        right = math.inf if math.isfinite(b) else alpha * self.right + beta * other.right
        return PLConvex(pts, ys, slopes, float(left), float(right))

    def _seg_slopes(self, pts: np.ndarray) -> np.ndarray:
        """Slope of this function on each interval between consecutive ``pts``."""
        xs = self.xs
        k = np.searchsorted(xs, pts[:-1], side="right") - 1
        out = np.empty(k.shape)
        lt = k < 0
        rt = k >= xs.size - 1
        mid = ~(lt | rt)
        out[lt] = self.left
        out[rt] = self.right
        out[mid] = self.slopes[k[mid]]
        return out

    def sample(self, lo: float, hi: float, n: int) -> GridFn:
        x = np.linspace(lo, hi, n)
        tol = _SNAP * (hi - lo) / (n - 1)
        return GridFn(lo, hi, self(x, tol=tol))


def default_dual_grid(f) -> tuple[float, float, int]:
    """Slope range of ``f`` widened by ``DUAL_PAD`` on both sides."""
    pl = PLConvex.from_grid(f)
    n = len(f.values)
    if pl.slopes.size == 0:
        return -1.0, 1.0, n
    s0, s1 = float(pl.slopes[0]), float(pl.slopes[-1])
    pad = DUAL_PAD * (s1 - s0)
    if pad == 0.0:
        pad = max(1.0, abs(s0)) * DUAL_PAD
    return s0 - pad, s1 + pad, n


def _check_grid(grid) -> tuple[float, float, int]:
    try:
        lo, hi, n = grid
        lo, hi, n = float(lo), float(hi), int(n)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"dual grid must be (lo, hi, n), got {grid!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi and n >= 2):
        raise ConfigurationError(f"invalid dual grid {grid!r}")
    return lo, hi, n


def conjugate(f, dual_grid=None) -> GridFn:
    """``f*(s) = max_i (s x_i - f(x_i))`` sampled on ``dual_grid = (lo, hi, n)``.

    Non-convex :class:`Samples` are hulled first, which leaves the
    conjugate unchanged.
    """
    lo, hi, n = _check_grid(dual_grid) if dual_grid is not None else default_dual_grid(f)
    return PLConvex.from_grid(f).conjugate().sample(lo, hi, n)


def biconjugate(f) -> GridFn:
    """``f**`` on the primal grid: the PL convex hull of the finite samples."""
    return PLConvex.from_grid(f).conjugate().conjugate().sample(f.lo, f.hi, len(f.values))


def conjugate_quadratic(q: QuadraticFn) -> QuadraticFn:
    """``Q_A* = Q_{A^-1}``."""
    a = q.matrix.entries if isinstance(q, QuadraticFn) else SpdMatrix(q).entries
    return QuadraticFn(SpdMatrix(spd_inverse(a)))


def _sum_grid(f: GridFn, g: GridFn) -> tuple[float, float, int]:
    lo, hi = f.lo + g.lo, f.hi + g.hi
    h = min(f.h, g.h)
    n = max(2, int(round((hi - lo) / h)) + 1)
    return lo, hi, n


def inf_conv_brute(f: GridFn, g: GridFn) -> GridFn:
    """``inf_z f(z) + g(x - z)`` by direct minimisation on the box ``[lo_f+lo_g, hi_f+hi_g]``.

    With equal steps this is the exact min-plus convolution of the node
    values. Otherwise every output node minimises over the breakpoints of
    both operands, which is exact for PL inputs.
    """
    lo, hi, n = _sum_grid(f, g)
    if math.isclose(f.h, g.h, rel_tol=1e-12):
        i0, i1 = f.dom
        j0, j1 = g.dom
        a, b = f.values[i0:i1 + 1], g.values[j0:j1 + 1]
        res = np.full(a.size + b.size - 1, np.inf)
        for k in range(a.size):
            np.minimum(res[k:k + b.size], a[k] + b, out=res[k:k + b.size])
        values = np.full(n, np.inf)
        values[i0 + j0:i0 + j0 + res.size] = res
        return GridFn(lo, hi, values)
    return GridFn(lo, hi, inf_conv_at(f, g, np.linspace(lo, hi, n)))


def inf_conv_at(f: GridFn, g: GridFn, x) -> np.ndarray:
    """``inf_z f(z) + g(x - z)`` at arbitrary points, exact for the PL interpolants.

    The objective is PL in ``z`` with kinks at the nodes of ``f`` and at
    ``x`` minus the nodes of ``g``, so the minimum sits on one of them.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    zf = f.x[f.finite]
    zg = g.x[g.finite]
    fz = f.values[f.finite]
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        a = np.min(ext_add(fz, eval_many(g, xi - zf)))
        b = np.min(ext_add(eval_many(f, xi - zg), g.values[g.finite]))
        out[i] = min(a, b)
    return out


def inf_conv_dual(f: GridFn, g: GridFn, dual_grid=None) -> GridFn:
    """``(f* + g*)*`` on the box ``[lo_f+lo_g, hi_f+hi_g]``.

    Without ``dual_grid`` the conjugates are combined exactly. With a dual
    grid ``(lo, hi, n)`` both conjugates are sampled there first, so the
    result is the inf-convolution seen through that window of slopes.
    """
    lo, hi, n = _sum_grid(f, g)
    if dual_grid is None:
        fs = PLConvex.from_grid(f).conjugate()
        gs = PLConvex.from_grid(g).conjugate()
        return fs.combine(gs, 1.0, 1.0).conjugate().sample(lo, hi, n)
    slo, shi, sn = _check_grid(dual_grid)
    fs = conjugate(f, (slo, shi, sn))
    gs = conjugate(g, (slo, shi, sn))
    both = np.isfinite(fs.values) & np.isfinite(gs.values)
    if not both.any():
        raise ConfigurationError("conjugates share no finite dual node")
    total = GridFn(slo, shi, ext_add(fs.values, gs.values))
    return PLConvex.from_grid(total).conjugate().sample(lo, hi, n)


def fenchel_gap(f, x, x_star) -> ExtReal:
    """``f(x) + f*(x*) - <x*, x>``, nonnegative by the Fenchel inequality."""
    if isinstance(f, (QuadraticFn, SpdMatrix)):
        q = f if isinstance(f, QuadraticFn) else QuadraticFn(f)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xs = np.atleast_1d(np.asarray(x_star, dtype=float))
        fx = eval_quadratic(q, x)
        fsx = eval_quadratic(conjugate_quadratic(q), xs)
        return ExtReal(fx + fsx - float(xs @ x))
    pl = PLConvex.from_grid(f)
    fx = float(eval_many(f, float(x)))
    if math.isinf(fx):
        return ExtReal(math.inf)
    fsx = float(pl.conjugate()(float(x_star))[0])
    if math.isinf(fsx):
        return ExtReal(math.inf)
    return ExtReal(fx + fsx - float(x_star) * float(x))
