"""Weighted means of convex grid functions.

Harmonic means are evaluated exactly for the piecewise-linear interpolants:
with ``F = f*`` and ``G = g*`` (both PL with kinks at the primal slopes), the
combination ``(1-t) F + t G`` has kinks on the union ``B`` of those slopes,
and its conjugate at ``x`` is ``B_k x - ((1-t) F + t G)(B_k)`` for the segment
``k`` whose slope brackets ``x``. The union, ``F(B)`` and ``G(B)`` do not depend
on ``t``, so :class:`HarmonicPencil` prepares them once and every quadrature
node costs a handful of vector operations.

Integral means put every harmonic row on one output grid spanning both boxes
and add the rows with the extended-real weighted sum, so a node is finite
only where every row is.
"""
from __future__ import annotations

import math

import numpy as np

from .convex_core import GridFn, _SNAP, eval_many
from .errors import ConfigurationError, ImproperError
from .extreal import ExtReal, ext_weighted_sum
from .fenchel import PLConvex
from .quadrature import QuadRule, default_nodes, gauss_jacobi_nu, gauss_legendre, mu_rule

__all__ = [
    "HarmonicPencil", "output_grid", "arith", "harmonic", "geometric",
    "log_mean_geo", "log_mean_harm", "family_G", "family_U", "diamond",
    "diamond_values",
]


def output_grid(f: GridFn, g: GridFn) -> tuple[float, float, int]:
    """Grid spanning both boxes at the finer of the two steps."""
    if f.lo == g.lo and f.hi == g.hi and f.n == g.n:
        return f.lo, f.hi, f.n
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    h = min(f.h, g.h)
    return lo, hi, max(2, int(math.ceil((hi - lo) / h - 1e-9)) + 1)


def _to_grid(f: GridFn, grid) -> np.ndarray:
    lo, hi, n = grid
    if (f.lo, f.hi, f.n) == (lo, hi, n):
        return np.asarray(f.values)
    return eval_many(f, np.linspace(lo, hi, n))


def _finish(values: np.ndarray, grid) -> GridFn:
    if not np.isfinite(values).any():
        raise ImproperError("the mean is identically +inf (domains do not meet)")
    return GridFn(grid[0], grid[1], values)


def _check_weight(name: str, v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return v


class HarmonicPencil:
    """All harmonic means ``f !_t g`` of a fixed pair on a fixed output grid."""

    def __init__(self, f: GridFn, g: GridFn, grid=None):
        self.f, self.g = f, g
        self.grid = output_grid(f, g) if grid is None else grid
        lo, hi, n = self.grid
        self.x = np.linspace(lo, hi, n)
        self.tol = _SNAP * (hi - lo) / (n - 1)
        fs = PLConvex.from_grid(f).conjugate()
        gs = PLConvex.from_grid(g).conjugate()
        b = np.union1d(fs.xs, gs.xs)
        self.b = b
        self.fb, self.gb = fs(b), gs(b)
        if b.size >= 2:
            self.fsl, self.gsl = fs._seg_slopes(b), gs._seg_slopes(b)
        else:
            self.fsl = self.gsl = np.empty(0)
        # tails of the conjugates are the domain ends of f and g
        self.f_ends = (fs.left, fs.right)
        self.g_ends = (gs.left, gs.right)
        self._f_row = None
        self._g_row = None

    def row(self, t: float) -> np.ndarray:
        """Values of ``f !_t g`` on the output grid (+inf off its domain)."""
        if t <= 0.0:
            if self._f_row is None:
                self._f_row = _to_grid(self.f, self.grid)
            return self._f_row
        if t >= 1.0:
            if self._g_row is None:
                self._g_row = _to_grid(self.g, self.grid)
            return self._g_row
        s = 1.0 - t
        psi = s * self.fb + t * self.gb
        sig = np.maximum.accumulate(s * self.fsl + t * self.gsl)
        a = s * self.f_ends[0] + t * self.g_ends[0]
        z = s * self.f_ends[1] + t * self.g_ends[1]
        x = self.x
        inside = (x >= a - self.tol) & (x <= z + self.tol)
        xi = np.clip(x[inside], a, z)
        k = np.searchsorted(sig, xi, side="left")
        out = np.full(x.shape, np.inf)
        out[inside] = self.b[k] * xi - psi[k]
        return out

    def rows(self, ts) -> np.ndarray:
        return np.stack([self.row(float(t)) for t in np.atleast_1d(ts)])

    def integrate(self, ts, weights) -> np.ndarray:
        return ext_weighted_sum(weights, self.rows(ts))


def arith(f: GridFn, g: GridFn, lam: float) -> GridFn:
    """``(1 - lam) f + lam g``; the endpoints return an operand unchanged."""
    lam = _check_weight("lambda", lam)
    if lam == 0.0:
        return f
    if lam == 1.0:
        return g
    grid = output_grid(f, g)
    vals = ext_weighted_sum([1.0 - lam, lam], [_to_grid(f, grid), _to_grid(g, grid)])
    return _finish(vals, grid)


def harmonic(f: GridFn, g: GridFn, lam: float, pencil: HarmonicPencil | None = None) -> GridFn:
    """``((1 - lam) f* + lam g*)*`` on the grid spanning both boxes."""
    lam = _check_weight("lambda", lam)
    if lam == 0.0:
        return f
    if lam == 1.0:
        return g
    p = pencil if pencil is not None else HarmonicPencil(f, g)
    return _finish(p.row(lam), p.grid)


def _nu(lam: float, rule: QuadRule | None) -> QuadRule:
    if rule is None:
        return gauss_jacobi_nu(lam, default_nodes()["nu"])
    same = rule.lam is not None and math.isclose(rule.lam, lam, abs_tol=1e-14)
    if rule.measure_tag != "nu" or not same:
        raise ConfigurationError(f"need a nu rule for lambda={lam}, got {rule!r}")
    return rule


def _mu(rule: QuadRule | None) -> QuadRule:
    if rule is None:
        return mu_rule(default_nodes()["mu_pl"])
    if rule.measure_tag != "mu":
        raise ConfigurationError(f"need a mu rule, got {rule!r}")
    return rule


def geometric(f: GridFn, g: GridFn, lam: float, rule: QuadRule | None = None,
              pencil: HarmonicPencil | None = None) -> GridFn:
    """``int f !_t g  d nu_lam(t)`` by Gauss-Jacobi quadrature."""
    lam = _check_weight("lambda", lam)
    if lam == 0.0:
        return f
    if lam == 1.0:
        return g
    r = _nu(lam, rule)
    p = pencil if pencil is not None else HarmonicPencil(f, g)
    return _finish(p.integrate(r.nodes, r.weights), p.grid)


def log_mean_geo(f: GridFn, g: GridFn, rule: QuadRule | None = None,
                 nu_nodes: int | None = None) -> GridFn:
    """``int_0^1 f #_t g dt``: Gauss-Legendre over geometric means."""
    nodes = default_nodes()
    r = gauss_legendre(nodes["lebesgue"]) if rule is None else rule
    if r.measure_tag != "lebesgue":
        raise ConfigurationError(f"need a Lebesgue rule, got {r!r}")
    m = nodes["nu"] if nu_nodes is None else nu_nodes
    p = HarmonicPencil(f, g)
    rows = []
    for t in r.nodes:
        nu = gauss_jacobi_nu(float(t), m)
        rows.append(p.integrate(nu.nodes, nu.weights))
    return _finish(ext_weighted_sum(r.weights, rows), p.grid)


def log_mean_harm(f: GridFn, g: GridFn, mu: QuadRule | None = None,
                  pencil: HarmonicPencil | None = None) -> GridFn:
    """``int_0^1 f !_t g d mu(t)``."""
    r = _mu(mu)
    p = pencil if pencil is not None else HarmonicPencil(f, g)
    return _finish(p.integrate(r.nodes, r.weights), p.grid)


def family_G(f: GridFn, g: GridFn, lam: float, s: float, rule: QuadRule | None = None,
             pencil: HarmonicPencil | None = None) -> GridFn:
    """``int f !_{s t + (1-s) lam} g  d nu_lam(t)``; harmonic at s=0, geometric at s=1."""
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie strictly inside (0, 1), got {lam}")
    s = _check_weight("s", s)
    p = pencil if pencil is not None else HarmonicPencil(f, g)
    if s == 0.0:
        return harmonic(f, g, lam, pencil=p)
    r = _nu(lam, rule)
    if s == 1.0:
        return geometric(f, g, lam, r, pencil=p)
    return _finish(p.integrate(s * r.nodes + (1.0 - s) * lam, r.weights), p.grid)


def family_U(f: GridFn, g: GridFn, s: float, mu: QuadRule | None = None,
             pencil: HarmonicPencil | None = None) -> GridFn:
    """``int f !_{s t + (1-s)/2} g  d mu(t)``; ``f ! g`` at s=0, ``L(f, g)`` at s=1."""
    s = _check_weight("s", s)
    p = pencil if pencil is not None else HarmonicPencil(f, g)
    if s == 0.0:
        return harmonic(f, g, 0.5, pencil=p)
    r = _mu(mu)
    if s == 1.0:
        return log_mean_harm(f, g, r, pencil=p)
    return _finish(p.integrate(s * r.nodes + (1.0 - s) * 0.5, r.weights), p.grid)


# --- diamond -------------------------------------------------------------


def _slope_interval_at(f: GridFn, x: float):
    """PL subdifferential of ``f`` at any real ``x``; ``None`` when empty."""
    i0, i1 = f.dom
    tol = _SNAP * f.h
    a, b = f.x[i0], f.x[i1]
    if x < a - tol or x > b + tol:
        return None
    pos = (min(max(x, a), b) - f.lo) / f.h
    k = int(round(pos))
    v = f.values
    if abs(pos - k) <= _SNAP:
        left = (v[k] - v[k - 1]) / f.h if k > i0 else -math.inf
        right = (v[k + 1] - v[k]) / f.h if k < i1 else math.inf
        if left > right:
            left = right = 0.5 * (left + right)
        return left, right
    k = int(math.floor(pos))
    c = (v[k + 1] - v[k]) / f.h
    return c, c


def _diamond_from(f: GridFn, gs: PLConvex, g: GridFn, x: float) -> float:
    iv = _slope_interval_at(f, x)
    if iv is None:
        return -math.inf
    l, r = iv
    if l == -math.inf and r == math.inf:
        # singleton domain: the sup runs over every slope, giving g**(x)
        return float(eval_many(g, x))
    g_lo, g_hi = float(g.x[g.dom[0]]), float(g.x[g.dom[1]])
    if r == math.inf and x > g_hi:
        return math.inf
    if l == -math.inf and x < g_lo:
        return math.inf
    cand = gs.xs[(gs.xs >= l) & (gs.xs <= r)]
    ends = [v for v in (l, r) if math.isfinite(v)]
    cand = np.concatenate([cand, ends])
    return float(np.max(cand * x - gs(cand)))


def diamond(f: GridFn, g: GridFn, x: float) -> ExtReal:
    """``sup { s x - g*(s) : s in df(x) }``, ``-inf`` when ``df(x)`` is empty.

    The objective is concave and PL in ``s``, so the sup is attained at an
    end of the slope interval or at a kink of ``g*`` inside it.
    """
    return ExtReal(_diamond_from(f, PLConvex.from_grid(g).conjugate(), g, float(x)))


def diamond_values(f: GridFn, g: GridFn, x=None) -> np.ndarray:
    """:func:`diamond` at each point of ``x`` (default: the nodes of ``f``)."""
    gs = PLConvex.from_grid(g).conjugate()
    pts = f.x if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_diamond_from(f, gs, g, float(xi)) for xi in pts])

