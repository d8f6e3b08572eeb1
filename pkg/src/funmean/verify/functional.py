"""Randomised checks of the functional mean inequalities on grid functions."""
from __future__ import annotations

import math

import numpy as np

from ..convex_core import GridFn, epi_scale, scalar_multiply
from ..extreal import ext_weighted_sum
from ..fenchel import PLConvex, inf_conv_at
from ..functional_means import (HarmonicPencil, _slope_interval_at, arith, diamond_values,
                                family_G, family_U, geometric, harmonic, log_mean_geo,
                                log_mean_harm)
from ..operator_means import scalar_log_mean
from ..quadrature import i_s
from .core import Tally, functional_slack, register
from .generators import GenConfig, gen_convex_gridfn, gen_family, gen_pair

GRID = {"lo": -1.0, "hi": 1.0, "n": 513, "kind": "mixed", "domain_prob": 0.25}
LAMBDAS = (0.25, 0.5, 0.75)
S_VALUES = (0.25, 0.5, 0.75)


def _slack(cfg) -> float:
    return functional_slack((cfg["hi"] - cfg["lo"]) / (cfg["n"] - 1))


def _gen(cfg) -> GenConfig:
    return GenConfig(cfg["lo"], cfg["hi"], cfg["n"], cfg["kind"], cfg["domain_prob"])


def _pair(rng, cfg):
    f, g = gen_pair(rng, _gen(cfg))
    return f, g, HarmonicPencil(f, g)


def _v(fn: GridFn) -> np.ndarray:
    return np.asarray(fn.values)


def _sup(fn: GridFn) -> float:
    return float(np.max(np.abs(fn.values[fn.finite])))


@register("chain-440", ["440", "420", "425"], "functional", _slack, GRID)
def chain_440(rng, cfg):
    """harmonic <= geometric <= arithmetic at lambda in {1/4, 1/2, 3/4}."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    for lam in LAMBDAS:
        t.chain(_v(harmonic(f, g, lam, p)), _v(geometric(f, g, lam, pencil=p)),
                _v(arith(f, g, lam)))
    return t


@register("domains-475", ["475"], "functional", 0.0, {**GRID, "domain_prob": 1.0})
def domains_475(rng, cfg):
    """dom f n dom g within dom(f #_lam g) within (1-lam) dom f + lam dom g."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    x = p.x
    tol = 1e-9 * (x[1] - x[0])
    fa, fb = f.dom_interval
    ga, gb = g.dom_interval
    for lam in LAMBDAS:
        geo = np.isfinite(_v(geometric(f, g, lam, pencil=p)))
        inner = (x >= max(fa, ga) - tol) & (x <= min(fb, gb) + tol)
        outer = (x >= (1 - lam) * fa + lam * ga - tol) & (x <= (1 - lam) * fb + lam * gb + tol)
        har = np.isfinite(_v(harmonic(f, g, lam, p)))
        t.value(0.0 if np.all(geo[inner]) else -1.0)
        t.value(0.0 if not np.any(geo & ~outer) else -1.0)
        t.value(0.0 if np.array_equal(har, outer) else -1.0)
    return t


@register("chain-513", ["513", "510", "530", "535"], "functional", _slack, GRID)
def chain_513(rng, cfg):
    """f!g <= L(f,g) <= f(nabla)g with L from the mu rule."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    t.chain(_v(harmonic(f, g, 0.5, p)), _v(log_mean_harm(f, g, pencil=p)), _v(arith(f, g, 0.5)))
    return t


@register("logmean-530", ["530", "510", "535"], "functional", 1e-3, GRID)
def logmean_530(rng, cfg):
    """The dt-integral of geometric means equals the mu-integral of harmonic means."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    geo = _v(log_mean_geo(f, g))
    har = _v(log_mean_harm(f, g, pencil=p))
    x = p.x
    fin = np.isfinite(geo) & np.isfinite(har)
    # stay one node away from the domain ends
    inner = fin & np.roll(fin, 1) & np.roll(fin, -1)
    t.equal(geo, har, mask=inner & (np.abs(x) < 1.0))
    return t


@register("refine-485", ["485", "480"], "functional", _slack, GRID)
def refine_485(rng, cfg):
    """f!_lam g <= G_s <= (f!_lam g)(nabla_s)(f #_lam g) <= f #_lam g <= f(nabla_lam)g."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    har = _v(harmonic(f, g, lam, p))
    geo = _v(geometric(f, g, lam, pencil=p))
    ari = _v(arith(f, g, lam))
    for s in S_VALUES:
        gs = _v(family_G(f, g, lam, s, pencil=p))
        mid = ext_weighted_sum([1 - s, s], [har, geo])
        t.chain(har, gs, mid, geo, ari)
    return t


@register("monotone-G", ["487", "thG"], "functional", _slack, GRID)
def monotone_g(rng, cfg):
    """s -> G_s is pointwise increasing, from f!_lam g at s=0 to f #_lam g at s=1."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    levels = [_v(family_G(f, g, lam, s, pencil=p)) for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
    t.chain(*levels)
    t.equal(levels[0], _v(harmonic(f, g, lam, p)))
    t.equal(levels[-1], _v(geometric(f, g, lam, pencil=p)))
    return t


@register("refine-625", ["625", "622"], "functional", _slack, GRID)
def refine_625(rng, cfg):
    """f!g <= U_s <= (f!g)(nabla_s)L(f,g) <= L(f,g)."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    har = _v(harmonic(f, g, 0.5, p))
    lm = _v(log_mean_harm(f, g, pencil=p))
    for s in S_VALUES:
        us = _v(family_U(f, g, s, pencil=p))
        t.chain(har, us, ext_weighted_sum([1 - s, s], [har, lm]), lm)
    return t


@register("monotone-U", ["627", "thU"], "functional", _slack, GRID)
def monotone_u(rng, cfg):
    """s -> U_s is pointwise increasing, from f!g at s=0 to L(f,g) at s=1."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    levels = [_v(family_U(f, g, s, pencil=p)) for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
    t.chain(*levels)
    t.equal(levels[0], _v(harmonic(f, g, 0.5, p)))
    t.equal(levels[-1], _v(log_mean_harm(f, g, pencil=p)))
    return t


def _gap(pl_star: PLConvex, fvals: np.ndarray, x: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Fenchel gap ``h(x) + h*(s) - s x`` from precomputed values."""
    return fvals + pl_star(slopes) - slopes * x


@register("ratio-610", ["610"], "functional", _slack, GRID)
def ratio_610(rng, cfg):
    """0 <= r_{t,s} D_s <= D_t <= R_{t,s} D_s with D_u = f(nabla_u)g - f!_u g."""
    f, g, p = _pair(rng, cfg)
    tl = Tally()
    for _ in range(4):
        s, t = rng.uniform(0.05, 0.95, size=2)
        ds = _finite_diff(_v(arith(f, g, s)), _v(harmonic(f, g, s, p)))
        dt = _finite_diff(_v(arith(f, g, t)), _v(harmonic(f, g, t, p)))
        r = min(t / s, (1 - t) / (1 - s))
        big = max(t / s, (1 - t) / (1 - s))
        fin = np.isfinite(ds) & np.isfinite(dt)
        tl.mixed += int((np.isfinite(ds) ^ np.isfinite(dt)).sum())
        if fin.any():
            tl.value(float(np.min(r * ds[fin])))
            tl.chain(r * ds[fin], dt[fin], big * ds[fin])
    return tl


def _finite_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = a - b
    out[~(np.isfinite(a) & np.isfinite(b))] = np.nan
    return out


@register("bounds-612", ["612", "thRR"], "functional", _slack,
          {**GRID, "s_values": (0.3, 0.5, 0.7)})
def bounds_612(rng, cfg):
    """(1/2 - I_s) D_s / (s(1-s)) <= f(nabla)g - L(f,g) <= I_s D_s / (s(1-s))."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    gap = _finite_diff(_v(arith(f, g, 0.5)), _v(log_mean_harm(f, g, pencil=p)))
    for s in cfg["s_values"]:
        ds = _finite_diff(_v(arith(f, g, s)), _v(harmonic(f, g, s, p))) / (s * (1 - s))
        fin = np.isfinite(gap) & np.isfinite(ds)
        if not fin.any():
            continue
        i = i_s(s)
        t.value(float(np.min((0.5 - i) * ds[fin])))
        t.chain((0.5 - i) * ds[fin], gap[fin], i * ds[fin])
    return t


@register("bounds-corRR", ["corRR", "612"], "functional", _slack, GRID)
def bounds_corrr(rng, cfg):
    """L(f,g) <= (I-1) f(nabla)g + (2-I) f!g <= f(nabla)g with I = 4 I_{1/2}."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    big_i = 4.0 * i_s(0.5)
    ari = _v(arith(f, g, 0.5))
    har = _v(harmonic(f, g, 0.5, p))
    lm = _v(log_mean_harm(f, g, pencil=p))
    t.chain(lm, ext_weighted_sum([big_i - 1, 2 - big_i], [ari, har]), ari)
    return t


def _subgradient_pick(fn: GridFn, x: float, rng) -> float | None:
    iv = _slope_interval_at(fn, x)
    if iv is None:
        return None
    lo, hi = iv
    if math.isfinite(lo) and math.isfinite(hi):
        return float(rng.uniform(lo, hi)) if hi > lo else lo
    if math.isfinite(lo):
        return lo
    if math.isfinite(hi):
        return hi
    return 0.0


@register("gap-615", ["615", "616", "614", "105", "6135"], "functional", _slack, GRID)
def gap_615(rng, cfg):
    """0 <= f(nabla)g - L(f,g) <= (1/6)(F_g(x,x*) (nabla) F_f(x,z*)), and the diamond form."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    ari = _v(arith(f, g, 0.5))
    lm = _v(log_mean_harm(f, g, pencil=p))
    fs = PLConvex.from_grid(f).conjugate()
    gs = PLConvex.from_grid(g).conjugate()
    x = p.x
    fv, gv = _v(f), _v(g)
    gap = _finite_diff(ari, lm)
    idx = np.flatnonzero(np.isfinite(fv) & np.isfinite(gv) & np.isfinite(gap))
    if idx.size == 0:
        return t
    xs = np.array([_subgradient_pick(f, x[i], rng) for i in idx])
    zs = np.array([_subgradient_pick(g, x[i], rng) for i in idx])
    fg = _gap(gs, gv[idx], x[idx], xs)  # F_g(x, x*) with x* in df(x)
    ff = _gap(fs, fv[idx], x[idx], zs)  # F_f(x, z*) with z* in dg(x)
    t.value(float(np.min(fg)))
    t.value(float(np.min(ff)))
    t.value(float(np.min(gap[idx])))
    t.leq(gap[idx], (fg + ff) / 12.0)
    # diamond form where both diamonds are finite
    fd = diamond_values(f, g, x[idx])
    gd = diamond_values(g, f, x[idx])
    ok = np.isfinite(fd) & np.isfinite(gd)
    if ok.any():
        rhs = (ari[idx] - 0.5 * (fd + gd)) / 6.0
        t.leq(gap[idx][ok], rhs[ok])
        t.leq(fd[ok], gv[idx][ok])
        t.leq(gd[ok], fv[idx][ok])
    return t


@register("gap-613", ["613", "6135"], "functional", _slack, GRID)
def gap_613(rng, cfg):
    """0 <= f(nabla_t)g - f #_t g <= t(1-t)(F_g(x,x*) (nabla) F_f(x,z*))."""
    f, g, p = _pair(rng, cfg)
    tl = Tally()
    fs = PLConvex.from_grid(f).conjugate()
    gs = PLConvex.from_grid(g).conjugate()
    x = p.x
    fv, gv = _v(f), _v(g)
    idx = np.flatnonzero(np.isfinite(fv) & np.isfinite(gv))
    xs = np.array([_subgradient_pick(f, x[i], rng) for i in idx])
    zs = np.array([_subgradient_pick(g, x[i], rng) for i in idx])
    avg = 0.5 * (_gap(gs, gv[idx], x[idx], xs) + _gap(fs, fv[idx], x[idx], zs))
    for lam in LAMBDAS:
        d = _finite_diff(_v(arith(f, g, lam)), _v(geometric(f, g, lam, pencil=p)))[idx]
        fin = np.isfinite(d)
        tl.value(float(np.min(d[fin])) if fin.any() else math.inf)
        tl.leq(d[fin], lam * (1 - lam) * avg[fin])
    return tl


@register("monotone-prPM", ["prPM"], "functional", _slack, GRID)
def monotone_prpm(rng, cfg):
    """f1 <= f2 implies f1 !_lam g <= f2 !_lam g and f1 #_lam g <= f2 #_lam g (both slots)."""
    f1, g = gen_pair(rng, _gen(cfg))
    bump = gen_convex_gridfn(rng, GenConfig(cfg["lo"], cfg["hi"], cfg["n"], cfg["kind"], 0.0))
    shift = bump.values - float(np.min(bump.values)) + rng.uniform(0.0, 0.5)
    f2 = GridFn(f1.lo, f1.hi, f1.values + shift)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    p1, p2 = HarmonicPencil(f1, g), HarmonicPencil(f2, g)
    q1, q2 = HarmonicPencil(g, f1), HarmonicPencil(g, f2)
    t.leq(_v(harmonic(f1, g, lam, p1)), _v(harmonic(f2, g, lam, p2)))
    t.leq(_v(geometric(f1, g, lam, pencil=p1)), _v(geometric(f2, g, lam, pencil=p2)))
    t.leq(_v(harmonic(g, f1, lam, q1)), _v(harmonic(g, f2, lam, q2)))
    t.leq(_v(geometric(g, f1, lam, pencil=q1)), _v(geometric(g, f2, lam, pencil=q2)))
    return t


@register("concave-thPC", ["thPC"], "functional", _slack, GRID)
def concave_thpc(rng, cfg):
    """(f,g) -> f !_lam g and f #_lam g are pointwise concave."""
    f1, g1, f2, g2 = gen_family(rng, 4, _gen(cfg))
    fm, gm = arith(f1, f2, 0.5), arith(g1, g2, 0.5)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    p1, p2, pm = HarmonicPencil(f1, g1), HarmonicPencil(f2, g2), HarmonicPencil(fm, gm)
    for mean in (lambda a, b, p: harmonic(a, b, lam, p),
                 lambda a, b, p: geometric(a, b, lam, pencil=p)):
        avg = ext_weighted_sum([0.5, 0.5], [_v(mean(f1, g1, p1)), _v(mean(f2, g2, p2))])
        t.leq(avg, _v(mean(fm, gm, pm)))
    return t


@register("convex-prchm", ["prchm"], "functional", _slack, GRID)
def convex_prchm(rng, cfg):
    """t -> f !_t g is pointwise convex on [0, 1]."""
    f, g, p = _pair(rng, cfg)
    tl = Tally()
    for _ in range(4):
        t1, t2 = np.sort(rng.uniform(0.0, 1.0, size=2))
        mid = p.row(0.5 * (t1 + t2))
        tl.leq(mid, ext_weighted_sum([0.5, 0.5], [p.row(t1), p.row(t2)]))
    return tl


@register("symmetry-435", ["435"], "functional", 1e-8, GRID)
def symmetry_435(rng, cfg):
    """m(f, g, lam) = m(g, f, 1 - lam) for the arithmetic, harmonic and geometric means."""
    f, g, p = _pair(rng, cfg)
    q = HarmonicPencil(g, f)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    scale = max(1.0, _sup(f), _sup(g))
    t.equal(_v(arith(f, g, lam)), _v(arith(g, f, 1 - lam)), scale)
    t.equal(_v(harmonic(f, g, lam, p)), _v(harmonic(g, f, 1 - lam, q)), scale)
    t.equal(_v(geometric(f, g, lam, pencil=p)), _v(geometric(g, f, 1 - lam, pencil=q)), scale)
    t.equal(_v(log_mean_harm(f, g, pencil=p)), _v(log_mean_harm(g, f, pencil=q)), scale)
    return t


@register("homogeneity-445", ["445"], "functional", 1e-8, GRID)
def homogeneity_445(rng, cfg):
    """alpha.f m alpha.g = alpha.(f m g) and f.alpha m g.alpha = (f m g).alpha."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    means = {
        "arith": lambda a, b: arith(a, b, lam),
        "harm": lambda a, b: harmonic(a, b, lam),
        "geom": lambda a, b: geometric(a, b, lam),
    }
    scale = max(1.0, _sup(f), _sup(g))
    for alpha in (0.5, 2.0):
        for mean in means.values():
            base = mean(f, g)
            t.equal(_v(mean(scalar_multiply(alpha, f), scalar_multiply(alpha, g))),
                    _v(scalar_multiply(alpha, base)), alpha * scale)
            t.equal(_v(mean(epi_scale(f, alpha), epi_scale(g, alpha))),
                    _v(epi_scale(base, alpha)), alpha * scale)
    return t


@register("endpoints-430", ["430"], "functional", 0.0, GRID)
def endpoints_430(rng, cfg):
    """Weights 0 and 1 return the operands exactly, even where the other is +inf."""
    f, g = gen_pair(rng, _gen({**cfg, "domain_prob": 1.0}))
    t = Tally()
    for mean in (arith, harmonic, geometric):
        for lam, want in ((0.0, f), (1.0, g)):
            got = mean(f, g, lam)
            t.value(0.0 if np.array_equal(got.values, want.values) else -1.0)
    return t


@register("idempotence", ["430", "480", "622", "510"], "functional", 1e-10, GRID)
def idempotence(rng, cfg):
    """Every mean of f with itself is f (G_s, U_s, L included)."""
    f = gen_convex_gridfn(rng, _gen(cfg))
    p = HarmonicPencil(f, f)
    scale = max(1.0, float(np.max(np.abs(f.values[f.finite]))))
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    s = float(rng.choice(S_VALUES))
    for res in (arith(f, f, lam), harmonic(f, f, lam, p), geometric(f, f, lam, pencil=p),
                log_mean_harm(f, f, pencil=p), family_G(f, f, lam, s, pencil=p),
                family_U(f, f, s, pencil=p)):
        t.equal(_v(res), _v(f), scale)
    return t


@register("harmonic-472", ["472", "470"], "functional", 1e-5, {**GRID, "domain_prob": 0.0})
def harmonic_472(rng, cfg):
    """f !_lam g equals the brute-force inf-convolution f.(1-lam) box g.lam."""
    f, g, p = _pair(rng, cfg)
    t = Tally()
    lam = float(rng.choice((0.3, 0.5, 0.7)))
    har = _v(harmonic(f, g, lam, p))
    b = inf_conv_at(epi_scale(f, 1 - lam), epi_scale(g, lam), p.x)
    fin = np.isfinite(har)
    inner = fin & np.roll(fin, 1) & np.roll(fin, -1)
    inner[[0, -1]] = False
    t.equal(har, b, mask=inner)
    return t


def _parabola(a: float, n: int, box: float = 1.0) -> GridFn:
    x = np.linspace(-box, box, n)
    return GridFn(-box, box, 0.5 * a * x * x)


@register("bridge-450", ["450", "455", "517", "519"], "functional", 1e-3, {"n": 513})
def bridge_450(rng, cfg):
    """Means of parabolas a x^2/2 and b x^2/2 are parabolas with the scalar mean."""
    a, b = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
    n = cfg["n"]
    f, g = _parabola(a, n), _parabola(b, n)
    p = HarmonicPencil(f, g)
    lam = float(rng.choice(LAMBDAS))
    x = p.x
    inner = np.abs(x) <= 0.9 * min(a, b) / max(a, b)
    t = Tally()
    pairs = [
        (harmonic(f, g, lam, p), 1.0 / ((1 - lam) / a + lam / b)),
        (geometric(f, g, lam, pencil=p), a ** (1 - lam) * b ** lam),
        (log_mean_harm(f, g, pencil=p), scalar_log_mean(a, b)),
    ]
    for res, c in pairs:
        t.equal(_v(res), 0.5 * c * x * x, mask=inner)
    return t
