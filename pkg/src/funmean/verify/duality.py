"""Randomised checks of conjugation, biconjugation and inf-convolution."""
from __future__ import annotations

import numpy as np

from ..convex_core import GridFn, Samples, epi_scale, scalar_multiply
from ..extreal import ext_add, ext_weighted_sum
from ..fenchel import (biconjugate, conjugate, fenchel_gap, inf_conv_at, inf_conv_brute,
                       inf_conv_dual)
from ..functional_means import _slope_interval_at
from .core import Tally, register
from .generators import GenConfig, gen_convex_gridfn, gen_pair

GRID = {"lo": -1.0, "hi": 1.0, "n": 257, "kind": "mixed", "domain_prob": 0.25,
        "dual": (-25.0, 25.0, 1001)}


def _gen(cfg) -> GenConfig:
    return GenConfig(cfg["lo"], cfg["hi"], cfg["n"], cfg["kind"], cfg["domain_prob"])


def _interior(v: np.ndarray) -> np.ndarray:
    fin = np.isfinite(v)
    inner = fin & np.roll(fin, 1) & np.roll(fin, -1)
    inner[[0, -1]] = False
    return inner


@register("duality-order", ["order", "105"], "duality", 1e-9, GRID)
def duality_order(rng, cfg):
    """f <= g nodewise gives g* <= f* on a shared dual grid."""
    f = gen_convex_gridfn(rng, _gen(cfg))
    bump = gen_convex_gridfn(rng, GenConfig(cfg["lo"], cfg["hi"], cfg["n"], cfg["kind"], 0.0))
    v = bump.values - np.min(bump.values)
    g = GridFn(f.lo, f.hi, ext_add(f.values, v))
    t = Tally()
    t.leq(conjugate(g, cfg["dual"]).values, conjugate(f, cfg["dual"]).values)
    return t


@register("duality-pc", ["pc"], "duality", 1e-9, GRID)
def duality_pc(rng, cfg):
    """The conjugate of a convex combination lies below the combination of conjugates."""
    f, g = gen_pair(rng, _gen(cfg))
    fs, gs = conjugate(f, cfg["dual"]).values, conjugate(g, cfg["dual"]).values
    t = Tally()
    for w in (0.25, 0.5, 0.75):
        mix = GridFn(f.lo, f.hi, ext_weighted_sum([1 - w, w], [f.values, g.values]))
        t.leq(conjugate(mix, cfg["dual"]).values, ext_weighted_sum([1 - w, w], [fs, gs]))
    return t


@register("duality-110", ["110"], "duality", 1e-6, GRID)
def duality_110(rng, cfg):
    """(alpha f)* = f* epi-scaled by alpha, for alpha in {1/2, 2}."""
    f = gen_convex_gridfn(rng, _gen(cfg))
    lo, hi, n = cfg["dual"]
    t = Tally()
    for alpha in (0.5, 2.0):
        left = conjugate(scalar_multiply(alpha, f), (alpha * lo, alpha * hi, n))
        right = epi_scale(conjugate(f, (lo, hi, n)), alpha)
        t.equal(left.values, right.values)
    return t


@register("duality-115", ["115", "120"], "duality", 1e-6, GRID)
def duality_115(rng, cfg):
    """(f inf-conv g)* = f* + g* with the inf-convolution taken by brute force."""
    f, g = gen_pair(rng, _gen(cfg))
    t = Tally()
    brute = inf_conv_brute(f, g)
    lhs = conjugate(brute, cfg["dual"]).values
    rhs = ext_add(conjugate(f, cfg["dual"]).values, conjugate(g, cfg["dual"]).values)
    t.equal(lhs, rhs)
    return t


@register("infconv-dual", ["120", "125", "472"], "duality", 1e-5, GRID)
def infconv_dual(rng, cfg):
    """Dual inf-convolution matches the primal minimisation on interior nodes."""
    f, g = gen_pair(rng, _gen(cfg))
    t = Tally()
    dual = inf_conv_dual(f, g).values
    t.equal(dual, inf_conv_brute(f, g).values, mask=_interior(dual))
    # unequal steps: compare at the output nodes directly
    a, b = float(rng.uniform(0.3, 0.7)), float(rng.uniform(0.8, 1.5))
    fa, gb = epi_scale(f, a), epi_scale(g, b)
    res = inf_conv_dual(fa, gb)
    t.equal(res.values, inf_conv_at(fa, gb, res.x), mask=_interior(res.values))
    return t


@register("biconjugate", ["biconj", "105"], "duality", 1e-8, GRID)
def biconjugate_suite(rng, cfg):
    """f** = f for convex f; f** <= f for raw samples, with equality on the hull."""
    f = gen_convex_gridfn(rng, _gen(cfg))
    t = Tally()
    scale = max(1.0, float(np.max(np.abs(f.values[f.finite]))))
    t.equal(biconjugate(f).values, f.values, scale=scale)
    raw = Samples(f.lo, f.hi, f.values + rng.normal(scale=0.05, size=f.n))
    bc = biconjugate(raw).values
    t.leq(bc, raw.values)
    # the hull touches the samples at least at the extreme finite nodes
    fin = np.flatnonzero(np.isfinite(raw.values))
    t.equal(bc[fin[[0, -1]]], raw.values[fin[[0, -1]]])
    return t


@register("fenchel-105", ["105", "6135"], "duality", 1e-10, GRID)
def fenchel_105(rng, cfg):
    """The Fenchel gap is nonnegative and vanishes on subgradient pairs."""
    f = gen_convex_gridfn(rng, _gen(cfg))
    t = Tally()
    i0, i1 = f.dom
    for i in rng.integers(i0, i1 + 1, size=8):
        x = float(f.x[i])
        scale = max(1.0, abs(float(f.values[i])))
        t.value(fenchel_gap(f, x, float(rng.uniform(-20, 20))).value / scale)
        lo, hi = _slope_interval_at(f, x)
        s = lo if np.isfinite(lo) else hi
        if np.isfinite(s):
            t.value(-abs(fenchel_gap(f, x, s).value) / scale)
    return t


@register("conjugate-inv", ["inv", "prEl"], "duality", 1e-6, {"n": 513, "box": 4.0})
def conjugate_inv(rng, cfg):
    """The conjugate of a x^2/2 is s^2/(2a) at the slopes of the grid."""
    a = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
    box, n = cfg["box"], cfg["n"]
    x = np.linspace(-box, box, n)
    f = GridFn(-box, box, 0.5 * a * x * x)
    # slopes a x_i are where the PL interpolant and the parabola share a conjugate
    fs = conjugate(f, (-a * box, a * box, n))
    t = Tally()
    t.equal(fs.values, fs.x ** 2 / (2 * a))
    return t
