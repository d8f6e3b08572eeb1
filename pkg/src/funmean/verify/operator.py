"""Randomised checks of the SPD operator mean inequalities and identities."""
from __future__ import annotations

import math

import numpy as np

from ..convex_core import QuadraticFn, SpdMatrix, eval_quadratic
from ..fenchel import conjugate_quadratic, fenchel_gap
from ..operator_means import (bridge_check, op_arith, op_diamond, op_geom, op_harm, op_log_mean,
                              op_log_mean_quad, parallel_sum, psd_margin, scalar_log_mean)
from .core import Tally, register
from .generators import gen_spd

SPD = {"d_min": 2, "d_max": 8, "cond_max": 100.0}
LAMBDAS = (0.25, 0.5, 0.75)


def _spd_pair(rng, cfg):
    d = int(rng.integers(cfg["d_min"], cfg["d_max"] + 1))
    return gen_spd(rng, d, cfg["cond_max"]).entries, gen_spd(rng, d, cfg["cond_max"]).entries


def _inv(a):
    return np.linalg.inv(a)


def _rel(x, y) -> float:
    return float(np.linalg.norm(x - y) / max(np.linalg.norm(y), 1e-300))


@register("operator-460", ["460", "455"], "operator", 1e-10, SPD)
def operator_460(rng, cfg):
    """A !_lam B <= A #_lam B <= A (nabla)_lam B as eigenvalue margins."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    for lam in LAMBDAS:
        h, g, m = op_harm(a, b, lam), op_geom(a, b, lam), op_arith(a, b, lam)
        t.value(psd_margin(g - h))
        t.value(psd_margin(m - g))
    return t


@register("operator-513", ["513", "517", "519"], "operator", 1e-10, SPD)
def operator_513(rng, cfg):
    """A!B <= L(A,B) <= A(nabla)B."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    lm = op_log_mean(a, b)
    t.value(psd_margin(lm - op_harm(a, b)))
    t.value(psd_margin(op_arith(a, b) - lm))
    return t


@register("operator-620", ["620"], "operator", 1e-9, SPD)
def operator_620(rng, cfg):
    """A(nabla)B - L(A,B) <= ((AB^-1A)(nabla)(BA^-1B) - A(nabla)B)/6, plus the 1x1 case."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    am = op_arith(a, b)
    upper = (op_arith(a @ _inv(b) @ a, b @ _inv(a) @ b) - am) / 6.0
    t.value(psd_margin(upper - (am - op_log_mean(a, b))))
    x, y = np.exp(rng.uniform(-2.3, 2.3, size=2))
    mid = 0.5 * (x + y)
    t.value(mid * (x - y) ** 2 / (6.0 * x * y) - (mid - scalar_log_mean(x, y)))
    return t


@register("operator-inverse", ["inverse", "prEl"], "operator", 1e-10, SPD)
def operator_inverse(rng, cfg):
    """Inversion reverses order and is operator convex."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    # B = A + P with P positive semidefinite, possibly rank deficient
    d = a.shape[0]
    k = int(rng.integers(1, d + 1))
    v = rng.normal(size=(d, k))
    upper = a + v @ v.T * rng.uniform(0.1, 2.0) / k
    t.value(psd_margin(_inv(a) - _inv(upper)))
    for w in LAMBDAS:
        t.value(psd_margin((1 - w) * _inv(a) + w * _inv(b) - _inv((1 - w) * a + w * b)))
    return t


@register("operator-diamond", ["prdiamond", "614"], "operator", 1e-10, SPD)
def operator_diamond(rng, cfg):
    """B - A(diamond)B is positive semidefinite."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    t.value(psd_margin(b - op_diamond(a, b)))
    return t


@register("operator-symmetry", ["435", "parallel"], "operator", 1e-10, SPD)
def operator_symmetry(rng, cfg):
    """m(A,B) at lam equals m(B,A) at 1-lam; L and the parallel sum are symmetric."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    for mean in (op_arith, op_harm, op_geom):
        t.value(-_rel(mean(a, b, lam), mean(b, a, 1 - lam)))
    t.value(-_rel(op_log_mean(a, b), op_log_mean(b, a)))
    ps = parallel_sum(a, b)
    t.value(-_rel(ps, parallel_sum(b, a)))
    t.value(-_rel(ps, 0.5 * op_harm(a, b, 0.5)))
    return t


@register("operator-commuting", ["455", "519"], "operator", 1e-12, SPD)
def operator_commuting(rng, cfg):
    """Diagonal inputs give the eigenvalue-wise scalar means."""
    d = int(rng.integers(cfg["d_min"], cfg["d_max"] + 1))
    half = 0.5 * math.log(cfg["cond_max"])
    x, y = np.exp(rng.uniform(-half, half, size=(2, d)))
    a, b = np.diag(x), np.diag(y)
    lam = float(rng.choice(LAMBDAS))
    t = Tally()
    expected = [
        (op_arith(a, b, lam), (1 - lam) * x + lam * y),
        (op_harm(a, b, lam), 1.0 / ((1 - lam) / x + lam / y)),
        (op_geom(a, b, lam), x ** (1 - lam) * y ** lam),
        (op_log_mean(a, b), np.array([scalar_log_mean(p, q) for p, q in zip(x, y)])),
    ]
    for got, want in expected:
        t.value(-_rel(got, np.diag(want)))
    return t


@register("operator-log", ["519", "540", "510", "517"], "operator", 1e-8, SPD)
def operator_log(rng, cfg):
    """Closed-form L(A,B) against the dt-of-geometric and d-mu-of-harmonic quadratures."""
    a, b = _spd_pair(rng, cfg)
    t = Tally()
    closed = op_log_mean(a, b)
    for route in ("geo", "harm"):
        t.value(-_rel(op_log_mean_quad(a, b, route=route), closed))
    return t


@register("bridge-prEl", ["prEl", "450", "460", "inv"], "operator", 1e-10, SPD)
def bridge_prel(rng, cfg):
    """Quadratic forms follow the operator order, sums and conjugation."""
    a, b = _spd_pair(rng, cfg)
    d = a.shape[0]
    t = Tally()
    lam = float(rng.choice(LAMBDAS))
    rep = bridge_check(a, b, lam, op_geom(a, b, lam), seed=int(rng.integers(2 ** 31)))
    t.value(0.0 if rep.passed else -max(rep.max_error, 1.0))
    xs = rng.normal(size=(20, d))
    qa, qb = QuadraticFn(SpdMatrix(a)), QuadraticFn(SpdMatrix(b))
    for x in xs:
        scale = float(x @ x) * max(np.abs(a).max(), np.abs(b).max())
        t.value(-abs(eval_quadratic(SpdMatrix(a + b), x) - eval_quadratic(qa, x)
                     - eval_quadratic(qb, x)) / scale)
        t.value(-abs(eval_quadratic(SpdMatrix(2.5 * a), x) - 2.5 * eval_quadratic(qa, x)) / scale)
        # Q_A* = Q_{A^-1}: the Fenchel gap vanishes on gradient pairs and is >= 0 elsewhere
        t.value(-abs(fenchel_gap(qa, x, a @ x).value) / scale)
        t.value(fenchel_gap(qa, x, rng.normal(size=d)).value / scale)
    t.value(-_rel(conjugate_quadratic(conjugate_quadratic(qa)).matrix.entries, a))
    return t
