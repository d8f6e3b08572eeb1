"""Acceptance criteria 1-8, each at its stated tolerance and time budget.

Every test prints one ``criterion N: PASS|FAIL`` line with its runtime.
"""
import math
import time

import numpy as np
import pytest

import funmean.functional_means as fm
from funmean.operator_means import (bridge_check, op_geom, op_harm, op_log_mean,
                                    op_log_mean_quad)
from funmean.quadrature import (check_547, gauss_jacobi_nu, gauss_legendre, i_s_estimate,
                                mu_rule, phi, phi_quad)
from funmean.verify import gen_spd, run_suite

TENTHS = [k / 10 for k in range(1, 10)]


@pytest.fixture
def verdict(capsys):
    def report(number, ok, seconds, budget, detail=""):
        within = budget is None or seconds < budget
        status = "PASS" if ok and within else "FAIL"
        limit = "" if budget is None else f" (budget {budget:g} s)"
        with capsys.disabled():
            print(f"\ncriterion {number}: {status}  {seconds:.2f} s{limit}  {detail}")
        assert ok, detail
        assert within, f"took {seconds:.1f} s, budget {budget} s"
    return report


def test_criterion_1_measure_identities(verdict):
    start = time.perf_counter()
    worst = 0.0
    for lam in TENTHS:
        r = gauss_jacobi_nu(lam, 64)
        worst = max(worst, abs(r.mass - 1.0), abs(r.integrate(lambda t: t) - lam))
    mu = mu_rule(64)
    worst = max(worst, abs(mu.mass - 1.0), abs(mu.integrate(lambda t: t) - 0.5))
    verdict(1, worst <= 1e-10, time.perf_counter() - start, 1.0, f"worst error {worst:.1e}")


def test_criterion_2_closed_form_integrals(verdict):
    start = time.perf_counter()
    phi_err = max(abs(phi_quad(x) - phi(x)) for x in (0.1, 1.0, 5.0, 50.0))
    rep = check_547(1e-8)
    by = {e["name"]: e for e in rep["integrals"]}
    four = ("t_weight", "one_minus_t_weight", "tan", "cot")
    int_err = max(by[name]["error"] for name in four)
    ok = phi_err <= 1e-10 and int_err <= 1e-8 and by["u_four_log"]["error"] <= 1e-8
    verdict(2, ok, time.perf_counter() - start, 1.0,
            f"phi error {phi_err:.1e}, integral error {int_err:.1e}")


@pytest.mark.xfail(strict=True, reason="with log^2 u in place of 4 log^2 u the integral is 1/2")
def test_criterion_2_u_integral_as_literally_written():
    lit = {e["name"]: e for e in check_547()["integrals"]}["u_literal"]
    assert lit["value"] == pytest.approx(0.25, abs=1e-8)


def test_criterion_3_log_mean_routes(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    geo, harm = gauss_legendre(64), mu_rule(64)
    worst = 0.0
    for i in range(100):
        d = int(rng.integers(1, 9))
        a, b = gen_spd([3, i, 0], d).entries, gen_spd([3, i, 1], d).entries
        closed = op_log_mean(a, b)
        scale = np.linalg.norm(closed)
        for route, rule in (("geo", geo), ("harm", harm)):
            err = np.linalg.norm(op_log_mean_quad(a, b, rule, route) - closed) / scale
            worst = max(worst, err)
    verdict(3, worst <= 1e-8, time.perf_counter() - start, 10.0,
            f"worst relative error {worst:.1e}")


OPERATOR_SUITES = ["operator-460", "operator-513", "operator-620", "operator-inverse",
                   "operator-diamond"]


def test_criterion_4_operator_suites(verdict):
    start = time.perf_counter()
    reps = [run_suite(name, 100, 4, 1e-9) for name in OPERATOR_SUITES]
    bad = [r.suite_name for r in reps if r.violations or r.min_margin < -1e-9]
    worst = min(r.min_margin for r in reps)
    verdict(4, not bad, time.perf_counter() - start, 30.0,
            f"worst margin {worst:+.1e}, failing {bad}")


FUNCTIONAL_SUITES = ["chain-440", "chain-513", "refine-485", "refine-625", "ratio-610",
                     "bounds-612", "gap-615", "monotone-prPM", "convex-prchm",
                     "concave-thPC", "monotone-G", "monotone-U"]


def test_criterion_5_functional_suites(verdict):
    start = time.perf_counter()
    h = 2.0 / 512
    slack = 10 * h * h + 1e-8
    reps = [run_suite(name, 200, 5, slack) for name in FUNCTIONAL_SUITES]
    bad = [r.suite_name for r in reps if r.violations or r.min_margin < -slack]
    worst = min(r.min_margin for r in reps)
    verdict(5, not bad, time.perf_counter() - start, 300.0,
            f"worst margin {worst:+.1e} vs slack {slack:.1e}, failing {bad}")


DUALITY_SUITES = {"conjugate-inv": 1e-6, "biconjugate": 1e-8, "duality-115": 1e-6,
                  "duality-110": 1e-6, "infconv-dual": 1e-5, "harmonic-472": 1e-5}


def test_criterion_6_duality_engine(verdict):
    start = time.perf_counter()
    bad = []
    for name, tol in DUALITY_SUITES.items():
        r = run_suite(name, 50, 6, tol)
        if r.violations or r.min_margin < -tol:
            bad.append(name)
    verdict(6, not bad, time.perf_counter() - start, 60.0, f"failing {bad}")


BRIDGES = [
    ("harmonic", lambda a, b: op_harm(a, b, 0.5), lambda f, g: fm.harmonic(f, g, 0.5)),
    ("geometric", lambda a, b: op_geom(a, b, 0.5), lambda f, g: fm.geometric(f, g, 0.5)),
    ("log (mu rule)", op_log_mean, fm.log_mean_harm),
    ("log (dt rule)", op_log_mean, fm.log_mean_geo),
]


def test_criterion_7_bridge_fidelity(verdict):
    start = time.perf_counter()
    a, b = [[1.0]], [[math.e ** 2]]
    lines, ok = [], True
    for name, op, pipe in BRIDGES:
        want = op(a, b)
        coarse = bridge_check(a, b, 0.5, want, pipe, n=513, box=4.0, tolerance=1e-3)
        fine = bridge_check(a, b, 0.5, want, pipe, n=1025, box=4.0, tolerance=1e-3)
        ratio = coarse.max_error / fine.max_error
        ok = ok and coarse.passed and ratio >= 3.0
        lines.append(f"{name} {coarse.max_error:.1e} ratio {ratio:.2f}")
    verdict(7, ok, time.perf_counter() - start, 60.0, "; ".join(lines))


def test_criterion_8_i_s_bounds(verdict):
    start = time.perf_counter()
    ok = True
    for s in TENTHS:
        v, est = i_s_estimate(s)
        ok = ok and 0.25 <= v <= 0.5 and est <= 1e-8
    half, est = i_s_estimate(0.5)
    big = 4 * half
    ok = ok and 1.0 <= big <= 2.0 and 4 * est <= 1e-8
    verdict(8, ok, time.perf_counter() - start, None, f"I = {big:.12f}")
