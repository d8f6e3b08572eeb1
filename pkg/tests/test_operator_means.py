import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import funmean.functional_means as fm
from funmean.convex_core import SpdMatrix, eval_many
from funmean.errors import ConditioningError, ConfigurationError, DimensionError
from funmean.linalg import jacobi_eigh, sym_eig
from funmean.operator_means import (bridge_check, log_mean_ratio, op_arith, op_diamond,
                                    op_geom, op_harm, op_log_mean, op_log_mean_quad,
                                    parallel_sum, psd_margin, scalar_log_mean, spd_power)
from funmean.quadrature import gauss_legendre, mu_rule
from oracles import mat_geom, mat_log_mean_integral, random_spd
from strategies import spd_matrices

E = math.e
D14, D91 = np.diag([1.0, 4.0]), np.diag([9.0, 1.0])


def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# --- eigensolvers ------------------------------------------------------------------


def test_sym_eig_examples():
    w, q = sym_eig(D14)
    assert np.array_equal(w, [1.0, 4.0])
    assert np.allclose(np.abs(q), np.eye(2))
    r = _rot(0.7)
    w, _ = sym_eig(r @ np.diag([2.0, 3.0]) @ r.T)
    assert np.allclose(w, [2.0, 3.0], atol=1e-10)
    assert np.allclose(sym_eig(np.eye(4))[0], 1.0)


@pytest.mark.parametrize("d", [1, 2, 5, 8, 20])
def test_jacobi_matches_lapack(d):
    a = random_spd(np.random.default_rng(d), d, cond=100.0)
    w, q = jacobi_eigh(a)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-12 * np.abs(a).max())
    assert np.linalg.norm(a @ q - q * w) <= 1e-10 * np.linalg.norm(a)
    assert np.allclose(q.T @ q, np.eye(d), atol=1e-12)
    w2, q2 = sym_eig(a, method="jacobi")
    assert np.allclose(w2, w)


def test_non_square_rejected():
    with pytest.raises(DimensionError):
        sym_eig(np.ones((2, 3)))


# --- powers and the three means ------------------------------------------------------


def test_spd_power_examples():
    assert np.allclose(spd_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]), atol=1e-14)
    a = random_spd(np.random.default_rng(0), 4)
    assert np.allclose(spd_power(a, 1.0), a, atol=1e-12)
    assert np.allclose(spd_power(a, 0.0), np.eye(4), atol=1e-12)
    assert np.allclose(spd_power(spd_power(a, 0.5), 2.0), a, atol=1e-9)


def test_commuting_pair_examples():
    assert np.allclose(op_geom(D14, D91, 0.5), np.diag([3.0, 2.0]), atol=1e-14)
    assert np.allclose(op_arith(D14, D91, 0.5), np.diag([5.0, 2.5]), atol=1e-15)
    assert np.allclose(op_harm(D14, D91, 0.5), np.diag([1.8, 1.6]), atol=1e-14)


def test_equal_operands():
    a = random_spd(np.random.default_rng(1), 5)
    for mean in (op_arith, op_harm, op_geom):
        assert np.allclose(mean(a, a, 0.3), a, atol=1e-11)
    assert np.allclose(op_log_mean(a, a), a, atol=1e-11)


def test_endpoints_return_operands():
    a, b = random_spd(np.random.default_rng(2), 3), random_spd(np.random.default_rng(3), 3)
    for mean in (op_arith, op_harm, op_geom):
        assert np.array_equal(mean(a, b, 0.0), a)
        assert np.array_equal(mean(a, b, 1.0), b)
    with pytest.raises(ValueError):
        op_geom(a, b, 1.2)


@pytest.mark.parametrize("seed", range(5))
def test_geometric_mean_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 9))
    a, b = random_spd(rng, d), random_spd(rng, d)
    for lam in (0.25, 0.5, 0.8):
        want = mat_geom(a, b, lam)
        assert np.linalg.norm(op_geom(a, b, lam) - want) <= 1e-10 * np.linalg.norm(want)


def test_spd_matrix_inputs():
    a = SpdMatrix(D14)
    assert np.allclose(op_geom(a, SpdMatrix(D91)), np.diag([3.0, 2.0]))


# --- parallel sum and diamond ----------------------------------------------------------


def test_parallel_sum_examples():
    assert np.allclose(parallel_sum(2 * np.eye(3), 2 * np.eye(3)), np.eye(3), atol=1e-15)
    assert np.allclose(parallel_sum(np.diag([1.0, 3.0]), np.diag([1.0, 6.0])),
                       np.diag([0.5, 2.0]), atol=1e-15)
    rng = np.random.default_rng(4)
    a, b = random_spd(rng, 4), random_spd(rng, 4)
    assert np.allclose(parallel_sum(a, b), parallel_sum(b, a), atol=1e-12)
    assert np.allclose(parallel_sum(a, b), 0.5 * op_harm(a, b, 0.5), atol=1e-12)


def test_diamond_examples():
    assert op_diamond([[1.0]], [[2.0]])[0, 0] == pytest.approx(1.5, abs=1e-15)
    witness = op_diamond([[1.0]], [[0.1]])
    assert witness[0, 0] == pytest.approx(-8.0, abs=1e-13)
    assert psd_margin(witness) < 0


@given(spd_matrices(), st.integers(0, 2 ** 31))
def test_b_minus_diamond_is_psd(a, seed):
    b = random_spd(np.random.default_rng(seed), a.shape[0])
    gap = b - op_diamond(a, b)
    assert psd_margin(gap) >= -1e-9 * np.abs(gap).max()


# --- logarithmic mean ---------------------------------------------------------------


def test_log_mean_examples():
    assert op_log_mean([[1.0]], [[E]])[0, 0] == pytest.approx(E - 1, abs=1e-14)
    got = op_log_mean(D14, np.diag([E, 4.0]))
    assert np.allclose(got, np.diag([E - 1, 4.0]), atol=1e-14)
    want = 8 / math.log(9)
    for route, rule in (("geo", gauss_legendre(64)), ("harm", mu_rule(64))):
        assert op_log_mean_quad([[1.0]], [[9.0]], rule, route)[0, 0] == pytest.approx(want,
                                                                                       abs=1e-9)


def test_scalar_log_mean():
    assert scalar_log_mean(1, E) == pytest.approx(E - 1, rel=1e-15)
    assert scalar_log_mean(5, 5) == 5
    rng = np.random.default_rng(5)
    for a, b in rng.uniform(0.01, 100, size=(20, 2)):
        assert scalar_log_mean(a, b) == pytest.approx(scalar_log_mean(b, a), rel=1e-14)
        assert scalar_log_mean(a, b) == pytest.approx((a - b) / (math.log(a) - math.log(b)),
                                                      rel=1e-12)
    with pytest.raises(ValueError):
        scalar_log_mean(0, 1)


def test_log_mean_ratio_near_one_is_smooth():
    x = 1 + np.array([-2e-4, -1e-4, -5e-5, 0.0, 5e-5, 1e-4, 2e-4])
    f = log_mean_ratio(x)
    assert f[3] == 1.0
    assert np.all(np.diff(f) > 0)
    # both branches track the exact value on either side of the switch
    import mpmath
    for y in (0.99999e-4, 1.00001e-4, -0.99999e-4, -1.00001e-4, 3e-7):
        want = float(mpmath.mpf(y) / mpmath.log1p(mpmath.mpf(y)))
        assert log_mean_ratio(np.array([1 + y]))[0] == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_log_mean_quadratures_match_closed_form(seed):
    rng = np.random.default_rng(100 + seed)
    d = int(rng.integers(2, 9))
    a, b = random_spd(rng, d), random_spd(rng, d)
    closed = op_log_mean(a, b)
    scale = np.linalg.norm(closed)
    for route, rule in (("geo", gauss_legendre(64)), ("harm", mu_rule(64))):
        assert np.linalg.norm(op_log_mean_quad(a, b, rule, route) - closed) <= 1e-8 * scale
    assert np.linalg.norm(mat_log_mean_integral(a, b) - closed) <= 1e-8 * scale


def test_log_mean_quad_rule_checks():
    with pytest.raises(ConfigurationError):
        op_log_mean_quad(D14, D91, mu_rule(8), "geo")
    with pytest.raises(ConfigurationError):
        op_log_mean_quad(D14, D91, gauss_legendre(8), "harm")
    with pytest.raises(ValueError):
        op_log_mean_quad(D14, D91, route="simpson")


# --- chains and conditioning ------------------------------------------------------------


@given(spd_matrices(), st.integers(0, 2 ** 31), st.sampled_from([0.25, 0.5, 0.75]))
def test_operator_chain(a, seed, lam):
    b = random_spd(np.random.default_rng(seed), a.shape[0])
    h, g, ar = op_harm(a, b, lam), op_geom(a, b, lam), op_arith(a, b, lam)
    tol = 1e-10 * max(np.abs(a).max(), np.abs(b).max())
    assert psd_margin(g - h) >= -tol
    assert psd_margin(ar - g) >= -tol
    lm = op_log_mean(a, b)
    assert psd_margin(lm - op_harm(a, b, 0.5)) >= -tol
    assert psd_margin(op_arith(a, b, 0.5) - lm) >= -tol


@given(spd_matrices(), st.integers(0, 2 ** 31), st.sampled_from([0.3, 0.5]))
def test_operator_swap_symmetry(a, seed, lam):
    b = random_spd(np.random.default_rng(seed), a.shape[0])
    s = max(np.abs(a).max(), np.abs(b).max())
    for mean in (op_arith, op_harm, op_geom):
        assert np.allclose(mean(a, b, lam), mean(b, a, 1 - lam), atol=1e-10 * s)
    assert np.allclose(op_log_mean(a, b), op_log_mean(b, a), atol=1e-10 * s)


def test_commuting_inputs_are_eigenvalue_wise():
    a, b = np.diag([0.5, 2.0, 7.0]), np.diag([3.0, 2.0, 0.1])
    av, bv = np.diag(a), np.diag(b)
    assert np.allclose(np.diag(op_geom(a, b, 0.3)), av ** 0.7 * bv ** 0.3, rtol=1e-14)
    assert np.allclose(np.diag(op_harm(a, b, 0.3)), 1 / (0.7 / av + 0.3 / bv), rtol=1e-14)
    assert np.allclose(np.diag(op_log_mean(a, b)),
                       [scalar_log_mean(x, y) for x, y in zip(av, bv)], rtol=1e-14)


def test_conditioning_errors():
    bad = np.diag([1.0, 1e-14])
    with pytest.raises(ConditioningError):
        op_harm(np.eye(2), bad)
    with pytest.raises(ConditioningError):
        op_geom(np.eye(2), np.diag([1.0, -1.0]))


# --- bridge -------------------------------------------------------------------------


def test_bridge_harmonic_example():
    rep = bridge_check([[1.0]], [[3.0]], 0.5, op_harm([[1.0]], [[3.0]], 0.5),
                       lambda f, g: fm.harmonic(f, g, 0.5), kind="harmonic", box=4.0)
    assert rep.passed and rep.max_error <= 1e-4
    res = fm.harmonic(*(fm.GridFn(-4, 4, 0.5 * a * np.linspace(-4, 4, 513) ** 2)
                        for a in (1.0, 3.0)), 0.5)
    assert abs(float(eval_many(res, 0.5)) - 0.1875) <= 1e-4


def test_bridge_log_mean_example():
    c = op_log_mean([[1.0]], [[E ** 2]])
    assert c[0, 0] == pytest.approx((E ** 2 - 1) / 2, rel=1e-14)
    rep = bridge_check([[1.0]], [[E ** 2]], 0.5, c, fm.log_mean_harm, kind="log",
                       box=4.0, tolerance=1e-3)
    assert rep.passed


def test_bridge_matrix_sampling():
    rng = np.random.default_rng(7)
    a, b = random_spd(rng, 4), random_spd(rng, 4)
    rep = bridge_check(a, b, 0.5, op_geom(a, b, 0.5), kind="geometric")
    assert rep.passed and rep.d == 4
    # a wrong "mean" that overshoots the arithmetic mean is caught
    rep = bridge_check(a, b, 0.5, op_arith(a, b, 0.5) + np.eye(4), kind="bogus")
    assert not rep.passed
