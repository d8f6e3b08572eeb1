"""Means of symmetric positive-definite matrices.

Every weighted mean here is a congruence ``A^{1/2} h(M) A^{1/2}`` with
``M = A^{-1/2} B A^{-1/2}`` and ``h`` a scalar function applied to the
eigenvalues of ``M``; the harmonic and arithmetic means are also available
in their direct forms. Inputs may be :class:`SpdMatrix` or plain arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_core import GridFn, SpdMatrix, eval_quadratic
from .errors import ConditioningError, ConfigurationError
from .linalg import COND_MAX, sym_eig, symmetrize
from .quadrature import QuadRule, default_nodes, gauss_legendre, mu_rule

__all__ = [
    "sym_eig", "spd_power", "op_arith", "op_harm", "op_geom", "parallel_sum",
    "op_log_mean", "op_log_mean_quad", "op_diamond", "scalar_log_mean",
    "log_mean_ratio", "psd_margin", "bridge_check", "BridgeReport",
]


def _arr(a) -> np.ndarray:
    if isinstance(a, SpdMatrix):
        return a.entries
    a = np.asarray(a, dtype=float)
    return a.reshape(1, 1) if a.ndim == 0 else a


def _spd_eig(a, cond_max: float = COND_MAX):
    w, q = sym_eig(a)
    if w[0] <= 0.0:
        raise ConditioningError("matrix is not positive definite")
    if w[-1] / w[0] > cond_max:
        raise ConditioningError(f"condition number {w[-1] / w[0]:.3g} exceeds {cond_max:.0e}")
    return w, q


def spd_power(a, t: float) -> np.ndarray:
    """``A**t = Q diag(w**t) Q^T``."""
    w, q = _spd_eig(_arr(a), cond_max=math.inf)
    return symmetrize((q * w ** float(t)) @ q.T)


def psd_margin(m) -> float:
    """Smallest eigenvalue of the symmetric part of ``m``."""
    return float(sym_eig(symmetrize(m))[0][0])


class _Congruence:
    """``A^{1/2}``, ``A^{-1/2}`` and the eigensystem of ``A^{-1/2} B A^{-1/2}``."""

    def __init__(self, a, b):
        a, b = _arr(a), _arr(b)
        wa, qa = _spd_eig(a)
        _spd_eig(b)
        ra = np.sqrt(wa)
        self.half = (qa * ra) @ qa.T
        self.inv_half = (qa / ra) @ qa.T
        m = symmetrize(self.inv_half @ b @ self.inv_half)
        self.mw, self.mq = sym_eig(m)

    def apply(self, fn) -> np.ndarray:
        inner = (self.mq * fn(self.mw)) @ self.mq.T
        return symmetrize(self.half @ inner @ self.half)


def _inv(a) -> np.ndarray:
    w, q = _spd_eig(a)
    return symmetrize((q / w) @ q.T)


def _lam(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def op_arith(a, b, lam: float = 0.5) -> np.ndarray:
    lam = _lam(lam)
    a, b = _arr(a), _arr(b)
    if lam == 0.0:
        return a.copy()
    if lam == 1.0:
        return b.copy()
    return (1.0 - lam) * a + lam * b


def op_harm(a, b, lam: float = 0.5) -> np.ndarray:
    """``((1 - lam) A^-1 + lam B^-1)^-1``."""
    lam = _lam(lam)
    a, b = _arr(a), _arr(b)
    if lam == 0.0:
        return a.copy()
    if lam == 1.0:
        return b.copy()
    return _inv((1.0 - lam) * _inv(a) + lam * _inv(b))


def op_geom(a, b, lam: float = 0.5) -> np.ndarray:
    """``A^{1/2} (A^{-1/2} B A^{-1/2})^lam A^{1/2}``."""
    lam = _lam(lam)
    a, b = _arr(a), _arr(b)
    if lam == 0.0:
        return a.copy()
    if lam == 1.0:
        return b.copy()
    return _Congruence(a, b).apply(lambda w: w ** lam)


def parallel_sum(a, b) -> np.ndarray:
    """``(A^-1 + B^-1)^-1``."""
    return _inv(_inv(_arr(a)) + _inv(_arr(b)))


def log_mean_ratio(x):
    """``F(x) = (x - 1) / log x`` with ``F(1) = 1``; series near 1."""
    x = np.asarray(x, dtype=float)
    y = x - 1.0
    small = np.abs(y) < 1e-4
    out = np.empty_like(x)
    ys = y[small]
    out[small] = 1.0 + ys / 2.0 - ys * ys / 12.0 + ys ** 3 / 24.0
    yb = y[~small]
    out[~small] = yb / np.log1p(yb)
    return out


def op_log_mean(a, b) -> np.ndarray:
    """``L(A, B) = A^{1/2} F(A^{-1/2} B A^{-1/2}) A^{1/2}``."""
    return _Congruence(a, b).apply(log_mean_ratio)


def op_log_mean_quad(a, b, rule: QuadRule | None = None, route: str = "harm") -> np.ndarray:
    """Quadrature forms of the logarithmic mean.

    ``route="geo"`` integrates ``A #_t B`` against ``dt``; ``route="harm"``
    integrates ``A !_t B`` against ``mu``. The eigendecompositions are shared
    across nodes, so each node costs only the matrix products.
    """
    a, b = _arr(a), _arr(b)
    if route == "geo":
        r = gauss_legendre(2 * default_nodes()["nu"]) if rule is None else rule
        if r.measure_tag != "lebesgue":
            raise ConfigurationError(f"geo route needs a Lebesgue rule, got {r!r}")
        cg = _Congruence(a, b)
        acc = sum(w * (cg.mq * cg.mw ** t) @ cg.mq.T for t, w in zip(r.nodes, r.weights))
        return symmetrize(cg.half @ acc @ cg.half)
    if route == "harm":
        r = mu_rule(default_nodes()["mu"]) if rule is None else rule
        if r.measure_tag != "mu":
            raise ConfigurationError(f"harm route needs a mu rule, got {r!r}")
        # A !_t B = A^{1/2} ((1-t) + t M^{-1})^{-1} A^{1/2}
        cg = _Congruence(a, b)
        acc = np.zeros_like(a)
        for t, w in zip(r.nodes, r.weights):
            acc = acc + w * (cg.mq / ((1.0 - t) + t / cg.mw)) @ cg.mq.T
        return symmetrize(cg.half @ acc @ cg.half)
    raise ValueError(f"unknown route {route!r}; use 'geo' or 'harm'")


def op_diamond(a, b) -> np.ndarray:
    """``2A - A B^-1 A``; symmetric but not necessarily positive."""
    a, b = _arr(a), _arr(b)
    return symmetrize(2.0 * a - a @ _inv(b) @ a)


def scalar_log_mean(a: float, b: float) -> float:
    """``(a - b) / (log a - log b)``, equal to ``a`` when ``a == b``."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ValueError("arguments must be positive")
    return a * float(log_mean_ratio(np.array([b / a]))[0])


# --- bridge to grid functionals -----------------------------------------


@dataclass
class BridgeReport:
    kind: str
    d: int
    max_error: float
    tolerance: float
    passed: bool
    detail: dict


def bridge_check(a, b, lam: float, op_result, functional_pipeline=None, *,
                 kind: str = "mean", n: int = 513, box: float = 1.0,
                 tolerance: float = 1e-4, seed: int = 0, samples: int = 100) -> BridgeReport:
    """Compare an operator mean against its functional counterpart.

    For ``d = 1`` the functional pipeline ``(f, g) -> GridFn`` runs on the
    parabolas ``a x^2 / 2`` and ``b x^2 / 2`` over ``[-box, box]`` and is
    compared with ``op_result x^2 / 2`` where the box does not bind (the
    harmonic rows stay quadratic for ``|x| <= box min(a,b)/max(a,b)``).

    For ``d > 1`` it samples ``samples`` unit vectors and checks that the
    ordering of ``Q_{op_result}`` against ``Q_A`` and ``Q_B`` on them agrees
    with the sign of the matrix margins, plus ``Q_{op_result}`` is sandwiched
    between ``Q_{A!B}`` and ``Q_{A(nabla)B}`` as the operator chain requires.
    """
    a, b, c = _arr(a), _arr(b), _arr(op_result)
    d = a.shape[0]
    if d == 1:
        if functional_pipeline is None:
            raise ValueError("d = 1 needs a functional pipeline")
        av, bv, cv = float(a[0, 0]), float(b[0, 0]), float(c[0, 0])
        x = np.linspace(-box, box, n)
        f = GridFn(-box, box, 0.5 * av * x * x)
        g = GridFn(-box, box, 0.5 * bv * x * x)
        res = functional_pipeline(f, g)
        inner = np.abs(res.x) <= 0.9 * box * min(av, bv) / max(av, bv)
        err = float(np.max(np.abs(res.values[inner] - 0.5 * cv * res.x[inner] ** 2)))
        return BridgeReport(kind, 1, err, tolerance, err <= tolerance,
                            {"lambda": lam, "interior_nodes": int(inner.sum()), "n": n})
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(samples, d))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    lo, hi = op_harm(a, b, lam), op_arith(a, b, lam)
    worst = math.inf
    consistent = True
    for m in (lo, hi):
        lower, upper = (m, c) if m is lo else (c, m)
        margin = psd_margin(upper - lower)
        q_diff = min(eval_quadratic(upper, v) - eval_quadratic(lower, v) for v in xs)
        worst = min(worst, margin)
        # a PSD difference forces every quadratic difference to be >= 0
        if margin >= -1e-10 and q_diff < -1e-10 * np.abs(upper).max():
            consistent = False
    return BridgeReport(kind, d, -min(worst, 0.0), 1e-10,
                        consistent and worst >= -1e-10,
                        {"lambda": lam, "min_margin": worst, "samples": samples})
