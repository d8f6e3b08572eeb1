"""Quadrature rules for the measures behind the integral means.

* ``gauss_legendre(n)``: Lebesgue measure on (0, 1).
* ``gauss_jacobi_nu(lam, n)``: the probability measure
  ``sin(pi lam)/pi * t**(lam-1) * (1-t)**(-lam) dt``.
* ``mu_rule(n)``: ``dt / (t (1-t) (pi**2 + logit(t)**2))``.

Nodes of the first two come from the Golub-Welsch eigenproblem, solved with
the implicit QL iteration below. The third needs no eigenproblem: with
``u = logit(t)`` and ``u = pi tan(pi (v - 1/2))`` the measure becomes ``dv``,
so Gauss-Legendre nodes in ``v`` are pushed through that map.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

__all__ = [
    "QuadRule", "gauss_legendre", "gauss_jacobi_nu", "mu_rule", "tridiag_eig",
    "phi", "phi_quad", "psi_density", "omega", "omega_integral", "i_s",
    "i_s_estimate", "check_547", "default_nodes", "sigmoid", "logit",
    "nu_moment",
]

MAX_NODES = 512
_EPS = np.finfo(float).eps


def default_nodes() -> dict:
    """Node counts, overridable through ``FUNMEAN_NODES``.

    ``FUNMEAN_NODES=N`` sets the nu and mu rules to ``N`` nodes and the
    Lebesgue rule of the logarithmic mean to ``2N``. Functional means
    integrate harmonic means, which are only piecewise linear in ``t``, so
    their mu rule (``mu_pl``) gets ``4N`` nodes, capped at ``MAX_NODES``:
    the Gauss error on a kinked integrand falls like ``N**-2``, not
    geometrically.
    """
    raw = os.environ.get("FUNMEAN_NODES")
    n = 64
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"FUNMEAN_NODES must be an integer, got {raw!r}") from exc
        if not 1 <= n <= MAX_NODES // 2:
            raise ValueError(f"FUNMEAN_NODES must be in [1, {MAX_NODES // 2}]")
    return {"nu": n, "mu": n, "lebesgue": 2 * n, "mu_pl": min(4 * n, MAX_NODES)}


def sigmoid(u):
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    e = np.exp(u[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def logit(t):
    t = np.asarray(t, dtype=float)
    return np.log(t) - np.log1p(-t)


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Nodes and positive weights of a rule for a measure on (0, 1).

    ``logits`` holds ``log(t/(1-t))`` of each node when the rule was built
    in that variable; extreme mu nodes round to exactly 0 or 1 in ``t`` but
    stay distinct there.
    """

    nodes: np.ndarray
    weights: np.ndarray
    measure_tag: str
    lam: float | None = None
    logits: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("nodes", "weights", "logits"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @property
    def mass(self) -> float:
        return float(math.fsum(self.weights))

    def integrate(self, fn) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))

    def __repr__(self) -> str:
        lam = "" if self.lam is None else f", lam={self.lam}"
        return f"QuadRule({self.measure_tag}, n={self.n}{lam})"


def tridiag_eig(diag, off, max_iter: int = 60):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit QL with Wilkinson-type shifts. Only the first row of the
    eigenvector matrix is accumulated, which is all Golub-Welsch needs.
    Returns ``(values, first)`` sorted by value.
    """
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros(n)
    z[0] = 1.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise ConvergenceError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d)
    return d[order], z[order]


def _check_n(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"node count must be in [1, {MAX_NODES}], got {n}")
    return n


def _golub_welsch01(diag, off):
    """Rule on [0, 1] from the Jacobi matrix of a probability measure on [-1, 1]."""
    y, v0 = tridiag_eig(diag, off)
    t = 0.5 * (y + 1.0)
    w = v0 * v0
    return t, w / math.fsum(w)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadRule:
    """Gauss-Legendre rule for ``dt`` on (0, 1), exact to degree ``2n - 1``."""
    n = _check_n(n)
    k = np.arange(1, n)
    off = k / np.sqrt(4.0 * k * k - 1.0)
    t, w = _golub_welsch01(np.zeros(n), off)
    # enforce the exact mirror symmetry of the rule
    t = 0.5 * (t + (1.0 - t[::-1]))
    w = 0.5 * (w + w[::-1])
    return QuadRule(t, w, "lebesgue")


def _jacobi_matrix(alpha: float, beta: float, n: int):
    """Recurrence coefficients of monic Jacobi polynomials, weight (1-y)^a (1+y)^b."""
    ab = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    k = np.arange(1, n, dtype=float)
    den = (2 * k + ab) * (2 * k + ab + 2)
    diag[1:] = (beta * beta - alpha * alpha) / den
    off2 = np.empty(n - 1)
    if n > 1:
        # k = 1 separately: the generic formula is 0/0 when a + b = -1
        off2[0] = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        k = np.arange(2, n, dtype=float)
        s = 2 * k + ab
        off2[1:] = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1))
    return diag, np.sqrt(off2)


@lru_cache(maxsize=None)
def gauss_jacobi_nu(lam: float, n: int = 64) -> QuadRule:
    """Gauss-Jacobi rule for the probability measure nu_lam on (0, 1)."""
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie strictly inside (0, 1), got {lam}")
    n = _check_n(n)
    diag, off = _jacobi_matrix(-lam, lam - 1.0, n)
    t, w = _golub_welsch01(diag, off)
    return QuadRule(t, w, "nu", lam=lam)


@lru_cache(maxsize=None)
def mu_rule(n: int = 64) -> QuadRule:
    """Rule for mu via ``t = sigmoid(pi tan(pi (v - 1/2)))`` on Gauss-Legendre ``v``."""
    gl = gauss_legendre(n)
    v = gl.nodes
    u = math.pi * np.tan(math.pi * (v - 0.5))
    u = 0.5 * (u - u[::-1])
    return QuadRule(sigmoid(u), gl.weights, "mu", logits=u)


def nu_moment(lam: float, k: int) -> float:
    """``int t**k d nu_lam = sin(pi lam)/pi * B(k + lam, 1 - lam)``."""
    logb = math.lgamma(k + lam) + math.lgamma(1 - lam) - math.lgamma(k + 1)
    return math.sin(math.pi * lam) / math.pi * math.exp(logb)


# --- closed forms and densities -------------------------------------------


def phi(x: float) -> float:
    """``int_0^1 x**v sin(pi v) dv = (x + 1) pi / (pi**2 + log(x)**2)``."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    lx = math.log(x)
    return (x + 1.0) * math.pi / (math.pi ** 2 + lx * lx)


def phi_quad(x: float, n: int = 64) -> float:
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    gl = gauss_legendre(n)
    v = gl.nodes
    return float(np.dot(gl.weights, np.exp(v * math.log(x)) * np.sin(math.pi * v)))


def _open_unit(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any((t <= 0) | (t >= 1)):
        raise ValueError("t must lie strictly inside (0, 1)")
    return t


def psi_density(t):
    """Density of mu with respect to dt."""
    t = _open_unit(t)
    u = logit(t)
    out = 1.0 / (t * (1.0 - t) * (math.pi ** 2 + u * u))
    return float(out) if out.ndim == 0 else out


def omega(t):
    t = _open_unit(t)
    u = logit(t)
    out = 1.0 / (t * (math.pi ** 2 + u * u))
    return float(out) if out.ndim == 0 else out


# --- integrals over the real line -----------------------------------------


def _panels(a: float, b: float, panels: int, order: int):
    gl = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    width = np.diff(edges)
    x = (edges[:-1, None] + width[:, None] * gl.nodes[None, :]).ravel()
    w = (width[:, None] * gl.weights[None, :]).ravel()
    return x, w


def _line_integral(fn, center: float, scale: float, panels: int, order: int = 20) -> float:
    """``int_R fn(u) du`` with ``u = center + scale * tan(theta)``.

    The theta interval is cut into equal panels, each with a Gauss-Legendre
    rule; the integrands used here are smooth in theta up to the endpoints.
    """
    th, w = _panels(-0.5 * math.pi, 0.5 * math.pi, panels, order)
    u = center + scale * np.tan(th)
    jac = scale / np.cos(th) ** 2
    return float(np.dot(w, fn(u) * jac))


def _line_estimate(fn, center: float, scale: float, panels: int = 16):
    coarse = _line_integral(fn, center, scale, panels)
    fine = _line_integral(fn, center, scale, 2 * panels)
    return fine, abs(fine - coarse)


def omega_integral(a: float, panels: int = 12):
    """``(int_0^a omega(t) dt, error estimate)`` for ``0 < a < 1``.

    With ``u = logit(t)`` the integrand is ``sigmoid(-u) / (pi**2 + u**2)``.
    Splitting ``sigmoid(-u) = 1 - sigmoid(u)`` leaves an arctangent plus an
    integral whose integrand decays like ``exp(u)``, which panels of
    Gauss-Legendre handle on a finite window.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must lie strictly inside (0, 1), got {a}")
    big_u = float(logit(a))
    head = (math.atan(big_u / math.pi) + 0.5 * math.pi) / math.pi
    span = 60.0 + max(big_u, 0.0)

    def rest(p):
        x, w = _panels(big_u - span, big_u, p, 20)
        return float(np.dot(w, sigmoid(x) / (math.pi ** 2 + x * x)))

    coarse, fine = rest(panels), rest(2 * panels)
    return head - fine, abs(fine - coarse)


def i_s_estimate(s: float):
    """``I_s = s int_0^s omega + (1-s) int_0^{1-s} omega`` with an error estimate."""
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie strictly inside (0, 1), got {s}")
    a, ea = omega_integral(s)
    b, eb = omega_integral(1.0 - s)
    return s * a + (1.0 - s) * b, s * ea + (1.0 - s) * eb + 4 * _EPS


def i_s(s: float) -> float:
    return i_s_estimate(s)[0]


def check_547(tol: float = 1e-8) -> dict:
    """Evaluate the closed-form integrals of the mu measure numerically.

    Each integral is moved to the real line by the substitution noted in
    its entry and integrated with an off-centre tangent map, so none of the
    values comes out exact by a symmetry of the rule. The literal
    ``u du / ((1+u^2)(pi^2 + log^2 u))`` form is reported alongside with
    ``asserted = False``: its true value is 1/2, while the form with
    ``4 log^2 u`` (the image of the tan integral under ``u = tan z``) equals 1/4.
    """
    pi2 = math.pi ** 2
    entries = [
        ("t_weight", "int_0^1 dt / (t (pi^2 + log^2(t/(1-t))))", 0.5,
         lambda u: sigmoid(-u) / (pi2 + u * u), 0.7, 2.5, "u = log(t/(1-t))", True),
        ("one_minus_t_weight", "int_0^1 dt / ((1-t) (pi^2 + log^2(t/(1-t))))", 0.5,
         lambda u: sigmoid(u) / (pi2 + u * u), -1.3, 4.0, "u = log(t/(1-t))", True),
        ("tan", "int_0^{pi/2} tan z dz / (pi^2 + 4 log^2(tan z))", 0.25,
         lambda w: sigmoid(2 * w) / (pi2 + 4 * w * w), 0.4, 1.7, "w = log(tan z)", True),
        ("cot", "int_0^{pi/2} cot z dz / (pi^2 + 4 log^2(cot z))", 0.25,
         lambda w: sigmoid(-2 * w) / (pi2 + 4 * w * w), -0.9, 2.2, "w = log(cot z)", True),
        ("u_four_log", "int_0^inf u du / ((1+u^2) (pi^2 + 4 log^2 u))", 0.25,
         lambda w: sigmoid(2 * w) / (pi2 + 4 * w * w), 1.1, 3.1, "w = log(u)", True),
        ("u_literal", "int_0^inf u du / ((1+u^2) (pi^2 + log^2 u))", 0.25,
         lambda w: sigmoid(2 * w) / (pi2 + w * w), -0.6, 2.8, "w = log(u)", False),
    ]
    out = []
    for key, formula, expected, fn, c, k, subst, asserted in entries:
        value, est = _line_estimate(fn, c, k)
        err = abs(value - expected)
        out.append({
            "name": key, "integral": formula, "substitution": subst,
            "expected": expected, "value": value, "error": err,
            "quadrature_error_estimate": est, "asserted": asserted,
            "pass": bool(err <= tol),
        })
    return {
        "tolerance": tol,
        "integrals": out,
        "all_asserted_pass": all(e["pass"] for e in out if e["asserted"]),
    }
