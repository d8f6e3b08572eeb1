"""Randomised checks of the quadrature rules, closed-form integrals and I_s."""
from __future__ import annotations

import math

import numpy as np

from ..quadrature import (check_547, default_nodes, gauss_jacobi_nu, i_s_estimate, mu_rule,
                          nu_moment, phi, phi_quad, psi_density)
from .core import Tally, register

NODES = {"n": None}


def _n(cfg) -> int:
    return default_nodes()["nu"] if cfg.get("n") is None else int(cfg["n"])


@register("measures-425", ["425", "535", "550", "thFM"], "quadrature", 1e-10, NODES)
def measures_425(rng, cfg):
    """nu_lam and mu are probability measures with means lam and 1/2; moments match Beta values."""
    t = Tally()
    n = _n(cfg)
    lam = float(rng.uniform(0.02, 0.98))
    nu = gauss_jacobi_nu(lam, n)
    t.value(-abs(nu.mass - 1.0))
    t.value(-abs(nu.integrate(lambda s: s) - lam))
    for k in range(2, 5):
        t.value(-abs(nu.integrate(lambda s, k=k: s ** k) - nu_moment(lam, k)))
    mu = mu_rule(n)
    t.value(-abs(mu.mass - 1.0))
    t.value(-abs(mu.integrate(lambda s: s) - 0.5))
    t.value(-float(np.max(np.abs(mu.nodes + mu.nodes[::-1] - 1.0))))
    # the density is symmetric about 1/2
    s = rng.uniform(0.001, 0.999, size=8)
    t.value(-float(np.max(np.abs(psi_density(s) - psi_density(1.0 - s)) / psi_density(s))))
    return t


@register("phi-525", ["525"], "quadrature", 1e-10, NODES)
def phi_525(rng, cfg):
    """The sine-weighted power integral against its closed form."""
    t = Tally()
    for x in np.exp(rng.uniform(math.log(0.01), math.log(100.0), size=4)):
        t.value(-abs(phi_quad(float(x), _n(cfg)) - phi(float(x))))
    return t


@register("integrals-547", ["547", "535"], "quadrature", 1e-8)
def integrals_547(rng, cfg):
    """The asserted closed-form integrals of the mu density (deterministic)."""
    t = Tally()
    for e in check_547()["integrals"]:
        if e["asserted"]:
            t.value(-e["error"])
    return t


@register("convergence-mu", ["535", "550"], "quadrature", 1e-9, NODES)
def convergence_mu(rng, cfg):
    """Doubling the mu rule moves smooth integrals by less than the tolerance."""
    t = Tally()
    n = _n(cfg)
    coarse, fine = mu_rule(n), mu_rule(2 * n)
    c = float(rng.uniform(-3.0, 3.0))
    p = float(rng.uniform(0.2, 5.0))
    smooth = (lambda s: np.exp(c * s), lambda s: 1.0 / (1.0 + p * s),
              lambda s: np.sin(c * s) ** 2)
    for fn in smooth:
        t.value(-abs(coarse.integrate(fn) - fine.integrate(fn)))
    return t


@register("is-bounds", ["612", "corRR", "thRR"], "quadrature", 1e-8)
def is_bounds(rng, cfg):
    """1/4 <= I_s <= 1/2, I_s = I_{1-s}, I = 4 I_{1/2} in [1, 2]; estimates within tolerance."""
    t = Tally()
    s = float(rng.uniform(0.02, 0.98))
    v, est = i_s_estimate(s)
    w, est_w = i_s_estimate(1.0 - s)
    t.value(v - 0.25)
    t.value(0.5 - v)
    t.value(-abs(v - w))
    t.value(-max(est, est_w))
    half, est_h = i_s_estimate(0.5)
    t.value(4 * half - 1.0)
    t.value(2.0 - 4 * half)
    t.value(-est_h)
    return t
