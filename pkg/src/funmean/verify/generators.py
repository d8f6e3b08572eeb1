"""Seeded random convex grid functions and SPD matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..convex_core import GridFn, SpdMatrix, convexify

__all__ = ["GenConfig", "gen_convex_gridfn", "gen_family", "gen_pair", "gen_spd",
           "rng_for"]


@dataclass(frozen=True)
class GenConfig:
    """Box, node count and function class for :func:`gen_convex_gridfn`.

    ``kind`` is ``"mixed"`` (random positive combination of kinks, ramps,
    parabolas and exponentials) or ``"quadratic"`` (``a x^2 / 2`` with
    ``a`` in [0.1, 10]). ``domain_prob`` is the chance that the effective
    domain is cut down to a random sub-interval of the box.
    """

    lo: float = -1.0
    hi: float = 1.0
    n: int = 513
    kind: str = "mixed"
    domain_prob: float = 0.0

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _terms(rng: np.random.Generator, x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    width = hi - lo
    out = np.zeros_like(x)
    k = int(rng.integers(1, 5))
    for _ in range(k):
        coef = math.exp(rng.uniform(math.log(0.1), math.log(5.0)))
        c = rng.uniform(lo, hi)
        which = int(rng.integers(0, 4))
        if which == 0:
            out += coef * np.abs(x - c)
        elif which == 1:
            out += coef * (x - c) ** 2
        elif which == 2:
            beta = rng.uniform(-3.0, 3.0) / max(width / 2.0, 1e-12)
            out += coef * np.exp(beta * (x - 0.5 * (lo + hi)))
        else:
            out += coef * np.maximum(0.0, x - c)
    out += rng.uniform(-1.0, 1.0) * (x - 0.5 * (lo + hi)) + rng.uniform(-1.0, 1.0)
    return out


def gen_convex_gridfn(seed, config: GenConfig = GenConfig(), domain=None) -> GridFn:
    """Random proper convex grid function; bit-identical for a fixed seed.

    ``domain`` forces the effective domain to ``[a, b]``; otherwise it is the
    whole box, or with probability ``config.domain_prob`` a random
    sub-interval covering at least a third of it.
    """
    rng = rng_for(seed)
    x = np.linspace(config.lo, config.hi, config.n)
    if config.kind == "quadratic":
        a = rng.uniform(0.1, 10.0)
        values = 0.5 * a * x * x
    elif config.kind == "mixed":
        values = _terms(rng, x, config.lo, config.hi)
    else:
        raise ValueError(f"unknown function class {config.kind!r}")
    if domain is None and rng.random() < config.domain_prob:
        width = config.hi - config.lo
        length = rng.uniform(width / 3.0, width)
        a = rng.uniform(config.lo, config.hi - length)
        domain = (a, a + length)
    if domain is not None:
        tol = 1e-9 * config.h
        values = np.where((x >= domain[0] - tol) & (x <= domain[1] + tol), values, np.inf)
    return convexify(np.column_stack([x, values]), config.lo, config.hi, config.n)


def gen_pair(seed, config: GenConfig = GenConfig()) -> tuple[GridFn, GridFn]:
    """Two random convex functions on the same grid whose domains overlap."""
    return gen_family(seed, 2, config)


def gen_family(seed, k: int, config: GenConfig = GenConfig()) -> tuple[GridFn, ...]:
    """``k`` random convex functions whose domains share a common core."""
    rng = rng_for(seed)
    if rng.random() < config.domain_prob:
        width = config.hi - config.lo
        # a shared core keeps the domains from being pairwise disjoint
        core = rng.uniform(config.lo + 0.3 * width, config.hi - 0.3 * width)
        doms = []
        for _ in range(k):
            a = rng.uniform(config.lo, core - 0.05 * width)
            b = rng.uniform(core + 0.05 * width, config.hi)
            doms.append((a, b))
        return tuple(gen_convex_gridfn(rng, config, d) for d in doms)
    plain = GenConfig(config.lo, config.hi, config.n, config.kind, 0.0)
    return tuple(gen_convex_gridfn(rng, plain) for _ in range(k))


def _householder_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q = np.eye(d)
    for _ in range(d):
        v = rng.normal(size=d)
        v /= np.linalg.norm(v)
        q = q - 2.0 * np.outer(q @ v, v)
    return q


def gen_spd(seed, d: int, cond_max: float = 100.0) -> SpdMatrix:
    """``Q diag(w) Q^T`` with ``Q`` a product of reflections and ``log w``
    uniform on ``[-log(cond_max)/2, log(cond_max)/2]``."""
    if d < 1 or cond_max < 1:
        raise ValueError("need d >= 1 and cond_max >= 1")
    rng = rng_for(seed)
    half = 0.5 * math.log(cond_max)
    w = np.exp(rng.uniform(-half, half, size=d))
    q = _householder_orthogonal(rng, d)
    return SpdMatrix((q * w) @ q.T)
