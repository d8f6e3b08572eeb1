"""Hypothesis strategies for convex grid functions and SPD matrices."""
import numpy as np
from hypothesis import strategies as st

from funmean import GridFn, convexify


@st.composite
def convex_values(draw, n=65, lo=-1.0, hi=1.0, allow_domain=True):
    x = np.linspace(lo, hi, n)
    k = draw(st.integers(1, 3))
    v = np.zeros(n)
    for _ in range(k):
        c = draw(st.floats(lo, hi))
        a = draw(st.floats(0.1, 5.0))
        kind = draw(st.sampled_from(["abs", "sq", "exp", "ramp"]))
        if kind == "abs":
            v += a * np.abs(x - c)
        elif kind == "sq":
            v += a * (x - c) ** 2
        elif kind == "exp":
            v += a * np.exp(c * x)
        else:
            v += a * np.maximum(0.0, x - c)
    v += draw(st.floats(-1, 1)) * x + draw(st.floats(-1, 1))
    if allow_domain and draw(st.booleans()):
        i0 = draw(st.integers(0, n // 3))
        i1 = draw(st.integers(2 * n // 3, n - 1))
        v[:i0] = np.inf
        v[i1 + 1:] = np.inf
    return x, v


@st.composite
def gridfns(draw, n=65, allow_domain=True):
    x, v = draw(convex_values(n=n, allow_domain=allow_domain))
    return convexify(np.column_stack([x, v]), -1.0, 1.0, n)


@st.composite
def spd_matrices(draw, d=None, cond=100.0):
    d = draw(st.integers(1, 6)) if d is None else d
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    w = np.exp(rng.uniform(-0.5, 0.5, size=d) * np.log(cond))
    return (q * w) @ q.T


def parabola(a, n=513, box=1.0):
    x = np.linspace(-box, box, n)
    return GridFn(-box, box, 0.5 * a * x * x)
