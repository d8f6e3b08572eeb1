"""Extended-real scalars with the conventions of convex analysis.

The extended line carries three rules that differ from IEEE floats::

    a + (+inf) = +inf          for every a, including -inf
    (+inf) - (+inf) = +inf
    0 * (+inf) = +inf

Infinities are stored as native float infinities, but every operation on
possibly-infinite operands must go through :func:`add`, :func:`paper_sub`
and :func:`scale` so that ``inf - inf`` never turns into ``nan``.

The array helpers at the bottom apply the same rules elementwise and are what
the grid functionals use internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Union

import numpy as np

__all__ = [
    "ExtReal", "POS_INF", "NEG_INF", "add", "neg", "paper_sub", "scale", "leq",
    "ext_add", "ext_scale", "ext_weighted_sum", "to_json_value",
    "from_json_value", "array_to_json", "array_from_json",
]

Number = Union[int, float, "ExtReal"]


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    """A real number or one of the two infinities.

    ``nan`` is rejected at construction; the extended line has no undefined
    element.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, x: Number) -> "ExtReal":
        return x if isinstance(x, ExtReal) else cls(float(x))

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def __float__(self) -> float:
        return self.value

    def __add__(self, other: Number) -> "ExtReal":
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ExtReal":
        return paper_sub(self, other)

    def __rsub__(self, other: Number) -> "ExtReal":
        return paper_sub(other, self)

    def __neg__(self) -> "ExtReal":
        return neg(self)

    def __eq__(self, other) -> bool:
        if isinstance(other, (ExtReal, int, float)):
            return self.value == float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __lt__(self, other: Number) -> bool:
        return not leq(other, self)

    def __repr__(self) -> str:
        if self.is_pos_inf:
            return "ExtReal(+inf)"
        if self.is_neg_inf:
            return "ExtReal(-inf)"
        return f"ExtReal({self.value!r})"


POS_INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)


def _v(x: Number) -> float:
    if isinstance(x, ExtReal):
        return x.value
    v = float(x)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v


def add(a: Number, b: Number) -> ExtReal:
    """Sum with ``a + (+inf) = +inf`` for every ``a`` (so ``-inf + inf = +inf``)."""
    x, y = _v(a), _v(b)
    if x == math.inf or y == math.inf:
        return POS_INF
    return ExtReal(x + y)


def neg(a: Number) -> ExtReal:
    return ExtReal(-_v(a))


def paper_sub(a: Number, b: Number) -> ExtReal:
    """Difference ``a - b`` computed as ``a + (-b)``.

    Hence ``(+inf) - (+inf) = +inf`` and ``c - (-inf) = +inf`` for every ``c``.
    Note that ``paper_sub(a, b) <= 0`` is *not* equivalent to ``a <= b``.
    """
    return add(a, neg(b))


def scale(t: float, a: Number) -> ExtReal:
    """Nonnegative multiple, with ``0 * (+inf) = +inf`` and ``0 * (-inf) = -inf``."""
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"scale factor must be nonnegative, got {t}")
    x = _v(a)
    if math.isinf(x):
        return ExtReal(x)
    return ExtReal(t * x)


def leq(a: Number, b: Number) -> bool:
    """Total order of the extended line (``-inf <= a <= +inf``)."""
    return _v(a) <= _v(b)


# --- elementwise versions over float arrays ------------------------------


def ext_add(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = a + b
    out[np.isposinf(a) | np.isposinf(b)] = np.inf
    return out


def ext_scale(t: float, a) -> np.ndarray:
    if not t >= 0.0:
        raise ValueError(f"scale factor must be nonnegative, got {t}")
    a = np.asarray(a, dtype=float)
    with np.errstate(invalid="ignore"):
        out = t * a
    inf = np.isinf(a)
    out[inf] = a[inf]
    return out


def ext_weighted_sum(weights, rows) -> np.ndarray:
    """``sum_k w_k * rows[k]`` for positive weights; +inf wherever any row is."""
    rows = np.asarray(rows, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    inf = np.isposinf(rows).any(axis=0)
    safe = np.where(np.isfinite(rows), rows, 0.0)
    out = weights @ safe
    out[inf] = np.inf
    return out


# --- JSON ----------------------------------------------------------------


def to_json_value(x: Number):
    v = _v(x)
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


def from_json_value(x) -> float:
    if isinstance(x, str):
        key = x.strip().lower()
        if key in ("inf", "+inf", "infinity"):
            return math.inf
        if key in ("-inf", "-infinity"):
            return -math.inf
        raise ValueError(f"unrecognised extended-real literal {x!r}")
    return _v(x)


def array_to_json(values) -> list:
    return [to_json_value(v) for v in np.asarray(values, dtype=float)]


def array_from_json(items) -> np.ndarray:
    return np.array([from_json_value(v) for v in items], dtype=float)
