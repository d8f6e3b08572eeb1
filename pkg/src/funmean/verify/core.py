"""Suite registry, margin bookkeeping and the campaign runner."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

__all__ = ["Tally", "Suite", "TrialReport", "register", "suite", "suites",
           "run_suite", "functional_slack"]


def functional_slack(h: float) -> float:
    """Default slack for grid inequalities: ``10 h^2 + 1e-8``."""
    return 10.0 * h * h + 1e-8


class Tally:
    """Running minimum of margins for one trial; ``>= 0`` means the property holds."""

    def __init__(self):
        self.margin = math.inf
        self.mixed = 0
        self.compared = 0

    def value(self, m: float) -> None:
        self.compared += 1
        self.margin = min(self.margin, float(m))

    def chain(self, *levels, mask=None) -> None:
        """``levels[0] <= levels[1] <= ...`` nodewise.

        Nodes where both sides are +inf agree with the order; nodes where
        exactly one side is +inf are counted as mixed and skipped.
        """
        for lower, upper in zip(levels[:-1], levels[1:]):
            self.leq(lower, upper, mask=mask)

    def leq(self, lower, upper, mask=None) -> None:
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        li, ui = np.isposinf(lower), np.isposinf(upper)
        fin = ~li & ~ui
        mixed = li ^ ui
        if mask is not None:
            fin &= mask
            mixed &= mask
        self.mixed += int(mixed.sum())
        if fin.any():
            self.compared += int(fin.sum())
            self.margin = min(self.margin, float(np.min(upper[fin] - lower[fin])))

    def equal(self, a, b, scale: float = 1.0, mask=None) -> None:
        """Two-sided check: margin ``-max|a - b| / scale`` on common finite nodes."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        ai, bi = np.isposinf(a), np.isposinf(b)
        fin = ~ai & ~bi
        bad = ai ^ bi
        if mask is not None:
            fin &= mask
            bad &= mask
        self.mixed += int(bad.sum())
        if fin.any():
            self.compared += int(fin.sum())
            self.margin = min(self.margin, -float(np.max(np.abs(a[fin] - b[fin]))) / scale)


@dataclass(frozen=True)
class Suite:
    name: str
    tags: tuple
    family: str
    trial: Callable
    tolerance: Callable
    config: dict = field(default_factory=dict)
    description: str = ""


_REGISTRY: dict[str, Suite] = {}


def register(name: str, tags, family: str, tolerance, config=None, description: str = ""):
    """Decorator adding a trial function ``trial(rng, config) -> Tally`` to the registry."""
    tol = tolerance if callable(tolerance) else (lambda cfg, v=float(tolerance): v)

    def wrap(fn):
        if name in _REGISTRY:
            raise ValueError(f"suite {name!r} registered twice")
        _REGISTRY[name] = Suite(name, tuple(tags), family, fn, tol, dict(config or {}),
                                description or (fn.__doc__ or "").strip().splitlines()[0])
        return fn

    return wrap


def suite(name: str) -> Suite:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(_REGISTRY))}") from None


def suites() -> dict[str, Suite]:
    return dict(_REGISTRY)


@dataclass
class TrialReport:
    suite_name: str
    trials: int
    min_margin: float
    violations: int
    tolerance: float
    seed: int
    runtime_ms: int
    tags: tuple = ()
    mixed_nodes: int = 0
    compared: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["tags"] = list(self.tags)
        d["min_margin"] = _json_float(self.min_margin)
        d["passed"] = self.passed
        return d


def _json_float(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _one(name: str, seed: int, i: int, overrides: dict) -> tuple[float, int, int]:
    s = suite(name)
    cfg = {**s.config, **overrides}
    rng = np.random.default_rng([seed, i])
    t = s.trial(rng, cfg)
    return t.margin, t.mixed, t.compared


def run_suite(name: str, trials: int, seed: int, tolerance: float | None = None,
              workers: int = 1, **overrides) -> TrialReport:
    """Run ``trials`` seeded instances of a registered property.

    Trial ``i`` draws from ``default_rng([seed, i])`` so results do not depend
    on ``workers``. ``overrides`` replace entries of the suite config.
    """
    s = suite(name)
    if trials < 1:
        raise ValueError("trials must be positive")
    cfg = {**s.config, **overrides}
    tol = float(s.tolerance(cfg) if tolerance is None else tolerance)
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, [name] * trials, [seed] * trials,
                                    range(trials), [overrides] * trials))
    else:
        results = [_one(name, seed, i, overrides) for i in range(trials)]
    margins = [r[0] for r in results]
    runtime = int(round(1000 * (time.perf_counter() - start)))
    return TrialReport(
        suite_name=name, trials=trials, min_margin=min(margins),
        violations=sum(1 for m in margins if m < -tol), tolerance=tol, seed=seed,
        runtime_ms=runtime, tags=s.tags, mixed_nodes=sum(r[1] for r in results),
        compared=sum(r[2] for r in results))
