"""Randomised verification campaigns with margin reports."""
from .core import Suite, Tally, TrialReport, functional_slack, run_suite, suite, suites
from .generators import GenConfig, gen_convex_gridfn, gen_family, gen_pair, gen_spd
from . import duality, functional, measures, operator  # noqa: F401  (register suites)

__all__ = [
    "Suite", "Tally", "TrialReport", "functional_slack", "run_suite", "suite",
    "suites", "GenConfig", "gen_convex_gridfn", "gen_family", "gen_pair", "gen_spd",
]
