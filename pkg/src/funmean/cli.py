"""Command-line front end: ``funmean <command> ...``.

Exit codes: 0 on success, 1 when a numerical check fails, 2 for usage and
input errors.
"""
from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import functional_means as fm
from . import operator_means as om
from .errors import FunmeanError
from .extreal import to_json_value
from .fenchel import conjugate
from .io import load_gridfn, load_matrix, save_gridfn, save_matrix, write_json
from .quadrature import (check_547, default_nodes, gauss_jacobi_nu, gauss_legendre,
                         i_s_estimate, mu_rule, nu_moment, phi, phi_quad)

REPORT_SCHEMA = "funmean.report/1"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


# --- commands ---------------------------------------------------------------


def _cmd_conjugate(args) -> int:
    f = load_gridfn(args.input, n=args.n)
    grid = None
    if args.dual is not None:
        lo, hi, n = args.dual
        grid = (float(lo), float(hi), int(n))
    save_gridfn(args.out, conjugate(f, grid))
    return EXIT_OK


def _unit(name: str, v: float | None, default: float | None = None) -> float:
    if v is None:
        if default is None:
            raise _Usage(f"--{name} is required for this kind")
        return default
    if not 0.0 <= v <= 1.0:
        raise _Usage(f"--{name} must lie in [0, 1]")
    return v


def _cmd_mean(args) -> int:
    f = load_gridfn(args.input[0], n=args.n)
    g = load_gridfn(args.input[1], n=args.n)
    n = default_nodes()["nu"] if args.nodes is None else args.nodes
    if not 1 <= n <= 256:
        raise _Usage("--nodes must be in [1, 256]")
    # without --nodes the functional mu rule keeps its own, finer default
    mu = None if args.nodes is None else mu_rule(n)
    kind = args.kind
    if kind == "arith":
        res = fm.arith(f, g, _unit("lambda", args.lam, 0.5))
    elif kind == "harm":
        res = fm.harmonic(f, g, _unit("lambda", args.lam, 0.5))
    elif kind == "geom":
        lam = _unit("lambda", args.lam, 0.5)
        rule = gauss_jacobi_nu(lam, n) if 0.0 < lam < 1.0 else None
        res = fm.geometric(f, g, lam, rule)
    elif kind == "log":
        if args.route == "geo":
            res = fm.log_mean_geo(f, g, gauss_legendre(2 * n), nu_nodes=n)
        else:
            res = fm.log_mean_harm(f, g, mu)
    elif kind == "G":
        lam = _unit("lambda", args.lam, 0.5)
        if not 0.0 < lam < 1.0:
            raise _Usage("--lambda must lie strictly inside (0, 1) for G")
        res = fm.family_G(f, g, lam, _unit("s", args.s), gauss_jacobi_nu(lam, n))
    else:
        res = fm.family_U(f, g, _unit("s", args.s), mu)
    save_gridfn(args.out, res)
    return EXIT_OK


def _cmd_opmean(args) -> int:
    a, b = load_matrix(args.input[0]), load_matrix(args.input[1])
    if a.shape != b.shape:
        raise _Usage(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    lam = _unit("lambda", args.lam, 0.5)
    ops = {
        "arith": lambda: om.op_arith(a, b, lam),
        "harm": lambda: om.op_harm(a, b, lam),
        "geom": lambda: om.op_geom(a, b, lam),
        "log": lambda: om.op_log_mean(a, b),
        "parallel": lambda: om.parallel_sum(a, b),
        "diamond": lambda: om.op_diamond(a, b),
    }
    save_matrix(args.out, ops[args.kind]())
    return EXIT_OK


def quadcheck_report(tol: float = 1e-10, tol_integrals: float = 1e-8) -> dict:
    """Measure identities, the sine-power integral, the mu-density integrals and I_s."""
    nodes = default_nodes()
    measures = []
    for lam in np.round(np.arange(1, 10) / 10, 1):
        r = gauss_jacobi_nu(float(lam), nodes["nu"])
        checks = (("mass", r.mass, 1.0),
                  ("mean", r.integrate(lambda t: t), float(lam)),
                  ("second_moment", r.integrate(lambda t: t * t), nu_moment(lam, 2)))
        for what, got, want in checks:
            measures.append({"measure": f"nu({lam})", "quantity": what, "value": got,
                             "expected": want, "error": abs(got - want)})
    mu = mu_rule(nodes["mu"])
    for what, got, want in (("mass", mu.mass, 1.0), ("mean", mu.integrate(lambda t: t), 0.5)):
        measures.append({"measure": "mu", "quantity": what, "value": got,
                         "expected": want, "error": abs(got - want)})
    phis = []
    for x in (0.1, 1.0, 5.0, 50.0):
        q, c = phi_quad(x, nodes["nu"]), phi(x)
        phis.append({"x": x, "closed_form": c, "quadrature": q, "error": abs(q - c)})
    ints = check_547(tol_integrals)
    i_table = []
    for s in np.round(np.arange(1, 10) / 10, 1):
        v, est = i_s_estimate(float(s))
        i_table.append({"s": float(s), "value": v, "error_estimate": est,
                        "in_bounds": bool(0.25 <= v <= 0.5)})
    half, est = i_s_estimate(0.5)
    big = {"value": 4 * half, "error_estimate": 4 * est,
           "in_bounds": bool(1.0 <= 4 * half <= 2.0)}
    passed = (all(m["error"] <= tol for m in measures) and all(p["error"] <= tol for p in phis)
              and ints["all_asserted_pass"] and all(r["in_bounds"] for r in i_table)
              and big["in_bounds"]
              and all(r["error_estimate"] <= tol_integrals for r in i_table))
    return {"nodes": nodes, "tolerance": tol, "measures": measures, "phi": phis,
            "integrals": ints, "i_s": i_table, "I": big, "passed": bool(passed)}


def _cmd_quadcheck(args) -> int:
    rep = quadcheck_report()
    write_json(args.json, rep)
    return EXIT_OK if rep["passed"] else EXIT_VIOLATION


def _suite_names(name: str) -> list[str]:
    from .verify import suite, suites
    if name == "all":
        return sorted(suites())
    suite(name)  # raises KeyError with the list of known names
    return [name]


def _run(names, trials, seed, workers, echo=True):
    from .verify import run_suite
    reports = []
    for name in names:
        rep = run_suite(name, trials, seed, workers=workers)
        reports.append(rep)
        if echo:
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {name:22s} margin={rep.min_margin:+.3e} tol={rep.tolerance:.1e} "
                  f"violations={rep.violations} {rep.runtime_ms} ms", file=sys.stderr)
    return reports


def _cmd_verify(args) -> int:
    try:
        names = _suite_names(args.suite)
    except KeyError as exc:
        raise _Usage(str(exc.args[0])) from None
    reports = _run(names, args.trials, args.seed, args.workers)
    doc = {"seed": args.seed, "trials": args.trials, "suites": [r.to_json() for r in reports],
           "passed": all(r.passed for r in reports)}
    if args.json:
        write_json(args.json, doc)
    return EXIT_OK if doc["passed"] else EXIT_VIOLATION


def build_report(trials: int, seed: int, workers: int = 1, echo: bool = False) -> dict:
    """Quadrature checks plus every registered suite, keyed by tag."""
    from .verify import suites
    start = time.perf_counter()
    quad = quadcheck_report()
    reports = _run(sorted(suites()), trials, seed, workers, echo=echo)
    tags: dict[str, dict] = {}

    def note(tag, name, passed, margin):
        e = tags.setdefault(f"({tag})", {"pass": True, "margin": math.inf, "checks": []})
        e["pass"] = e["pass"] and bool(passed)
        e["margin"] = min(e["margin"], float(margin))
        e["checks"].append(name)

    for r in reports:
        for tag in r.tags:
            note(tag, r.suite_name, r.passed, r.min_margin)
    worst_measure = max(m["error"] for m in quad["measures"])
    note("425", "quadcheck:measures", worst_measure <= quad["tolerance"], -worst_measure)
    note("535", "quadcheck:measures", worst_measure <= quad["tolerance"], -worst_measure)
    worst_phi = max(p["error"] for p in quad["phi"])
    note("525", "quadcheck:phi", worst_phi <= quad["tolerance"], -worst_phi)
    asserted = [e for e in quad["integrals"]["integrals"] if e["asserted"]]
    note("547", "quadcheck:integrals", quad["integrals"]["all_asserted_pass"],
         -max(e["error"] for e in asserted))
    low = min(min(r["value"] - 0.25, 0.5 - r["value"]) for r in quad["i_s"])
    note("612", "quadcheck:i_s", all(r["in_bounds"] for r in quad["i_s"]), low)
    for e in tags.values():
        e["margin"] = to_json_value(e["margin"])
    passed = quad["passed"] and all(r.passed for r in reports)
    return {
        "schema": REPORT_SCHEMA,
        "seed": seed,
        "trials": trials,
        "nodes": default_nodes(),
        "passed": bool(passed),
        "runtime_ms": int(round(1000 * (time.perf_counter() - start))),
        "tags": dict(sorted(tags.items())),
        "suites": [r.to_json() for r in reports],
        "quadcheck": quad,
    }


def _cmd_report(args) -> int:
    doc = build_report(args.trials, args.seed, args.workers, echo=True)
    write_json(args.out, doc)
    return EXIT_OK if doc["passed"] else EXIT_VIOLATION


# --- parser -------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="funmean", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("conjugate", help="Legendre-Fenchel conjugate of a grid function")
    c.add_argument("--in", dest="input", required=True, help="f.json or x,value CSV")
    c.add_argument("--out", required=True)
    c.add_argument("--dual", nargs=3, metavar=("LO", "HI", "N"), help="dual grid")
    c.add_argument("--n", type=_positive_int, help="grid nodes for CSV input")
    c.set_defaults(run=_cmd_conjugate)

    m = sub.add_parser("mean", help="functional mean of two grid functions")
    m.add_argument("--kind", required=True, choices=["arith", "harm", "geom", "log", "G", "U"])
    m.add_argument("--lambda", dest="lam", type=float)
    m.add_argument("--s", type=float)
    m.add_argument("--nodes", type=int, help="quadrature nodes; default 64 or FUNMEAN_NODES, "
                   "with 4x that for the mu rule of the log mean and U")
    m.add_argument("--route", choices=["harm", "geo"], default="harm",
                   help="log mean via the mu rule (harm) or dt over geometric means (geo)")
    m.add_argument("--in", dest="input", nargs=2, required=True, metavar=("F", "G"))
    m.add_argument("--out", required=True)
    m.add_argument("--n", type=_positive_int, help="grid nodes for CSV input")
    m.set_defaults(run=_cmd_mean)

    o = sub.add_parser("opmean", help="mean of two SPD matrices")
    o.add_argument("--kind", required=True,
                   choices=["arith", "harm", "geom", "log", "parallel", "diamond"])
    o.add_argument("--lambda", dest="lam", type=float)
    o.add_argument("--in", dest="input", nargs=2, required=True, metavar=("A", "B"))
    o.add_argument("--out", required=True)
    o.set_defaults(run=_cmd_opmean)

    q = sub.add_parser("quadcheck", help="JSON report of quadrature identities")
    q.add_argument("--json", default="-", help="output file (default stdout)")
    q.set_defaults(run=_cmd_quadcheck)

    v = sub.add_parser("verify", help="run randomised verification suites")
    v.add_argument("--suite", required=True, help="suite name or 'all'")
    v.add_argument("--trials", type=_positive_int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--workers", type=_positive_int, default=1)
    v.add_argument("--json", help="write the reports here")
    v.set_defaults(run=_cmd_verify)

    r = sub.add_parser("report", help="quadcheck plus every suite, keyed by tag")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--trials", type=_positive_int, default=50)
    r.add_argument("--workers", type=_positive_int, default=1)
    r.add_argument("--out", default="-")
    r.set_defaults(run=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.run(args)
    except _Usage as exc:
        print(f"funmean {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, FunmeanError) as exc:
        print(f"funmean {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
