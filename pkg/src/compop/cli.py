"""Command-line front end.

    compop analyze --map "monomial(2)"
    compop identity-check --map halfplane --radius 0.999

Exit codes: 0 success, 2 input error, 3 non-convergence (report still
written), 4 output error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from typing import List, Optional

import numpy as np

from .carleson import carleson_ratio_profile, induced_measure, poisson_of_measure
from .errors import CompopError, NoConvergenceWarning
from .essnorm import (
    CARLESON_ATOMS,
    DEFAULT_H_GRID,
    default_schedule,
    essential_norm_report,
    identity_check,
    integral_profile,
    report_to_csv,
    report_to_json,
)
from .mapspec import CATALOG, GRAMMAR, SelfMap, validate_self_map
from .nevanlinna import AngleBudget, counting_profile
from .quad import QuadConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

TOL_RANGE = (1e-15, 1e-2)
KMAX_RANGE = (3, 14)


class InputError(ValueError):
    pass


# ---- deterministic emitters ------------------------------------------------------------------


def _num(x):
    x = float(x)
    return format(x, ".17g") if np.isfinite(x) else "null"


def dumps(obj, indent=0) -> str:
    """JSON with fixed key order (insertion), 17-digit reals and null for non-finite."""
    pad = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + _num(obj.real) + ", " + _num(obj.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def emit_report(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


# ---- argument handling ---------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="compop",
        description="Essential-norm diagnostics for composition operators on H^2.",
        epilog=GRAMMAR,
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help_, needs_map=True):
        p = sub.add_parser(name, help=help_, description=help_, epilog=GRAMMAR, formatter_class=fmt)
        if needs_map:
            p.add_argument("--map", required=True, metavar="TEXT", help="map spec, see grammar below")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        return p

    def schedule_flags(p):
        p.add_argument("--kmax", type=int, default=10, help="radii r_k = 1 - 2^-k, k = 1..kmax (3..14)")
        p.add_argument("--radii", metavar="CSV", help="explicit comma-separated radii, overrides --kmax")
        p.add_argument("--angles", type=int, default=256, help="minimum angles per radius (>= 64)")
        p.add_argument("--abs-tol", type=float, default=1e-9)
        p.add_argument("--rel-tol", type=float, default=1e-8)

    add("validate", "parse and validate a map")
    schedule_flags(add("counting", "counting-function radial profile"))
    schedule_flags(add("integral", "Poisson-integral radial profile"))
    p = add("carleson", "induced measure, Carleson ratios and Poisson values")
    schedule_flags(p)
    p.add_argument("--seed", type=int, help="draw boundary points at random with this seed")
    p.add_argument("--atoms", type=int, default=CARLESON_ATOMS, help="atoms in the induced measure (power of two)")
    p.add_argument("--measure-out", metavar="PATH", help="also write the measure as CSV (re, im, weight)")
    p = add("identity-check", "both sides of the identity at one radius")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--angles", type=int, default=256, help="minimum angles (>= 64)")
    p.add_argument("--abs-tol", type=float, default=1e-9)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p = add("analyze", "full report: both profiles, estimate and verdict")
    schedule_flags(p)
    p.add_argument("--carleson", action="store_true", help="add the Carleson section")
    p.add_argument("--seed", type=int, help="seed for the Carleson sampler")
    p.add_argument("--timing", action="store_true", help="record runtime_seconds (breaks byte-identity)")
    add("catalog", "list built-in maps with their known verdicts", needs_map=False)
    return parser


def _config(args) -> QuadConfig:
    for name in ("abs_tol", "rel_tol"):
        v = getattr(args, name)
        if not (TOL_RANGE[0] <= v <= TOL_RANGE[1]):
            raise InputError(f"--{name.replace('_', '-')} must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
    return QuadConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _budget(args) -> AngleBudget:
    if args.angles < 64:
        raise InputError("--angles must be >= 64")
    return AngleBudget(min_angles=args.angles, max_angles=max(args.angles, 2**16))


def _schedule(args) -> np.ndarray:
    if args.radii is not None:
        parts = [p.strip() for p in args.radii.split(",") if p.strip()]
        if not parts:
            raise InputError("empty schedule: --radii has no values")
        try:
            radii = np.array([float(p) for p in parts])
        except ValueError:
            raise InputError(f"--radii must be numbers: {args.radii!r}") from None
        if np.any(~((radii > 0) & (radii < 1))) or np.any(np.diff(radii) <= 0):
            raise InputError("--radii must be strictly increasing values in (0, 1)")
        return radii
    if not (KMAX_RANGE[0] <= args.kmax <= KMAX_RANGE[1]):
        raise InputError(f"--kmax must lie in [{KMAX_RANGE[0]}, {KMAX_RANGE[1]}]")
    return default_schedule(args.kmax)


def _map(args) -> SelfMap:
    return SelfMap.from_spec(args.map)


# ---- subcommands ----------------------------------------------------------------------------


def _profile_out(spec, prof, fmt, value_name):
    nonconv = any("no_convergence" in f for f in prof.flags)
    if fmt == "csv":
        rows = zip(prof.radii, prof.values, prof.argmax_angles, prof.n_angles_used)
        return _csv(["radius", value_name, "argmax_angle", "n_angles"], rows), nonconv
    doc = {
        "map_spec": spec,
        "radii": prof.radii,
        value_name: prof.values,
        "argmax_angles": prof.argmax_angles,
        "n_angles": prof.n_angles_used,
        "flags": [list(f) for f in prof.flags],
    }
    return dumps(doc) + "\n", nonconv


def _cmd_validate(args):
    psi = _map(args)
    rep = validate_self_map(psi)
    doc = {
        "map_spec": args.map,
        "canonical": psi.expr.to_spec(),
        "accepted": rep.accepted,
        "max_modulus": rep.max_modulus,
        "witness": rep.witness,
        "is_inner": psi.is_inner,
        "fixes_zero": psi.fixes_zero,
        "rational_degree": psi.degree,
    }
    if args.format == "csv":
        row = [v if isinstance(v, (str, float)) else dumps(v) for v in doc.values()]
        return _csv(list(doc), [row]), False
    return dumps(doc) + "\n", False


def _cmd_counting(args):
    _config(args)
    psi = _map(args)
    prof = counting_profile(psi, _schedule(args), _budget(args))
    return _profile_out(args.map, prof, args.format, "counting")


def _cmd_integral(args):
    psi = _map(args)
    prof = integral_profile(psi, _schedule(args), _budget(args), _config(args))
    return _profile_out(args.map, prof, args.format, "integral")


def _cmd_carleson(args):
    _config(args)
    psi = _map(args)
    radii = _schedule(args)
    sampler = "uniform" if args.seed is None else "random"
    mu = induced_measure(psi, args.atoms, sampler=sampler, seed=args.seed)
    prof = carleson_ratio_profile(mu, DEFAULT_H_GRID)
    poisson = np.array([poisson_of_measure(mu, r) for r in radii])
    if args.measure_out:
        mu.to_csv(args.measure_out)
    if args.format == "csv":
        return _csv(["h", "ratio"], zip(prof.radii, prof.values)), False
    doc = {"map_spec": args.map, "atoms": len(mu), "h": prof.radii, "ratio": prof.values,
           "radii": radii, "poisson": poisson}
    return dumps(doc) + "\n", False


def _cmd_identity(args):
    psi = _map(args)
    if not (0 < args.radius < 1):
        raise InputError("--radius must lie in (0, 1)")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NoConvergenceWarning)
        res = identity_check(psi, args.radius, _budget(args), _config(args))
    nonconv = any(issubclass(c.category, NoConvergenceWarning) for c in caught)
    doc = {"map_spec": args.map, "radius": args.radius, **res}
    if args.format == "csv":
        return _csv(list(doc), [list(doc.values())]), nonconv
    return dumps(doc) + "\n", nonconv


def _cmd_analyze(args):
    psi = _map(args)
    report = essential_norm_report(psi, _schedule(args), _config(args), _budget(args),
                                   carleson=args.carleson, seed=args.seed, timing=args.timing)
    report.map_spec = args.map
    text = report_to_csv(report) if args.format == "csv" else report_to_json(report)
    return text, not report.converged


def _cmd_catalog(args):
    if args.format == "csv":
        return _csv(["map_spec", "verdict", "note"], CATALOG), False
    doc = [{"map_spec": s, "verdict": v, "note": n} for s, v, n in CATALOG]
    return "[\n" + ",\n".join("  " + dumps(d, 1) for d in doc) + "\n]\n", False


COMMANDS = {
    "validate": _cmd_validate,
    "counting": _cmd_counting,
    "integral": _cmd_integral,
    "carleson": _cmd_carleson,
    "identity-check": _cmd_identity,
    "analyze": _cmd_analyze,
    "catalog": _cmd_catalog,
}


def run_analyze(argv: List[str]) -> int:
    """Run one subcommand; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        print(GRAMMAR, file=sys.stderr)
        return EXIT_INPUT
    try:
        text, nonconv = COMMANDS[args.command](args)
    except (InputError, ValueError, TypeError, CompopError) as exc:
        if isinstance(exc, CompopError) and not isinstance(exc, ValueError):
            print(f"compop: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NONCONVERGENCE
        print(f"compop {args.command}: {exc}\n", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        emit_report(text, args.out)
    except OSError as exc:
        print(f"compop: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_NONCONVERGENCE if nonconv else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergenceWarning)
        code = run_analyze(sys.argv[1:] if argv is None else list(argv))
    return code


if __name__ == "__main__":
    sys.exit(main())
