"""Command-line front end.

Usage:
    zerodist analyze --zeros Z.csv --out report.json --surface lsums.csv
    zerodist check mr --zeros Z.csv --b 1 --rmax 1e4 --out mr.json
    zerodist check logmod --zeros Z.csv --g sin:1 --d invlog
    zerodist gap --f sin:1 --zeros Zf.csv
    zerodist synthesize --growth Q.csv --rmax 100 --points-out q.csv
    zerodist pipeline --zeros Z.csv --zeros-w W.csv --d invlog

Exit status: 0 bounded or successful analysis, 2 divergent, 3 inconclusive,
1 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from ._io import atomic_write_text, csv_text
from .axis_integrals import DEFAULT_TOL, LogModulus, QuadratureError
from .criteria import (
    CriterionReport,
    Thresholds,
    completeness_diagnostic,
    dominance_check,
    lemma_gap,
    logmod_dominance_check,
    majorant_pipeline,
    mr_check,
    multiplier_check,
    width_check,
)
from .entire_functions import CanonicalProduct, constant_axis_logmod, product_axis_logmod, sin_axis_logmod
from .growth import GrowthFunction, inverse_log_d, read_growth, synthesize_sequence
from .log_sums import WindowGrid, log_sum_table
from .sequences import (
    SequenceFormatError,
    ZeroSequence,
    exponential_system,
    read_sequence,
    separation_margin,
    upper_density,
    write_sequence,
)

EXIT_OK, EXIT_INPUT, EXIT_DIVERGENT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {"bounded": EXIT_OK, "divergent": EXIT_DIVERGENT, "inconclusive": EXIT_INCONCLUSIVE}
CHECKS = ("mr", "dominance", "logmod", "multiplier", "width", "completeness")
# options that change where or how fast results are produced, not what they are
_NOT_ECHOED = {"out", "surface", "points_out", "threads", "func"}


class InputError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rmin", type=_float_list, default=[1.0, 2.0, 5.0, 10.0],
                   help="comma-separated lower window radii (default 1,2,5,10)")
    p.add_argument("--rmax", type=float, default=1e4, help="largest upper radius R (default 1e4)")
    p.add_argument("--ppd", type=int, default=20, help="upper radii per decade (default 20)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute quadrature tolerance per window")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--surface", help="CSV path for the per-window table")
    p.add_argument("--trend-bounded", type=float, default=Thresholds.trend_bounded)
    p.add_argument("--trend-divergent", type=float, default=Thresholds.trend_divergent)
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerodist", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="density, separation and log-sum table of a sequence")
    p.add_argument("--zeros", required=True)
    _common(p)

    p = sub.add_parser("check", help="evaluate one criterion on a window grid")
    p.add_argument("criterion", choices=CHECKS)
    p.add_argument("--zeros", help="sequence Z (mr, dominance, logmod, completeness)")
    p.add_argument("--zeros-w", help="right half-plane sequence W (dominance)")
    p.add_argument("--b", type=float, help="type bound b >= 0 (mr, width, completeness)")
    p.add_argument("--d", default="zero", help="zero | invlog | PATH to a d-like growth CSV")
    p.add_argument("--g", help="sin:B | one | product:PATH (logmod, multiplier)")
    p.add_argument("--p", help="sin:B | one | product:PATH (multiplier)")
    p.add_argument("--mu", help="sin:B | one | product:PATH (width)")
    _common(p)

    p = sub.add_parser("gap", help="distance between axis integral and half-plane log sums")
    p.add_argument("--f", required=True, help="sin:B | one | product:PATH")
    p.add_argument("--zeros", required=True, help="zero set of f (origin omitted)")
    _common(p)

    p = sub.add_parser("synthesize", help="sequence with counting function floor(Q)")
    p.add_argument("--growth", required=True, help="Q-like growth CSV")
    p.add_argument("--r0", type=float, help="start of the domain of Q (default: first sample)")
    p.add_argument("--points-out", help="CSV/JSON path for the synthesized sequence")
    _common(p)

    p = sub.add_parser("pipeline", help="majorant product for l_Z <= l_W + d ln(R/r) + C")
    p.add_argument("--zeros", required=True)
    p.add_argument("--zeros-w", required=True)
    p.add_argument("--d", default="zero", help="zero | invlog | PATH")
    _common(p)
    return parser


# -- input helpers -----------------------------------------------------------


def _load_sequence(path: str | None, flag: str) -> ZeroSequence:
    if path is None:
        raise InputError(f"{flag} is required for this command")
    try:
        return read_sequence(path)
    except SequenceFormatError as exc:
        raise InputError(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _grid(args) -> WindowGrid:
    if args.rmax <= 0 or not math.isfinite(args.rmax):
        raise InputError("--rmax must be a positive number")
    if any(r <= 0 for r in args.rmin):
        raise InputError("--rmin values must be positive")
    try:
        return WindowGrid.default(args.rmin, args.rmax, args.ppd)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _thresholds(args) -> Thresholds:
    try:
        return Thresholds(args.trend_bounded, args.trend_divergent)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _growth_d(spec: str, args) -> GrowthFunction | None:
    if spec == "zero":
        return None
    if spec == "invlog":
        lo = min(args.rmin)
        n = max(2, int(math.ceil(100 * math.log10(args.rmax / lo))) + 1)
        return inverse_log_d(np.geomspace(lo, args.rmax, n))
    try:
        G = read_growth(spec)
    except SequenceFormatError as exc:
        raise InputError(f"{spec}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{spec}: {exc.strerror}") from None
    if G.kind != "d":
        raise InputError(f"{spec}: expected kind=d")
    return G


def _logmod(spec: str | None, flag: str) -> LogModulus:
    if spec is None:
        raise InputError(f"{flag} is required for this command")
    if spec == "one":
        return constant_axis_logmod(0.0)
    kind, _, arg = spec.partition(":")
    if kind == "sin":
        try:
            b = float(arg)
        except ValueError:
            raise InputError(f"{flag}: bad sin parameter {arg!r}") from None
        if not b > 0:
            raise InputError(f"{flag}: sin parameter must be positive")
        return sin_axis_logmod(b)
    if kind == "product":
        W = _load_sequence(arg, flag)
        try:
            return product_axis_logmod(CanonicalProduct(W))
        except ValueError as exc:
            raise InputError(f"{arg}: {exc}") from None
    raise InputError(f"{flag}: expected sin:B, one or product:PATH, got {spec!r}")


def _need_b(args) -> float:
    if args.b is None:
        raise InputError("--b is required for this check")
    if args.b < 0:
        raise InputError("--b must be nonnegative")
    return args.b


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _emit(args, payload: dict, surface_text: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.surface and surface_text is not None:
        atomic_write_text(args.surface, surface_text)


def _report_payload(args, rep: CriterionReport) -> dict:
    payload = rep.to_dict()
    payload["config"] = _echo(args)
    return payload


# -- commands ----------------------------------------------------------------


def _cmd_analyze(args) -> int:
    Z = _load_sequence(args.zeros, "--zeros")
    grid = _grid(args)
    table = log_sum_table(Z, grid, args.threads)
    full = separation_margin(Z)
    tail = separation_margin(Z, len(Z) // 2)
    payload = {
        "tool": "zerodist",
        "version": __version__,
        "command": "analyze",
        "config": _echo(args),
        "n_points": len(Z),
        "max_modulus": float(Z.moduli[-1]) if len(Z) else 0.0,
        "upper_density_estimate": upper_density(Z, min(args.rmin)),
        "upper_density_r_min": min(args.rmin),
        "separation": {
            "margin_all": full.margin,
            "margin_upper_half": tail.margin,
            "tail_start": tail.tail_start,
            "separated": tail.separated,
            "threshold": tail.threshold,
        },
        "axis_points": table.axis_points,
        "exponential_system_size": len(exponential_system(Z)),
        "log_sums": {
            "grid": [list(p) for p in grid.pairs],
            "l_rh": [float(v) for v in table.right],
            "l_lh": [float(v) for v in table.left],
            "l": [float(v) for v in table.total],
        },
    }
    rows = [
        (r, R, float(a), float(b), float(c))
        for (r, R), a, b, c in zip(grid.pairs, table.right, table.left, table.total)
    ]
    _emit(args, payload, csv_text(["r", "R", "l_rh", "l_lh", "l"], rows))
    return EXIT_OK


def _cmd_check(args) -> int:
    grid, th, w = _grid(args), _thresholds(args), args.threads
    c = args.criterion
    if c == "mr":
        rep = mr_check(_load_sequence(args.zeros, "--zeros"), _need_b(args), _growth_d(args.d, args), grid, th, w)
    elif c == "dominance":
        W = _load_sequence(args.zeros_w, "--zeros-w")
        if np.any(W.points.real <= 0):
            raise InputError("--zeros-w must lie in the open right half-plane")
        rep = dominance_check(_load_sequence(args.zeros, "--zeros"), W, _growth_d(args.d, args), grid, th, w)
    elif c == "logmod":
        rep = logmod_dominance_check(
            _load_sequence(args.zeros, "--zeros"), _logmod(args.g, "--g"), _growth_d(args.d, args),
            grid, args.tol, th, w,
        )
    elif c == "multiplier":
        rep = multiplier_check(
            _logmod(args.p, "--p"), _logmod(args.g, "--g"), _growth_d(args.d, args), grid, args.tol, th, w
        )
    elif c == "width":
        zeros = None
        if args.mu and args.mu.startswith("product:"):
            P = _load_sequence(args.mu.partition(":")[2], "--mu")
            zeros = P.union(ZeroSequence(-P.points))
        rep = width_check(
            _logmod(args.mu, "--mu"), _need_b(args), _growth_d(args.d, args), grid, args.tol, th, w, zeros
        )
    else:
        rep = completeness_diagnostic(_load_sequence(args.zeros, "--zeros"), _need_b(args), grid, th, w)
    _emit(args, _report_payload(args, rep), rep.surface_csv())
    return VERDICT_EXIT[rep.verdict]


def _cmd_gap(args) -> int:
    rep = lemma_gap(
        _logmod(args.f, "--f"), _load_sequence(args.zeros, "--zeros"), _grid(args), args.tol,
        _thresholds(args), args.threads,
    )
    _emit(args, _report_payload(args, rep), rep.surface_csv())
    return VERDICT_EXIT[rep.verdict]


def _cmd_synthesize(args) -> int:
    try:
        Q = read_growth(args.growth)
    except SequenceFormatError as exc:
        raise InputError(f"{args.growth}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{args.growth}: {exc.strerror}") from None
    if Q.kind != "Q":
        raise InputError(f"{args.growth}: expected kind=Q")
    try:
        S = synthesize_sequence(Q, args.rmax, args.r0)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {
        "tool": "zerodist",
        "version": __version__,
        "command": "synthesize",
        "config": _echo(args),
        "n_points": len(S),
        "points": [float(z.real) for z in S.points],
        "upper_density_estimate": upper_density(S, float(args.r0 or Q.x[0])),
    }
    if args.points_out:
        write_sequence(S, args.points_out)
    _emit(args, payload, csv_text(["re", "im"], [(float(z.real), 0.0) for z in S.points]))
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    Z = _load_sequence(args.zeros, "--zeros")
    W = _load_sequence(args.zeros_w, "--zeros-w")
    if np.any(W.points.real <= 0):
        raise InputError("--zeros-w must lie in the open right half-plane")
    res = majorant_pipeline(Z, W, _growth_d(args.d, args), _grid(args), args.tol, _thresholds(args), args.threads)
    payload = _report_payload(args, res.report)
    payload["dominance"] = {
        "verdict": res.dominance.verdict,
        "sup_excess": res.dominance.sup_excess,
        "trend": res.dominance.trend,
    }
    payload["q_sequence"] = [] if res.q_sequence is None else [float(z.real) for z in res.q_sequence.points]
    _emit(args, payload, res.report.surface_csv())
    return VERDICT_EXIT[res.report.verdict]


COMMANDS = {
    "analyze": _cmd_analyze,
    "check": _cmd_check,
    "gap": _cmd_gap,
    "synthesize": _cmd_synthesize,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.threads < 1:
        print("zerodist: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (InputError, QuadratureError) as exc:
        print(f"zerodist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
