"""Command-line entry point for the Liouville solver.

Every invocation prints exactly one RunReport as JSON on stdout; logs go to
stderr. Result files (--out, --trace) hold only deterministic content.

Usage:
    python scripts/liouville.py seq audit --l 1 2 3 --max-i 7
    python scripts/liouville.py eval --d 2 --eps 0.0625 --x 1
    python scripts/liouville.py certify --system sys.json --z z.json --point pt.json
    python scripts/liouville.py solve --system sys.json --out result.json --trace path.csv
    python scripts/liouville.py track --system sys.json --d-start 1 --d-max 4
    python scripts/liouville.py bounds --n 2 --r 1
    python scripts/liouville.py norms --system quad.json --z-values 0 0.1 1
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from .core.certification import certify_well_balanced, degree_bounds
from .core.config import D_MAX, MULTISTART_BUDGET, PRECISION_BITS, R_MAX, RNG_SEED, get_log_level
from .core.exceptions import (
    DistinctnessViolated,
    LiouvilleError,
    NotAZero,
    PrecisionExhausted,
    TrackingError,
)
from .core.liouville import audit_growth, eval_partial_sum, eval_partial_sum_derivative, extend_sequence
from .core.models import RunReport, TrackerConfig
from .core.numeric import complex_to_strings, decimal_string, digits_for, get_context
from .core.root_norms import min_isolated_root_norm
from .core.serialization import (
    audit_to_dict,
    certificate_to_dict,
    dumps,
    file_digest,
    load_parameters,
    load_point,
    load_sequence,
    load_system,
    parse_complex_list,
    solve_report_to_dict,
    write_json,
    write_trace,
)
from .core.tracker import solve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 2
EXIT_TRACKING_FAILED = 3
EXIT_INPUT_ERROR = 4


class UsageError(Exception):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


class _Run:
    """Collects what ends up in the RunReport for one command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.digests: dict[str, str] = {}
        self.artifacts: dict[str, str] = {}
        self.timings: dict[str, float] = {}
        self.config: dict[str, Any] = {"prec": args.prec, "seed": args.seed}

    def input(self, name: str, path: str | None) -> str | None:
        if path is not None and Path(path).is_file():
            self.digests[name] = file_digest(path)
        return path

    def timed(self, name: str, fn: Callable[[], Any]) -> Any:
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)

    def report(self, outcome: str, exit_code: int, result: dict | None = None, error: str | None = None) -> RunReport:
        return RunReport(
            command=self.args.command_name,
            config=self.config,
            input_digests=self.digests,
            outcome=outcome,
            exit_code=exit_code,
            timings=self.timings,
            artifacts=self.artifacts,
            result=result,
            error=error,
        )

    def write_result(self, result: dict[str, Any]) -> None:
        if self.args.out:
            write_json(self.args.out, result)
            self.artifacts["result"] = str(self.args.out)


# ==================== COMMANDS ====================

def _sequence(run: _Run) -> Any:
    args = run.args
    seq = load_sequence(
        kind=args.sequence,
        values=args.values,
        path=run.input("sequence", args.sequence_file),
        length=args.length,
    )
    run.config["sequence"] = seq.kind
    return seq


def cmd_seq_audit(run: _Run) -> RunReport:
    """Growth audit |a_{i+1}| > |a_i|^(i^l) for each requested l."""
    args = run.args
    seq = _sequence(run)
    run.config.update({"l": args.l, "max_i": args.max_i})
    audits = run.timed("audit", lambda: [audit_growth(seq, l, args.max_i) for l in args.l])

    if not args.quiet:
        for report in audits:
            sys.stderr.write(f"l = {report.l}\n   i  lhs_log2  rhs_log2  passed\n")
            for row in report.rows:
                sys.stderr.write(f"{row.i:4d}  {row.lhs_log2:>8}  {row.rhs_log2:>8}  {row.passed}\n")
            sys.stderr.write(
                f"least all-true index: {report.least_all_true}, "
                f"first failing: {report.first_failing}, admissible: {report.admissible}\n"
            )

    result = {"sequence": seq.kind, "audits": [audit_to_dict(r) for r in audits]}
    run.write_result(result)
    return run.report("ok", EXIT_OK, result)


def cmd_eval(run: _Run) -> RunReport:
    """H_{d,eps}(x) and its derivative as decimal strings."""
    args = run.args
    seq = _sequence(run)
    eps, x = parse_complex_list([args.eps, args.x])
    ctx = get_context(args.prec)
    run.config.update({"d": args.d, "eps": args.eps, "x": args.x})
    value = eval_partial_sum(seq, args.d, eps, x, args.prec)
    derivative = eval_partial_sum_derivative(seq, args.d, eps, x, args.prec)
    digits = digits_for(args.prec)
    result = {
        "d": args.d,
        "value": complex_to_strings(ctx, value, digits),
        "derivative": complex_to_strings(ctx, derivative, digits),
    }
    run.write_result(result)
    return run.report("ok", EXIT_OK, result)


def _system_inputs(run: _Run) -> tuple[Any, list[Any]]:
    args = run.args
    F = load_system(run.input("system", args.system))
    if args.z is not None:
        z = load_parameters(run.input("z", args.z), F.r)
    elif F.r == 0:
        z = []
    else:
        raise UsageError(f"System has {F.r} parameters; --z is required")
    return F, z


def cmd_certify(run: _Run) -> RunReport:
    """Well-balanced certification of a candidate zero; exit 0 iff well balanced."""
    args = run.args
    F, z = _system_inputs(run)
    point = load_point(run.input("point", args.point), F.n)
    try:
        cert = run.timed("certify", lambda: certify_well_balanced(F, z, point, prec=args.prec))
    except (NotAZero, DistinctnessViolated, PrecisionExhausted) as e:
        return run.report("not_certified", EXIT_NOT_CERTIFIED, error=f"{type(e).__name__}: {e}")

    result = certificate_to_dict(cert, args.prec)
    run.write_result(result)
    if cert.well_balanced:
        return run.report("certified", EXIT_OK, result)
    return run.report("not_certified", EXIT_NOT_CERTIFIED, result)


def _tracker_config(run: _Run, track: bool) -> TrackerConfig:
    args = run.args
    d_start: int | str = args.d_start if args.d_start is not None else "auto"
    config = TrackerConfig(
        precision_bits=args.prec,
        d_start=d_start,
        d_max=args.d_max,
        r_max=args.r_max,
        multistart_budget=args.budget,
        rng_seed=args.seed,
        apply_stop_rule=not track,
    )
    run.config.update(config.model_dump())
    return config


def cmd_solve(run: _Run, track: bool = False) -> RunReport:
    """Start root, degree-by-degree tracking and the certified residual bound."""
    args = run.args
    if track and args.d_start is None:
        raise UsageError("track requires --d-start")
    F, z = _system_inputs(run)
    point = load_point(run.input("point", args.point), F.n) if args.point else None
    config = _tracker_config(run, track)
    seq = extend_sequence(_sequence(run), config.d_max + config.tail_probe_count + 2)

    try:
        report = run.timed("solve", lambda: solve(F, z, config, seq, point))
    except TrackingError as e:
        logger.error(f"Tracking failed: {e}")
        if args.trace:
            write_trace(args.trace, e.path, args.prec)
            run.artifacts["trace"] = str(args.trace)
        partial = {"accepted_states": len(e.path)}
        return run.report("tracking_failed", EXIT_TRACKING_FAILED, partial, f"{type(e).__name__}: {e}")

    result = solve_report_to_dict(report, F, z, seq)
    run.write_result(result)
    if args.trace:
        write_trace(args.trace, report.path, args.prec)
        run.artifacts["trace"] = str(args.trace)
    return run.report("ok", EXIT_OK, result)


def cmd_track(run: _Run) -> RunReport:
    return cmd_solve(run, track=True)


def cmd_bounds(run: _Run) -> RunReport:
    args = run.args
    run.config.update({"n": args.n, "r": args.r})
    result = degree_bounds(args.n, args.r)
    run.write_result(result)
    return run.report("ok", EXIT_OK, result)


def cmd_norms(run: _Run) -> RunReport:
    """N_F(z) for each parameter tuple (coordinates separated by commas)."""
    args = run.args
    F = load_system(run.input("system", args.system))
    ctx = get_context(args.prec)
    norms = []
    for text in args.z_values:
        z = parse_complex_list(text.split(",")) if text else []
        value = min_isolated_root_norm(F, z, args.prec)
        norm = "inf" if value == ctx.inf else decimal_string(ctx, value, digits_for(args.prec))
        norms.append({"z": text, "norm": norm})
    result = {"norms": norms}
    run.write_result(result)
    return run.report("ok", EXIT_OK, result)


# ==================== PARSER ====================

def _add_sequence_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sequence", default="default_tower", help="default_tower, factorial_pow2 or user")
    parser.add_argument("--values", nargs="+", help="Integers a_1, a_2, ... for a user sequence")
    parser.add_argument("--sequence-file", help="JSON file {kind, values, length}")
    parser.add_argument("--length", type=int, help="Entries generated for recurrence kinds")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=int, default=PRECISION_BITS, help="Working precision in bits")
    common.add_argument("--seed", type=int, default=RNG_SEED, help="RNG seed for start-root search")
    common.add_argument("--out", help="Write the result JSON here")
    common.add_argument("--quiet", action="store_true", help="Only log errors")
    common.add_argument("--verbose", action="store_true", help="Log per-step detail")

    parser = _Parser(prog="liouville", description="Polynomial systems composed with Liouville functions")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    seq = commands.add_parser("seq", help="Coefficient sequence tools")
    seq_commands = seq.add_subparsers(dest="seq_command", required=True, parser_class=_Parser)
    audit = seq_commands.add_parser("audit", parents=[common], help="Growth-condition audit")
    _add_sequence_args(audit)
    audit.add_argument("--l", type=int, nargs="+", default=[3], help="Growth exponents to check")
    audit.add_argument("--max-i", type=int, default=7, help="Last index checked")
    audit.set_defaults(handler=cmd_seq_audit, command_name="seq audit")

    ev = commands.add_parser("eval", parents=[common], help="Evaluate H_{d,eps}(x)")
    _add_sequence_args(ev)
    ev.add_argument("--d", type=int, required=True)
    ev.add_argument("--eps", default="0")
    ev.add_argument("--x", required=True, help='Complex literal, e.g. "1" or "0.5-2j"')
    ev.set_defaults(handler=cmd_eval, command_name="eval")

    certify = commands.add_parser("certify", parents=[common], help="Certify a well-balanced zero")
    certify.add_argument("--system", required=True)
    certify.add_argument("--z")
    certify.add_argument("--point", required=True)
    certify.set_defaults(handler=cmd_certify, command_name="certify")

    for name, handler, help_text in (
        ("solve", cmd_solve, "Find a zero of F(x, H(x), z)"),
        ("track", cmd_track, "Track degree by degree without the stop rule"),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        _add_sequence_args(sub)
        sub.add_argument("--system", required=True)
        sub.add_argument("--z")
        sub.add_argument("--point", help="Candidate zero of F to certify alongside")
        sub.add_argument("--d-start", type=int)
        sub.add_argument("--d-max", type=int, default=D_MAX)
        sub.add_argument("--r-max", type=float, default=R_MAX)
        sub.add_argument("--budget", type=int, default=MULTISTART_BUDGET, help="Multistart attempts")
        sub.add_argument("--trace", help="Write accepted path states as CSV")
        sub.set_defaults(handler=handler, command_name=name)

    bounds = commands.add_parser("bounds", parents=[common], help="Degree thresholds for n, r")
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--r", type=int, required=True)
    bounds.set_defaults(handler=cmd_bounds, command_name="bounds")

    norms = commands.add_parser("norms", parents=[common], help="Minimum root norm N_F(z)")
    norms.add_argument("--system", required=True)
    norms.add_argument("--z-values", nargs="+", required=True, help="Parameter tuples, e.g. 0.1 or 0.1,2j")
    norms.set_defaults(handler=cmd_norms, command_name="norms")

    return parser


def _emit(report: RunReport) -> None:
    sys.stdout.write(dumps(json.loads(report.model_dump_json())))
    sys.stdout.flush()


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        _emit(RunReport(command="usage", outcome="input_error", exit_code=EXIT_INPUT_ERROR, error=str(e)))
        return EXIT_INPUT_ERROR

    logging.basicConfig(
        level=get_log_level(args.quiet, args.verbose),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    run = _Run(args)
    try:
        report = args.handler(run)
    except TrackingError as e:
        report = run.report("tracking_failed", EXIT_TRACKING_FAILED, error=f"{type(e).__name__}: {e}")
    except (UsageError, LiouvilleError, ValidationError, ValueError) as e:
        logger.error(f"Input error: {e}")
        report = run.report("input_error", EXIT_INPUT_ERROR, error=f"{type(e).__name__}: {e}")

    _emit(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
