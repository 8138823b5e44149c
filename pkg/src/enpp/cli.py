"""Command-line entry point.

Subcommands: ``simulate``, ``iterate``, ``invlimit`` (config-driven runs),
``besov-norm`` (print a norm of a snapshot field) and ``check`` (recompute
the invariant report of a trajectory directory). Exit codes: 0 ok,
1 invariant violation under --strict, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .config import parse_config
from .diagnostics import invariant_report, report_to_csv
from .errors import ConfigError, EnppError
from .experiments import (
    inviscid_experiment,
    load_trajectory,
    run_iteration,
    run_simulation,
)
from .littlewood_paley import BesovSpec, besov_norm
from .snapshots import read_snapshot

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enpp",
        description="Pseudo-spectral electrohydrodynamics on the periodic torus")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None,
                       help="output directory (default: config out_dir)")
        p.add_argument("--strict", action="store_true",
                       help="promote invariant violations to exit code 1")
        p.add_argument("--renormalize-charge", action="store_true",
                       help="subtract any charge-mean imbalance from p")
        return p

    add_run_command("simulate", "step the system from 0 to T")
    add_run_command("iterate", "run the fixed-point iteration scheme")
    add_run_command("invlimit", "viscosity sweep against the inviscid run")

    p = sub.add_parser("besov-norm", help="print a Besov norm of a snapshot field")
    p.add_argument("--field", required=True, help="snapshot file")
    p.add_argument("--s", required=True, type=float)
    p.add_argument("--p", required=True, type=_float_or_inf)
    p.add_argument("--r", required=True, type=_float_or_inf)
    p.add_argument("--index", type=int, default=0,
                   help="field index inside the snapshot (default 0)")

    p = sub.add_parser("check", help="recompute invariants of a trajectory")
    p.add_argument("--trajectory", required=True, help="snapshot directory")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default=None, help="write the report CSV here")
    return parser


def _float_or_inf(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _print_violations(violations) -> None:
    for metric, t, message in violations:
        print(f"violation [{metric}] at t = {t:.6g}: {message}", file=sys.stderr)


def _cmd_simulate(args) -> int:
    config = parse_config(args.config)
    if args.strict:
        config.strict = True
    if args.renormalize_charge:
        config.renormalize_charge = True
    out = args.out or config.out_dir
    result = run_simulation(config, out)
    _print_violations(result.violations)
    print(f"simulate: {result.steps} steps, dt = {result.dt:.6e}, "
          f"{len(result.trajectory)} samples -> {out}")
    if config.strict and result.violations:
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_iterate(args) -> int:
    config = parse_config(args.config)
    if args.renormalize_charge:
        config.renormalize_charge = True
    out = args.out or config.out_dir
    _, report = run_iteration(config, out)
    ratios = ", ".join(f"{r:.3f}" for r in report.ratios) or "-"
    print(f"iterate: {report.iterations} solves, converged = {report.converged}, "
          f"final diff = {report.diffs[-1] if report.diffs else 0:.3e}, "
          f"ratios = [{ratios}] -> {out}")
    if report.non_contraction:
        print("warning: difference ratios failed to contract", file=sys.stderr)
    return EXIT_OK


def _cmd_invlimit(args) -> int:
    config = parse_config(args.config)
    if args.renormalize_charge:
        config.renormalize_charge = True
    out = args.out or config.out_dir
    fit = inviscid_experiment(config, out)
    if fit.degenerate:
        print(f"invlimit: degenerate fit (zero errors) -> {out}")
    else:
        print(f"invlimit: slope = {fit.slope:.4f} over "
              f"{len(fit.viscosities)} viscosities -> {out}")
    return EXIT_OK


def _cmd_besov_norm(args) -> int:
    grid, fields = read_snapshot(args.field)
    if not (0 <= args.index < len(fields)):
        raise ConfigError(
            f"--index {args.index} outside [0, {len(fields) - 1}]")
    spec = BesovSpec(args.s, args.p, args.r)
    print(f"{besov_norm(fields[args.index], spec):.15g}")
    return EXIT_OK


def _cmd_check(args) -> int:
    trajectory = load_trajectory(args.trajectory)
    report = invariant_report(trajectory)
    if args.out:
        report_to_csv(report, args.out)
    _print_violations(report.violations)
    n = len(report.times)
    print(f"check: {n} samples, t in [{report.times[0]:.6g}, "
          f"{report.times[-1]:.6g}], violations = {len(report.violations)}")
    if args.strict and report.violations:
        return EXIT_VIOLATION
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "iterate": _cmd_iterate,
    "invlimit": _cmd_invlimit,
    "besov-norm": _cmd_besov_norm,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EnppError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
