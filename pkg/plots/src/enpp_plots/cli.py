"""Entry points: ``plot_rates <rates.csv> <out.png>`` and
``plot_report <report.csv> <out.png>``."""

from __future__ import annotations

import argparse
import sys

from .rates import PlotError, render_rate_plot
from .report import render_invariant_timeseries


def main_rates(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_rates", description="log-log convergence-rate figure")
    parser.add_argument("rates_csv")
    parser.add_argument("out_image")
    args = parser.parse_args(argv)
    try:
        slope = render_rate_plot(args.rates_csv, args.out_image)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"slope = {slope:.6f} -> {args.out_image}")
    return 0


def main_report(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_report", description="invariant time-series panels")
    parser.add_argument("report_csv")
    parser.add_argument("out_image")
    args = parser.parse_args(argv)
    try:
        render_invariant_timeseries(args.report_csv, args.out_image)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"report panels -> {args.out_image}")
    return 0


if __name__ == "__main__":
    sys.exit(main_rates())
