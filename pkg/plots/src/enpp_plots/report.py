"""Multi-panel invariant time-series figure from a run report CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .rates import PlotError

PANEL_COLUMNS = ("time", "div_u", "min_n", "min_p", "lp2_sum", "lp4_sum",
                 "blowup_integral")


def read_report(path):
    path = Path(path)
    if not path.exists():
        raise PlotError(f"report file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise PlotError(f"{path}: no data rows")
    header = rows[0].keys()
    missing = [c for c in PANEL_COLUMNS if c not in header]
    if missing:
        raise PlotError(f"{path}: missing columns {missing}")
    return {c: np.array([float(r[c]) for r in rows]) for c in header}


def render_invariant_timeseries(report_csv, out_image) -> None:
    """Four panels: divergence, charge minima, L^a sums, blow-up integral."""
    data = read_report(report_csv)
    t = data["time"]

    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.5), sharex=True)

    ax = axes[0, 0]
    ax.plot(t, data["div_u"], color="tab:red")
    ax.set_yscale("symlog", linthresh=1e-16)
    ax.set_ylabel("|div u| (L2)")
    ax.set_title("incompressibility")

    ax = axes[0, 1]
    ax.plot(t, data["min_n"], label="min n", color="tab:blue")
    ax.plot(t, data["min_p"], label="min p", color="tab:orange")
    ax.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_ylabel("grid minima")
    ax.set_title("charge positivity")
    ax.legend()

    ax = axes[1, 0]
    ax.plot(t, data["lp2_sum"], label="a = 2", color="tab:green")
    ax.plot(t, data["lp4_sum"], label="a = 4", color="tab:purple")
    ax.set_ylabel("||n||_a^a + ||p||_a^a")
    ax.set_xlabel("time")
    ax.set_title("charge dissipation")
    ax.legend()

    ax = axes[1, 1]
    ax.plot(t, data["blowup_integral"], color="black")
    ax.set_ylabel("integral of ||grad u||_inf")
    ax.set_xlabel("time")
    ax.set_title("continuation functional")

    for ax in axes.flat:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_image, dpi=150)
    plt.close(fig)
