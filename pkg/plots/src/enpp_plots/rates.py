"""Log-log convergence-rate plot with an independently refitted slope."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class PlotError(ValueError):
    """Input CSV missing, empty, or lacking required columns."""


REQUIRED_COLUMNS = ("nu", "err_u", "err_n", "err_p")


def read_rates(path):
    """Columns of a rates CSV as float arrays, keyed by header name."""
    path = Path(path)
    if not path.exists():
        raise PlotError(f"rates file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise PlotError(f"{path}: no data rows")
    header = rows[0].keys()
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise PlotError(f"{path}: missing columns {missing}")
    data = {c: np.array([float(r[c]) for r in rows]) for c in header}
    return data


def fit_rate(data):
    """Least-squares slope of log(total error) against log(nu).

    Recomputed from the CSV columns, independent of any fit shipped next to
    the data, so the two can be cross-checked.
    """
    nu = data["nu"]
    total = data["err_u"] + data["err_n"] + data["err_p"]
    if np.any(nu <= 0) or np.any(total <= 0):
        raise PlotError("rates must be positive for a log-log fit")
    slope, intercept = np.polyfit(np.log(nu), np.log(total), 1)
    return float(slope), float(intercept), total


def render_rate_plot(rates_csv, out_image) -> float:
    """Render the log-log scatter, fitted line and slope-1/2 guide.

    Returns the fitted slope (also printed in the legend).
    """
    data = read_rates(rates_csv)
    slope, intercept, total = fit_rate(data)
    nu = data["nu"]

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(nu, total, "o", color="black", label="total error")
    for column, marker, color in (("err_u", "s", "tab:blue"),
                                  ("err_n", "^", "tab:orange"),
                                  ("err_p", "v", "tab:green")):
        series = data[column]
        if np.all(series > 0):
            ax.loglog(nu, series, marker, markersize=4, alpha=0.6,
                      color=color, label=column)

    nu_line = np.array([nu.min(), nu.max()])
    ax.loglog(nu_line, np.exp(intercept) * nu_line**slope, "-",
              color="black", label=f"fit: slope = {slope:.2f}")
    anchor = total[np.argmin(nu)] / np.sqrt(nu.min())
    ax.loglog(nu_line, anchor * np.sqrt(nu_line), "--", color="gray",
              label="slope 1/2 guide")

    ax.set_xlabel("viscosity")
    ax.set_ylabel("error vs inviscid run")
    ax.set_title("Vanishing-viscosity convergence rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_image, dpi=150)
    plt.close(fig)
    return slope
