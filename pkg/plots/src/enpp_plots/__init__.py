"""Publication-style figures from enpp CSV outputs.

Read-only consumers: the scripts never modify their inputs, and rendering
is deterministic (no timestamps are embedded in the images).
"""

from .rates import PlotError, fit_rate, render_rate_plot
from .report import render_invariant_timeseries

__all__ = ["PlotError", "fit_rate", "render_rate_plot",
           "render_invariant_timeseries"]

__version__ = "0.1.0"
