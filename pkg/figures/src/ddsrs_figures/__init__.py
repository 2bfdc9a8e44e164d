"""Figure rendering for ddsrs experiment results.

This package is deliberately decoupled from the simulation library: it
reads only the nine-column CSV files the experiments write and never
recomputes a metric, so the simulation stays the single source of
numerical truth.  Output is deterministic SVG.
"""

from ddsrs_figures.spec import FIGURE_IDS, FigureSpec, layout_for
from ddsrs_figures.render import build_figure, render

__all__ = ["FIGURE_IDS", "FigureSpec", "layout_for", "build_figure", "render"]
