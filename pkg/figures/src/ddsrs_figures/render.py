"""Deterministic SVG rendering of experiment result figures.

Series are grouped by the method column in order of first appearance, so
the legend order follows the writing order of the experiment.  Output is
SVG with a fixed hash salt and no embedded date, making a re-render of
the same CSV byte-identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # batch rendering only; never a display backend

import matplotlib.pyplot as plt

from ddsrs_figures.reader import read_rows
from ddsrs_figures.spec import FigureSpec, layout_for

_HASH_SALT = "ddsrs-figures"
_MARKERS = ("o", "s", "^", "d", "v", "p", "*", "x")
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f")


def _series(rows: list[dict], layout) -> dict[str, list[dict]]:
    """Group the figure's rows by method, preserving first-appearance order."""
    picked = [r for r in rows
              if r["experiment"] == layout.experiment
              and r["axis_name"] not in layout.drop_axis_names]
    if not picked:
        raise ValueError(f"no rows for experiment {layout.experiment!r} in the inputs")
    stray = {r["axis_name"] for r in picked} - {layout.axis_name}
    if stray:
        raise ValueError(
            f"experiment {layout.experiment!r}: unexpected axis_name values {sorted(stray)}"
        )
    out: dict[str, list[dict]] = {}
    for row in picked:
        out.setdefault(row["method"], []).append(row)
    for method, series in out.items():
        series.sort(key=lambda r: r["axis_value"])
        if len(series) < 2:
            raise ValueError(
                f"series {method!r} has {len(series)} point(s); need at least 2"
            )
    return out


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure for a spec; the caller owns closing it."""
    layout = layout_for(spec.figure)
    grouped = _series(read_rows(spec.inputs), layout)

    with plt.rc_context({"svg.hashsalt": _HASH_SALT}):
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        for k, (method, series) in enumerate(grouped.items()):
            x = [r["axis_value"] for r in series]
            y = [r["metric_value"] for r in series]
            err = [r["ci_halfwidth"] for r in series]
            if layout.log_y:
                # zero rates have no position on a log axis; leave a gap
                y = [v if v > 0 else math.nan for v in y]
            ax.errorbar(x, y, yerr=err, label=method,
                        color=_COLORS[k % len(_COLORS)],
                        marker=_MARKERS[k % len(_MARKERS)],
                        markersize=4.5, linewidth=1.4, capsize=2.5)
        if layout.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(layout.x_label)
        ax.set_ylabel(layout.y_label)
        ax.set_title(layout.title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Render a spec to its SVG path and return the path."""
    fig = build_figure(spec)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        with plt.rc_context({"svg.hashsalt": _HASH_SALT}):
            fig.savefig(out, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return out
