"""Figure definitions: which experiment feeds which plot, and how.

Figure ids are stable small integers so batch scripts and file names can
refer to them tersely; each id maps to one experiment name in the CSV and
fixes the axes.  BER and MSE magnitudes span decades and get log y axes;
NMSE rows arrive already in dB, so those axes stay linear.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class FigureLayout:
    """Axes and selection rules for one figure id."""

    experiment: str          # experiment column value the figure consumes
    axis_name: str           # expected axis_name of every plotted row
    x_label: str
    y_label: str
    log_y: bool
    title: str
    drop_axis_names: tuple[str, ...] = ()   # summary rows to leave out


_LAYOUTS: dict[int, FigureLayout] = {
    2: FigureLayout(
        experiment="nmse_vs_snr", axis_name="snr_db",
        x_label="SNR (dB)", y_label="NMSE (dB)", log_y=False,
        title="Channel-estimation NMSE vs SNR",
    ),
    3: FigureLayout(
        experiment="nmse_vs_speed", axis_name="speed_kmh",
        x_label="speed (km/h)", y_label="NMSE (dB)", log_y=False,
        title="Channel-estimation NMSE vs speed",
    ),
    4: FigureLayout(
        experiment="ber_per_symbol", axis_name="symbol_index",
        x_label="symbol index", y_label="BER", log_y=True,
        title="BER after the first sounding burst",
    ),
    5: FigureLayout(
        experiment="ber_per_slot", axis_name="slot_index",
        x_label="slot index", y_label="BER", log_y=True,
        title="Per-slot BER of the data-driven receiver",
    ),
    6: FigureLayout(
        experiment="mse_vs_symbol", axis_name="symbol_position",
        x_label="symbol position", y_label="channel MSE", log_y=True,
        title="Channel-model MSE across the frame",
        drop_axis_names=("overall",),
    ),
}

FIGURE_IDS = tuple(sorted(_LAYOUTS))


def layout_for(figure: int) -> FigureLayout:
    if figure not in _LAYOUTS:
        raise ValueError(f"unknown figure id {figure}; expected one of {FIGURE_IDS}")
    return _LAYOUTS[figure]


@dataclass(frozen=True)
class FigureSpec:
    """One render request: figure id, input CSVs, output SVG path."""

    figure: int
    inputs: tuple[Path, ...]
    out: Path

    def __post_init__(self) -> None:
        layout_for(self.figure)
        if not self.inputs:
            raise ValueError("FigureSpec: at least one input CSV is required")
        if Path(self.out).suffix.lower() != ".svg":
            raise ValueError(f"FigureSpec: output must be an .svg path, got {self.out}")
