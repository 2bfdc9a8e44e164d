"""Fixture CSVs shaped like real experiment outputs."""

import csv

import pytest

CSV_COLUMNS = (
    "experiment", "method", "axis_name", "axis_value",
    "metric_name", "metric_value", "ci_halfwidth", "trials", "seed",
)

FIXTURE_ROWS = {
    "nmse_vs_snr": [
        ("nmse_vs_snr", m, "snr_db", x, "nmse_db", v, 0.3, 200, 1)
        for m, curve in (("fd", [-8.0, -15.0, -17.0, -17.7]),
                         ("dd", [-2.8, -12.0, -20.0, -25.5]))
        for x, v in zip([0.0, 10.0, 20.0, 30.0], curve)
    ],
    "nmse_vs_speed": [
        ("nmse_vs_speed", m, "speed_kmh", x, "nmse_db", v, 0.2, 100, 1)
        for m, curve in (("fd", [-24.0, -18.0, -13.0, -10.0]),
                         ("dd", [-19.0, -17.0, -15.0, -14.0]))
        for x, v in zip([50.0, 120.0, 210.0, 320.0], curve)
    ],
    "ber_per_symbol": [
        ("ber_per_symbol", m, "symbol_index", x, "ber", v, 0.001, 200, 1)
        for m, curve in (("fd", [0.10, 0.11, 0.12]),
                         ("dd_bem", [0.005, 0.031, 0.10]),
                         ("dd_data_driven", [0.0027, 0.0024, 0.0025]))
        for x, v in zip([15.0, 16.0, 17.0], curve)
    ],
    "ber_per_slot": [
        ("ber_per_slot", "dd_data_driven", "slot_index", x, "ber", v, 0.002, 200, 1)
        for x, v in zip([1.0, 2.0, 3.0, 4.0], [0.006, 0.002, 0.008, 0.035])
    ],
    "mse_vs_symbol": [
        ("mse_vs_symbol", m, "symbol_position", x, "mse", v, 1e-5, 100, 1)
        for m, scale in (("dd_data_driven", 1.0), ("dd_bem", 3.0))
        for x, v in zip([10.0, 10.25, 10.5, 10.75], [6e-5 * scale] * 4)
    ] + [
        ("mse_vs_symbol", "dd_data_driven", "overall", 0.0,
         "update_improves_fraction", 0.999, 0.001, 100, 1),
    ],
}


def _write_csv(path, rows, columns=CSV_COLUMNS):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    return path


@pytest.fixture
def csv_columns():
    return CSV_COLUMNS


@pytest.fixture
def write_rows(tmp_path):
    """Factory: CSV at tmp_path/name from explicit row tuples."""
    def _write(name, rows, columns=CSV_COLUMNS):
        return _write_csv(tmp_path / name, rows, columns)
    return _write


@pytest.fixture
def make_csv(tmp_path):
    """Factory: fixture CSV for a named experiment (or explicit rows)."""
    def _make(experiment, rows=None, name=None):
        rows = FIXTURE_ROWS[experiment] if rows is None else rows
        return _write_csv(tmp_path / (name or f"{experiment}.csv"), rows)
    return _make


@pytest.fixture
def fixture_rows():
    return FIXTURE_ROWS
