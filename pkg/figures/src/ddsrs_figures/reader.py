"""Reading and validating experiment result CSVs.

The nine-column schema below is the interface contract with the
simulation package; it is restated here instead of imported so the two
packages share nothing but the files.
"""

from __future__ import annotations

import csv
from pathlib import Path

CSV_COLUMNS = (
    "experiment", "method", "axis_name", "axis_value",
    "metric_name", "metric_value", "ci_halfwidth", "trials", "seed",
)


def read_rows(paths) -> list[dict]:
    """Concatenate rows from one or more result CSVs, validating each file.

    Raises ValueError for a missing file, unexpected columns, an empty
    file, or unparsable numeric fields, naming the offending file.
    """
    rows: list[dict] = []
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise ValueError(f"{path}: no such file")
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
                raise ValueError(
                    f"{path}: expected columns {CSV_COLUMNS}, got {reader.fieldnames}"
                )
            file_rows = []
            for lineno, rec in enumerate(reader, start=2):
                try:
                    file_rows.append({
                        "experiment": rec["experiment"],
                        "method": rec["method"],
                        "axis_name": rec["axis_name"],
                        "axis_value": float(rec["axis_value"]),
                        "metric_name": rec["metric_name"],
                        "metric_value": float(rec["metric_value"]),
                        "ci_halfwidth": float(rec["ci_halfwidth"]),
                        "trials": int(rec["trials"]),
                        "seed": int(rec["seed"]),
                    })
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad row: {exc}") from exc
        if not file_rows:
            raise ValueError(f"{path}: no data rows")
        rows.extend(file_rows)
    return rows
