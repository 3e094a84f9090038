"""CSV schemas consumed by the renderer.

Each figure reads one results CSV; validation names the first missing
column (or the missing file) so a broken pipeline fails loudly. All
statistics (medians, bands, win rates) are computed upstream; the
renderer only draws what the CSVs contain.
"""

from __future__ import annotations

import csv
import os


class SchemaError(ValueError):
    """Input CSV does not conform to the expected schema."""


REQUIRED_COLUMNS = {
    "spectra.csv": ["kind", "index", "eigenvalue"],
    "bars.csv": ["kind", "method", "initial_loss", "final_best_loss", "orders"],
    "trajectories.csv": ["kind", "method", "step", "loss_median",
                         "loss_q025", "loss_q975"],
    "hitting.csv": ["sigma", "median", "q025", "q975", "frac_capped", "baseline"],
    "linesearch_summary.csv": ["policy", "step", "gap_median", "gap_q025",
                               "gap_q975", "gnorm_median", "gnorm_q025",
                               "gnorm_q975", "dist_median", "dist_q025",
                               "dist_q975"],
}


def load_rows(csv_dir: str, name: str) -> list[dict]:
    """Read and validate one results CSV; returns a list of row dicts."""
    path = os.path.join(csv_dir, name)
    if not os.path.isfile(path):
        raise SchemaError(f"missing input file {name!r} in {csv_dir!r}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS[name]:
            if col not in header:
                raise SchemaError(f"{name}: missing column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{name}: no data rows")
    return rows


def to_float(value: str) -> float:
    """Parse a CSV float; empty optional cells become NaN."""
    if value is None or value == "":
        return float("nan")
    return float(value)
