"""Deterministic CSV and metadata output.

All files are UTF-8 with a header row, '.' decimal separator, '\n' line
endings, and floats printed with 17 significant digits so re-reading
round-trips exactly. Rows are written in the order given; callers sort by
key first so output is independent of execution order.
"""

from __future__ import annotations

import json
import math
import os


def format_value(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def write_csv(path, header, rows):
    """Write rows (sequences or dicts keyed by header) to path."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            if isinstance(row, dict):
                row = [row[h] for h in header]
            fh.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(path):
    """Read a CSV written by write_csv into (header, list of row dicts)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    return header, rows


def write_metadata(path, doc: dict):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
