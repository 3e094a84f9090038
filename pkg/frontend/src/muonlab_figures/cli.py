"""render_figures: draw every figure a results directory supports.

Usage: render_figures <csv_dir> <out_dir> [--only FIG] [--raster]

Without --only, every figure whose input CSV is present is rendered and
figures whose inputs are absent are skipped with a notice; with --only,
a missing input is an error. Schema violations exit nonzero and name the
offending file/column.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import FIGURES, render
from .schemas import REQUIRED_COLUMNS, SchemaError

_INPUTS = {
    "eig_distributions": "spectra.csv",
    "improvement_bars_aligned": "bars.csv",
    "improvement_bars_absolute": "bars.csv",
    "avg_trajectories": "trajectories.csv",
    "median_hitting": "hitting.csv",
    "linesearch_gap": "linesearch_summary.csv",
    "linesearch_diag": "linesearch_summary.csv",
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render_figures",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("csv_dir")
    parser.add_argument("out_dir")
    parser.add_argument("--only", choices=FIGURES, default=None)
    parser.add_argument("--raster", action="store_true",
                        help="emit PNG instead of vector SVG")
    args = parser.parse_args(argv)

    if not os.path.isdir(args.csv_dir):
        print(f"error: csv_dir {args.csv_dir!r} is not a directory",
              file=sys.stderr)
        return 2
    fmt = "png" if args.raster else "svg"
    targets = [args.only] if args.only else list(FIGURES)
    rendered = 0
    for figure in targets:
        source = os.path.join(args.csv_dir, _INPUTS[figure])
        if not os.path.isfile(source) and args.only is None:
            print(f"skip {figure}: no {_INPUTS[figure]}")
            continue
        try:
            path = render(figure, args.csv_dir, args.out_dir, fmt=fmt)
        except SchemaError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path}")
        rendered += 1
    if rendered == 0:
        print("error: no figure inputs found", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
