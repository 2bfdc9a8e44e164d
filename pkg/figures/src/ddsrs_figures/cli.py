"""Command-line figure rendering.

Exit codes: 0 on success, 2 for input problems (missing or malformed
CSV, bad figure id, bad output path).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ddsrs_figures.render import render
from ddsrs_figures.spec import FIGURE_IDS, FigureSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddsrs-figures",
        description="Render experiment result CSVs to SVG figures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from result CSVs")
    p.add_argument("--input", type=Path, nargs="+", required=True,
                   help="one or more result CSV files")
    p.add_argument("--figure", type=int, choices=FIGURE_IDS, required=True,
                   help="figure id")
    p.add_argument("--out", type=Path, required=True, help="output SVG path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(figure=args.figure, inputs=tuple(args.input), out=args.out)
        out = render(spec)
    except (ValueError, OSError) as exc:
        print(f"ddsrs-figures: {exc}", file=sys.stderr)
        return 2
    print(f"figure {args.figure} -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
