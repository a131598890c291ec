"""Command line wrapper: render --fig fig4 --in data/fig4.csv --out fig4.png"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from wvplots.render import SCHEMAS, DataError, FigureSpec, SchemaError, render_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a wvlab CSV dataset into a figure."
    )
    parser.add_argument("--fig", required=True, choices=sorted(SCHEMAS), help="figure id")
    parser.add_argument("--in", dest="csv_path", required=True, help="input CSV path")
    parser.add_argument("--out", dest="out_path", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=args.fig,
        csv_path=Path(args.csv_path),
        out_path=Path(args.out_path),
        dpi=args.dpi,
    )
    try:
        fig = render_figure(spec)
        plt.close(fig)
    except (SchemaError, DataError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
