"""Command line: ``plot <kind> <csv> -o <image>``."""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt

from .render import KINDS, PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a rydsteady CSV table to an image",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv", help="input CSV path")
    parser.add_argument("-o", "--output", required=True, help="image path")
    parser.add_argument("--title", default=None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        fig, text = render(PlotJob(input_csv=args.csv, kind=args.kind,
                                   output=args.output, title=args.title))
        plt.close(fig)
    except SchemaError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output} (annotation {text})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
