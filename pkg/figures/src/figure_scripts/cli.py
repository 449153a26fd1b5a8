"""Command line entry point.

    figures pump-sweep    --in sweep.csv [sweep2.csv ...] --out fig.png
    figures phase-diagram --in phase.csv --out fig.svg
    figures currents      --in currents.csv --out fig.png

Exits 1 with a message on malformed or empty input.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt

from .io import FigureDataError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from photon-engine CSV outputs")
    subs = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub = subs.add_parser(kind)
        sub.add_argument("--in", dest="inputs", nargs="+", required=True,
                         help="input CSV file(s)")
        sub.add_argument("--out", required=True, help="output image (png/svg)")
        sub.add_argument("--manifest", default=None,
                         help="manifest sidecar (default: <csv>.manifest.json)")
        sub.add_argument("--linear", action="store_true",
                         help="linear instead of log occupation axis")
        sub.add_argument("--no-arrows", action="store_true",
                         help="suppress threshold annotations")
        sub.add_argument("--no-carnot", action="store_true",
                         help="suppress the Carnot reference curve")
        sub.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out=args.out, manifest=args.manifest,
                          log_y=not args.linear, arrows=not args.no_arrows,
                          carnot=not args.no_carnot, title=args.title)
        fig = render(spec)
    except FigureDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
