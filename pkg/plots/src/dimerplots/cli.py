"""plots <figure-kind> --in <csv> [<csv> ...] --out <png>"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from sweep/dynamics CSV output.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV file(s); timeseries accepts several")
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument("--title", default="")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                          output=args.out, title=args.title)
        path = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
