"""plotgen command line: --kind, --input, --out (plus optional axis flags)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotgen", description="render figures from exported mpcs.csv tables")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--input", required=True, nargs="+", type=Path, help="one or more mpcs.csv files")
    parser.add_argument("--out", required=True, type=Path, help="output image path (.png)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlim", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    parser.add_argument("--ylim", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.input),
            out=args.out,
            title=args.title,
            xlim=tuple(args.xlim) if args.xlim else None,
            ylim=tuple(args.ylim) if args.ylim else None,
        )
        out = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
