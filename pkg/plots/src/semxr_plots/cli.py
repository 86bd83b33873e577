"""Script entry: --input CSV --kind {sweep,rates,heatmap,broadcast} --out IMAGE."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, ContractError, FigureSpec, render_figure


def run(argv: list[str]) -> int:
    parser = argparse.ArgumentParser(
        prog="semxr-plots",
        description="Render a figure from a simulator report CSV.",
    )
    parser.add_argument("--input", required=True, help="report CSV path")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image (.png, .svg, .pdf)")
    parser.add_argument("--quiet", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        path = render_figure(FigureSpec(args.input, args.kind, args.out))
    except FileNotFoundError as exc:
        print(f"semxr-plots: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"semxr-plots: contract violation: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
