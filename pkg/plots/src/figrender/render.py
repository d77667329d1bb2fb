"""Command line: render one figure recipe from anirabi CLI artifacts.

    render_fig.py --recipe fig2 --in scan.csv --out fig2.png

Exit codes: 0 success, 1 usage, 2 missing or mismatched input.
"""

from __future__ import annotations

import argparse
import sys

from .csvdata import DataError
from .recipes import RECIPES


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="render_fig", description=__doc__)
    parser.add_argument(
        "--recipe", required=True, choices=sorted(RECIPES),
        help="which figure to build",
    )
    parser.add_argument(
        "--in", dest="inputs", required=True, nargs="+",
        help="input CSV file(s) written by the anirabi CLI",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--list", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    recipe = RECIPES[args.recipe]
    try:
        info = recipe.render(args.inputs, args.out)
    except DataError as exc:
        print(f"render_fig: {exc}", file=sys.stderr)
        return 2
    extras = ", ".join(f"{k}={v}" for k, v in info.items() if v)
    print(f"wrote {args.out}" + (f" ({extras})" if extras else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
