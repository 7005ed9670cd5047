"""Command-line entry point: plotkit render --kind ... --in ... --out ..."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="Render harness CSVs as figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", required=True, action="append",
                   help="input CSV (repeatable)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--title")
    p.add_argument("--linear-y", action="store_true", help="disable the log y-axis")
    p.add_argument("--ci", action="store_true", help="draw confidence whiskers")
    p.add_argument("--u", type=int, help="overlap value for histogram guides")
    p.add_argument("--v", type=int, help="circulant weight for histogram guides")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(
        inputs=tuple(args.inputs),
        kind=args.kind,
        output=args.out,
        title=args.title,
        log_y=not args.linear_y,
        ci_whiskers=args.ci,
        u=args.u,
        v=args.v,
    )
    try:
        path = render(job)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
