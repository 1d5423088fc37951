"""Figure CLI: plots conservation|snapshots|convergence --run DIR --out PREFIX."""

from __future__ import annotations

import argparse
import sys

from .artifacts import ArtifactError
from .figures import SNAPSHOT_FIELDS, plot_conservation, plot_convergence, plot_snapshots

__all__ = ["main"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from solver run artifacts"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cons = sub.add_parser("conservation", help="five-panel conservation series")
    p_snap = sub.add_parser("snapshots", help="per-time field snapshot sheet")
    p_conv = sub.add_parser("convergence", help="deformed-boundary overlay per order")
    for p in (p_cons, p_snap, p_conv):
        p.add_argument("--run", required=True, help="run directory (sweep directory for convergence)")
        p.add_argument("--out", required=True, help="output path prefix")
        p.add_argument("--format", default="png", choices=("png", "svg"))
    p_snap.add_argument("--field", default="pressure", choices=SNAPSHOT_FIELDS)

    args = parser.parse_args(argv)
    try:
        if args.command == "conservation":
            out = plot_conservation(args.run, args.out, fmt=args.format)
        elif args.command == "snapshots":
            out = plot_snapshots(args.run, args.field, args.out, fmt=args.format)
        else:
            out = plot_convergence(args.run, args.out, fmt=args.format)
    except ArtifactError as err:
        print(f"plots: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"plots: i/o error: {err}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
