"""Command line interface: plot snapshot|convergence|diagnostics."""

import argparse

from plotkit.render import render_convergence, render_diagnostics, render_snapshot


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plot", description="render dgrate output files to images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snapshot", help="pseudocolor field plot from a VTK file")
    p.add_argument("vtk", help="legacy VTK snapshot file")
    p.add_argument("-o", "--output", required=True, help="output image path")
    p.add_argument("-f", "--field", default="rho",
                   help="point field name (default rho)")
    p.add_argument("--cmap", default="viridis")
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--title", default=None)

    p = sub.add_parser("convergence", help="log-log error plot from an EOC CSV")
    p.add_argument("csv", help="EOC table CSV")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--slopes", type=float, nargs="+", default=[2.0, 4.0],
                   help="reference slopes to draw (default 2 4)")
    p.add_argument("--title", default=None)

    p = sub.add_parser("diagnostics", help="time series panel from diagnostics CSV")
    p.add_argument("csv", help="per-step diagnostics CSV")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--title", default=None)

    args = parser.parse_args(argv)
    if args.command == "snapshot":
        render_snapshot(args.vtk, args.output, field=args.field,
                        cmap=args.cmap, vmin=args.vmin, vmax=args.vmax,
                        title=args.title)
    elif args.command == "convergence":
        render_convergence(args.csv, args.output, slopes=args.slopes,
                           title=args.title)
    else:
        render_diagnostics(args.csv, args.output, title=args.title)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
