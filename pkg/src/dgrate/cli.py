"""Command line interface: run, convergence, inspect-mesh."""

import argparse
import os
import sys

from dgrate import cases
from dgrate.mesh import load_mesh_files, validate_mesh


def _cmd_run(args):
    with open(args.config) as f:
        config = cases.parse_config(f.read(), base_dir=os.path.dirname(args.config) or ".")
    result = cases.run_simulation(config, progress=args.progress)
    print(f"completed {config.case} at t = {result.t:.6f} "
          f"({len(result.diagnostics.rows)} steps)")
    for path in result.snapshot_paths:
        print(f"snapshot: {path}")
    return 0


def _cmd_convergence(args):
    with open(args.config) as f:
        config = cases.parse_config(f.read(), base_dir=os.path.dirname(args.config) or ".")
    bases = [m[:-5] if m.endswith(".node") else m for m in args.meshes]
    rows = cases.convergence_study(config, bases, progress=args.progress)
    out = config.output or "."
    os.makedirs(out, exist_ok=True)
    text = cases.write_eoc_table(rows, os.path.join(out, "eoc.csv"),
                                 os.path.join(out, "eoc.txt"))
    print(text, end="")
    return 0


def _cmd_inspect_mesh(args):
    base = args.mesh[:-5] if args.mesh.endswith(".node") else args.mesh
    mesh = load_mesh_files(base)
    report = validate_mesh(mesh, strict=False)
    for key, val in report.items():
        print(f"{key}: {val}")
    return 0 if report.get("ok") else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dgrate")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--progress", type=int, default=0,
                       help="print progress every N steps")
    p_run.set_defaults(func=_cmd_run)

    p_conv = sub.add_parser("convergence", help="accuracy study over a mesh sequence")
    p_conv.add_argument("config")
    p_conv.add_argument("meshes", nargs="+")
    p_conv.add_argument("--progress", type=int, default=0)
    p_conv.set_defaults(func=_cmd_convergence)

    p_insp = sub.add_parser("inspect-mesh", help="report mesh quality and connectivity")
    p_insp.add_argument("mesh")
    p_insp.set_defaults(func=_cmd_inspect_mesh)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
