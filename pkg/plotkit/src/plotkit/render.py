"""Figure rendering: pseudocolor snapshots, convergence and diagnostics plots.

Each render function saves an image and returns the data arrays it handed
to matplotlib, so tests can verify the rendered values equal the file
contents exactly (no resampling of point data).
"""

import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from plotkit.vtkread import read_vtk


def render_snapshot(vtk_path, out_path, field="rho", cmap="viridis",
                    vmin=None, vmax=None, title=None):
    """Filled-triangle pseudocolor plot of one point field with a colorbar."""
    snap = read_vtk(vtk_path)
    values = snap.field_named(field)
    tri = mtri.Triangulation(snap.points[:, 0], snap.points[:, 1],
                             snap.triangles)
    fig, ax = plt.subplots(figsize=(7, 6))
    # gouraud shading colors by the point values themselves
    im = ax.tripcolor(tri, values, shading="gouraud", cmap=cmap,
                      vmin=vmin, vmax=vmax)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or field)
    fig.colorbar(im, ax=ax, label=field)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return {"x": snap.points[:, 0], "y": snap.points[:, 1],
            "triangles": snap.triangles, "values": values}


def read_eoc_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 rows for a convergence plot")
    h = np.array([float(r["typ_len"]) for r in rows])
    err = np.array([float(r["l2_error"]) for r in rows])
    return h, err


def render_convergence(csv_path, out_path, slopes=(2, 4), title=None):
    """Log-log L2 error against the typical length, with reference slopes."""
    h, err = read_eoc_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.loglog(h, err, "o-", label="measured")
    for s in slopes:
        ref = err[-1] * (h / h[-1]) ** s
        ax.loglog(h, ref, "--", label=f"slope {s}")
    ax.set_xlabel("typical length sqrt(avg area)")
    ax.set_ylabel("L2 density error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return {"h": h, "error": err}


def read_diagnostics_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise ValueError(f"{path}: empty diagnostics file")
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def render_diagnostics(csv_path, out_path, title=None):
    """Time series panel: entropy budget, conserved totals, positivity."""
    d = read_diagnostics_csv(csv_path)
    t = d["t"]
    fig, axes = plt.subplots(2, 2, figsize=(11, 8), sharex=True)

    ax = axes[0, 0]
    ax.plot(t, d["entropy"], label="total entropy")
    ax.set_ylabel("entropy")
    ax.legend()

    ax = axes[0, 1]
    budget = d["sigma_total"] - d["boundary_entropy_flux"]
    ax.plot(t, d["entropy_rate"], label="entropy rate")
    ax.plot(t, budget, "--", label="rate bound")
    ax.set_ylabel("rate")
    ax.legend()

    ax = axes[1, 0]
    for key in ("mass", "energy"):
        ax.plot(t, d[key] / d[key][0], label=f"{key} / initial")
    ax.set_xlabel("t")
    ax.set_ylabel("conserved totals")
    ax.legend()

    ax = axes[1, 1]
    ax.semilogy(t, d["min_rho"], label="min rho")
    ax.semilogy(t, d["min_p"], label="min p")
    ax.set_xlabel("t")
    ax.set_ylabel("positivity")
    ax.legend()

    if title:
        fig.suptitle(title)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return d
