"""Acceptance: render real solver outputs; rendered arrays match the files."""

import os

import numpy as np

from plotkit.render import render_convergence, render_diagnostics, render_snapshot
from plotkit.vtkread import read_vtk

DATA = os.path.join(os.path.dirname(__file__), "data")


def test_sedov_snapshot_renders_and_round_trips(tmp_path):
    vtk = os.path.join(DATA, "sedov_final.vtk")
    out = str(tmp_path / "sedov.png")
    data = render_snapshot(vtk, out, field="rho", title="blast density")
    assert os.path.getsize(out) > 0
    src = read_vtk(vtk)
    assert np.array_equal(data["values"], src.scalars["rho"])
    assert np.array_equal(data["x"], src.points[:, 0])
    assert np.array_equal(data["y"], src.points[:, 1])
    assert np.array_equal(data["triangles"], src.triangles)
    # the solver writes repr() doubles: parsing must be bit-exact
    with open(vtk) as f:
        lines = f.read().splitlines()
    start = lines.index("SCALARS rho double 1") + 2
    first = float(lines[start])
    assert data["values"][0] == first


def test_eoc_csv_renders_and_round_trips(tmp_path):
    csv_path = os.path.join(DATA, "eoc.csv")
    out = str(tmp_path / "eoc.png")
    data = render_convergence(csv_path, out, slopes=(2,))
    assert os.path.getsize(out) > 0
    import csv as csvmod
    with open(csv_path, newline="") as f:
        rows = list(csvmod.DictReader(f))
    assert data["error"].tolist() == [float(r["l2_error"]) for r in rows]
    assert data["h"].tolist() == [float(r["typ_len"]) for r in rows]


def test_diagnostics_render(tmp_path):
    csv_path = os.path.join(DATA, "sedov_diagnostics.csv")
    out = str(tmp_path / "diag.png")
    data = render_diagnostics(csv_path, out)
    assert os.path.getsize(out) > 0
    assert np.all(np.diff(data["t"]) > 0)
