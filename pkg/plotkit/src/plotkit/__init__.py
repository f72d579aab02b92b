"""Rendering of dgrate solver artifacts (legacy VTK, CSV) into figures."""

from plotkit.vtkread import read_vtk, Snapshot
from plotkit.render import render_snapshot, render_convergence, render_diagnostics

__all__ = ["read_vtk", "Snapshot", "render_snapshot", "render_convergence",
           "render_diagnostics"]
