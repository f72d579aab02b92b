"""Entropy-rate controlled DG solver for the 2D compressible Euler equations.

The discretization is a nodal discontinuous Galerkin method on unstructured
triangle meshes (degrees 1 and 3) with HLL fluxes.  On top of the plain DG
update, per-cell corrections steer the discrete entropy: an HLL-based
entropy inequality predictor bounds the admissible dissipation rate on every
edge, and a positive conservative filter generator supplies the correction
direction.
"""

from dgrate.ref_element import ReferenceElement
from dgrate.mesh import Mesh, load_triangle_mesh, load_mesh_files
from dgrate.filters import FilterGenerator, PositiveCubature
from dgrate.solver import DGOperator
from dgrate.cases import RunConfig, run_simulation, convergence_study

__all__ = [
    "ReferenceElement",
    "Mesh",
    "load_triangle_mesh",
    "load_mesh_files",
    "FilterGenerator",
    "PositiveCubature",
    "DGOperator",
    "RunConfig",
    "run_simulation",
    "convergence_study",
]
