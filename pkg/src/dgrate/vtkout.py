"""Legacy VTK ASCII output of discontinuous nodal fields.

Every cell emits its own points (no sharing between cells, the field is
discontinuous).  Degree 1 cells map to one VTK triangle, degree 3 cells to
the canonical 9-subtriangle split of the 10-node set.  Point data: rho,
pressure, Mach, entropy U.
"""

import numpy as np
from scipy.spatial import Delaunay

from dgrate import euler


def _subtriangulation(element):
    if element.degree == 1:
        return np.array([[0, 1, 2]])
    tri = Delaunay(element.nodes).simplices.copy()
    # enforce CCW orientation per subtriangle
    pts = element.nodes
    for t in tri:
        a, b, c = pts[t]
        if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0:
            t[1], t[2] = t[2], t[1]
    return tri[np.lexsort(tri.T[::-1])]


def write_vtk(u, mesh, element, path, gamma=euler.GAMMA_DEFAULT):
    """Write the field as an UNSTRUCTURED_GRID legacy VTK file."""
    Z, N = u.shape[0], u.shape[1]
    v0 = mesh.vertices[mesh.cells[:, 0]]
    v1 = mesh.vertices[mesh.cells[:, 1]]
    v2 = mesh.vertices[mesh.cells[:, 2]]
    r = element.nodes[:, 0]
    s = element.nodes[:, 1]
    pts = (v0[:, None, :]
           + r[None, :, None] * (v1 - v0)[:, None, :]
           + s[None, :, None] * (v2 - v0)[:, None, :])  # (Z, N, 2)

    sub = _subtriangulation(element)
    n_tri = Z * len(sub)
    conn = (np.arange(Z)[:, None, None] * N + sub[None, :, :]).reshape(n_tri, 3)

    rho = u[..., 0].reshape(-1)
    p = euler.pressure(u, gamma).reshape(-1)
    speed = (np.sqrt(u[..., 1] ** 2 + u[..., 2] ** 2) / u[..., 0]).reshape(-1)
    mach = speed / np.sqrt(gamma * p / rho)
    entropy = (-u[..., 0] * euler.entropy_scalar(u, gamma)).reshape(-1)

    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("dgrate solution snapshot\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {Z * N} double\n")
        flat = pts.reshape(-1, 2)
        for x, y in flat:
            f.write(f"{float(x)!r} {float(y)!r} 0.0\n")
        f.write(f"CELLS {n_tri} {4 * n_tri}\n")
        for a, b, c in conn:
            f.write(f"3 {a} {b} {c}\n")
        f.write(f"CELL_TYPES {n_tri}\n")
        f.write("5\n" * n_tri)
        f.write(f"POINT_DATA {Z * N}\n")
        for name, data in (("rho", rho), ("pressure", p), ("Mach", mach), ("entropy", entropy)):
            f.write(f"SCALARS {name} double 1\n")
            f.write("LOOKUP_TABLE default\n")
            for val in data:
                f.write(f"{float(val)!r}\n")
