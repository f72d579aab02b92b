"""High-order volume quadrature on the reference triangle (error norms only).

Built by collapsing a tensor Gauss-Legendre rule onto the triangle; exact
for polynomials well beyond degree 2p, so the L2 error of the nodal
polynomial against a smooth reference is quadrature-dominated by neither
side.  The solver itself never uses this rule.
"""

import numpy as np


def triangle_quadrature(n=8):
    """Points (nq, 2) and weights (nq,) integrating over the reference triangle."""
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    a, b = np.meshgrid(t, t, indexing="ij")
    wa, wb = np.meshgrid(w, w, indexing="ij")
    x = (a * (1.0 - b)).ravel()
    y = b.ravel()
    weights = (wa * wb * (1.0 - b)).ravel()
    return np.column_stack([x, y]), weights


def l2_error_density(u, mesh, element, exact_rho, n=8):
    """L2 norm of (rho_h - exact_rho) over the mesh.

    exact_rho(x, y) must accept arrays and vectorize.
    """
    from dgrate.mesh import all_cell_geometry

    pts, wq = triangle_quadrature(n)
    phi = element.basis.eval_at(pts)  # (nq, N)
    v0 = mesh.vertices[mesh.cells[:, 0]]
    v1 = mesh.vertices[mesh.cells[:, 1]]
    v2 = mesh.vertices[mesh.cells[:, 2]]
    xy = (v0[:, None, :]
          + pts[None, :, 0, None] * (v1 - v0)[:, None, :]
          + pts[None, :, 1, None] * (v2 - v0)[:, None, :])  # (Z, nq, 2)
    rho_h = np.einsum("qk,zk->zq", phi, u[..., 0])
    diff2 = (rho_h - exact_rho(xy[..., 0], xy[..., 1])) ** 2
    det = all_cell_geometry(mesh)["det"]
    return float(np.sqrt(np.einsum("z,q,zq->", det, wq, diff2)))
