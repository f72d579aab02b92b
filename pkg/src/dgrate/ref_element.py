"""Nodal basis and exact Gramian operators on the reference triangle.

The reference triangle has vertices (0,0), (1,0), (0,1).  Supported
polynomial degrees are 1 and 3.  Edge nodes sit on Gauss-Lobatto points,
degree 3 additionally carries one interior node at the barycenter.

Local edge numbering (counter-clockwise):
    edge 0: (0,0) -> (1,0)
    edge 1: (1,0) -> (0,1)
    edge 2: (0,1) -> (0,0)
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
import os

import numpy as np

REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
# local (start, end) vertex of each reference edge
EDGE_VERTS = ((0, 1), (1, 2), (2, 0))
REF_EDGE_LENGTHS = np.array([1.0, np.sqrt(2.0), 1.0])

# Gauss-Lobatto points/weights on [0, 1]
_GL_PARAMS = {
    2: (np.array([0.0, 1.0]), np.array([0.5, 0.5])),
    4: (
        np.array([0.0, 0.5 * (1 - 1 / np.sqrt(5)), 0.5 * (1 + 1 / np.sqrt(5)), 1.0]),
        np.array([1 / 12, 5 / 12, 5 / 12, 1 / 12]),
    ),
}


def monomial_exponents(p):
    """Exponent pairs (k, l) with k + l <= p, graded order."""
    return [(k, d - k) for d in range(p + 1) for k in range(d + 1)]


def monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle."""
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 2))


def build_nodes(p):
    """Node set for degree p: vertices, edge Gauss-Lobatto points, barycenter."""
    if p == 1:
        return REF_VERTICES.copy()
    if p == 3:
        params = _GL_PARAMS[4][0][1:3]
        nodes = [REF_VERTICES[0], REF_VERTICES[1], REF_VERTICES[2]]
        for s, e in EDGE_VERTS:
            a, b = REF_VERTICES[s], REF_VERTICES[e]
            for t in params:
                nodes.append(a + t * (b - a))
        nodes.append(np.array([1 / 3, 1 / 3]))
        return np.array(nodes)
    raise ValueError(f"unsupported polynomial degree {p}, expected 1 or 3")


def edge_node_indices(p):
    """Per edge, the ordered indices of the p+1 nodes lying on it."""
    if p == 1:
        return [[0, 1], [1, 2], [2, 0]]
    return [[0, 3, 4, 1], [1, 5, 6, 2], [2, 7, 8, 0]]


def edge_quadrature(p):
    """Gauss-Lobatto weights on [0,1] for the p+1 edge nodes."""
    if p not in (1, 3):
        raise ValueError(f"unsupported polynomial degree {p}")
    return _GL_PARAMS[p + 1][1].copy()


def _vandermonde(points, exponents):
    pts = np.asarray(points, dtype=float)
    V = np.empty((len(pts), len(exponents)))
    for j, (k, l) in enumerate(exponents):
        V[:, j] = pts[:, 0] ** k * pts[:, 1] ** l
    return V


@dataclass
class Basis:
    """Nodal basis in monomial form: phi_l = sum_j coeffs[j, l] x^kj y^lj."""

    degree: int
    exponents: list
    coeffs: np.ndarray
    nodes: np.ndarray
    condition: float

    def eval_at(self, points):
        """Matrix of basis values, shape (npoints, N)."""
        return _vandermonde(points, self.exponents) @ self.coeffs

    def eval_grad_at(self, points):
        """Pair of (npoints, N) matrices: d phi / dx, d phi / dy."""
        pts = np.asarray(points, dtype=float)
        dx = np.zeros((len(pts), len(self.exponents)))
        dy = np.zeros_like(dx)
        for j, (k, l) in enumerate(self.exponents):
            if k > 0:
                dx[:, j] = k * pts[:, 0] ** (k - 1) * pts[:, 1] ** l
            if l > 0:
                dy[:, j] = l * pts[:, 0] ** k * pts[:, 1] ** (l - 1)
        return dx @ self.coeffs, dy @ self.coeffs


def build_basis(p, nodes):
    """Invert the generalized Vandermonde to get the nodal basis."""
    exps = monomial_exponents(p)
    V = _vandermonde(nodes, exps)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"node set is not unisolvent (cond = {cond:.3e})")
    coeffs = np.linalg.inv(V)
    return Basis(degree=p, exponents=exps, coeffs=coeffs, nodes=np.asarray(nodes), condition=cond)


def _exact_moment_matrix(exps_a, exps_b):
    """Matrix of exact monomial product integrals over the reference triangle."""
    out = np.empty((len(exps_a), len(exps_b)))
    for i, (ka, la) in enumerate(exps_a):
        for j, (kb, lb) in enumerate(exps_b):
            out[i, j] = float(monomial_integral(ka + kb, la + lb))
    return out


def build_gramians(basis):
    """Mass, stiffness and boundary Gramians by exact integration.

    Volume terms use the closed-form monomial integrals, edge terms a 1D
    Gauss rule exact for the occurring polynomial degrees.  No quadrature
    error beyond rounding, no mass lumping.
    """
    exps = basis.exponents
    C = basis.coeffs
    M = C.T @ _exact_moment_matrix(exps, exps) @ C

    # d/dx_m of monomial i against monomial j, integrated exactly
    stiffness = []
    for m in range(2):
        D = np.zeros((len(exps), len(exps)))
        for i, (k, l) in enumerate(exps):
            for j, (kb, lb) in enumerate(exps):
                if m == 0 and k > 0:
                    D[i, j] = k * float(monomial_integral(k - 1 + kb, l + lb))
                elif m == 1 and l > 0:
                    D[i, j] = l * float(monomial_integral(k + kb, l - 1 + lb))
        stiffness.append(C.T @ D @ C)
    S_r, S_s = stiffness

    # edge Gramians: 1D Gauss rule, exact up to degree 2p
    t, w = np.polynomial.legendre.leggauss(basis.degree + 2)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    boundary = []
    for m, (s, e) in enumerate(EDGE_VERTS):
        a, b = REF_VERTICES[s], REF_VERTICES[e]
        pts = a[None, :] + t[:, None] * (b - a)[None, :]
        phi = basis.eval_at(pts)
        Bm = np.einsum("q,qk,ql->kl", w * REF_EDGE_LENGTHS[m], phi, phi)
        boundary.append(Bm)

    return M, S_r, S_s, boundary


def grad_gramian(basis):
    """Q_kl = int grad(phi_k) . grad(phi_l) over the reference triangle."""
    exps = basis.exponents
    C = basis.coeffs
    n = len(exps)
    Q = np.zeros((n, n))
    for m in range(2):
        D = np.zeros((n, n))
        for i, (ka, la) in enumerate(exps):
            for j, (kb, lb) in enumerate(exps):
                if m == 0 and ka > 0 and kb > 0:
                    D[i, j] = ka * kb * float(monomial_integral(ka + kb - 2, la + lb))
                elif m == 1 and la > 0 and lb > 0:
                    D[i, j] = la * lb * float(monomial_integral(ka + kb, la + lb - 2))
        Q += C.T @ D @ C
    return Q


@dataclass
class ReferenceElement:
    """All reference-triangle operators for a fixed degree, built once."""

    degree: int
    nodes: np.ndarray = field(init=False)
    basis: Basis = field(init=False)
    mass: np.ndarray = field(init=False)
    mass_inv: np.ndarray = field(init=False)
    stiffness_r: np.ndarray = field(init=False)
    stiffness_s: np.ndarray = field(init=False)
    boundary: list = field(init=False)
    grad_gram: np.ndarray = field(init=False)
    edge_nodes: list = field(init=False)
    edge_quad_weights: np.ndarray = field(init=False)
    basis_integrals: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nodes = build_nodes(self.degree)
        self.basis = build_basis(self.degree, self.nodes)
        self.mass, self.stiffness_r, self.stiffness_s, self.boundary = build_gramians(self.basis)
        self.mass_inv = np.linalg.inv(self.mass)
        self.grad_gram = grad_gramian(self.basis)
        self.edge_nodes = edge_node_indices(self.degree)
        self.edge_quad_weights = edge_quadrature(self.degree)
        # exact integrals of the nodal basis functions; for a nodal basis
        # these are the only cubature weights exact on V
        ints = np.zeros(self.n_nodes)
        for j, (k, l) in enumerate(self.basis.exponents):
            ints += self.basis.coeffs[j] * float(monomial_integral(k, l))
        self.basis_integrals = ints

    @property
    def n_nodes(self):
        return (self.degree + 1) * (self.degree + 2) // 2

    def dump_csv(self, dirpath):
        """Debug dump of all matrices for external cross-checking."""
        os.makedirs(dirpath, exist_ok=True)
        mats = {
            "nodes": self.nodes,
            "mass": self.mass,
            "stiffness_r": self.stiffness_r,
            "stiffness_s": self.stiffness_s,
            "boundary_1": self.boundary[0],
            "boundary_2": self.boundary[1],
            "boundary_3": self.boundary[2],
            "grad_gram": self.grad_gram,
        }
        for name, mat in mats.items():
            np.savetxt(os.path.join(dirpath, f"{name}_p{self.degree}.csv"),
                       np.atleast_2d(mat), delimiter=",")
