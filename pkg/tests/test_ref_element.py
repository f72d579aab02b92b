"""Reference-element operators against an independent symbolic oracle."""

import numpy as np
import pytest
import sympy as sp

from dgrate.ref_element import (
    EDGE_VERTS,
    REF_VERTICES,
    ReferenceElement,
    build_nodes,
    edge_node_indices,
    monomial_exponents,
    monomial_integral,
)

X, Y, T = sp.symbols("x y t")


_BASIS_CACHE = {}


def sympy_basis(element):
    """Nodal basis as sympy polynomials, built from scratch via solve."""
    if element.degree in _BASIS_CACHE:
        return _BASIS_CACHE[element.degree]
    exps = monomial_exponents(element.degree)
    monos = [X ** k * Y ** l for k, l in exps]
    nodes = [(sp.nsimplify(nx, rational=False), sp.nsimplify(ny, rational=False))
             for nx, ny in element.nodes]
    V = sp.Matrix([[m.subs({X: nx, Y: ny}) for m in monos] for nx, ny in nodes])
    C = V.inv()
    phis = [sum(C[j, i] * monos[j] for j in range(len(monos)))
            for i in range(len(monos))]
    _BASIS_CACHE[element.degree] = phis
    return phis


def tri_integrate(expr):
    """Exact integral over the reference triangle (0,0),(1,0),(0,1)."""
    return sp.integrate(sp.integrate(expr, (Y, 0, 1 - X)), (X, 0, 1))


class TestNodes:
    def test_p1_nodes_are_vertices(self):
        assert np.allclose(build_nodes(1), REF_VERTICES)

    def test_p3_count_and_membership(self):
        nodes = build_nodes(3)
        assert nodes.shape == (10, 2)
        assert np.allclose(nodes[-1], [1 / 3, 1 / 3])
        # edge nodes lie on their edges
        for m, idx in enumerate(edge_node_indices(3)):
            a, b = REF_VERTICES[list(EDGE_VERTS[m])]
            for i in idx:
                p = nodes[i]
                cross = (b - a)[0] * (p - a)[1] - (b - a)[1] * (p - a)[0]
                assert abs(cross) < 1e-14

    def test_p3_interior_gl_spacing(self):
        nodes = build_nodes(3)
        # interior Gauss-Lobatto points of the 4-point rule on [0,1]
        ts = np.sort([nodes[3][0], nodes[4][0]])
        assert np.allclose(ts, [0.5 * (1 - 1 / np.sqrt(5)), 0.5 * (1 + 1 / np.sqrt(5))])

    def test_unsupported_degree(self):
        with pytest.raises(ValueError):
            build_nodes(2)


class TestMonomialIntegral:
    def test_against_sympy(self):
        for a in range(7):
            for b in range(7):
                want = tri_integrate(X ** a * Y ** b)
                assert monomial_integral(a, b) == sp.Rational(want)


@pytest.mark.parametrize("degree", [1, 3])
class TestGramians:
    def test_mass_matches_symbolic(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        phis = sympy_basis(el)
        for i in range(el.n_nodes):
            for j in range(i, el.n_nodes):
                want = float(tri_integrate(phis[i] * phis[j]))
                assert el.mass[i, j] == pytest.approx(want, abs=1e-13)

    def test_stiffness_matches_symbolic(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        phis = sympy_basis(el)
        for i in range(el.n_nodes):
            for j in range(el.n_nodes):
                assert el.stiffness_r[i, j] == pytest.approx(
                    float(tri_integrate(sp.diff(phis[i], X) * phis[j])), abs=1e-13)
                assert el.stiffness_s[i, j] == pytest.approx(
                    float(tri_integrate(sp.diff(phis[i], Y) * phis[j])), abs=1e-13)

    def test_boundary_matches_symbolic(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        phis = sympy_basis(el)
        for m, (s, e) in enumerate(EDGE_VERTS):
            a, b = REF_VERTICES[s], REF_VERTICES[e]
            sub = {X: a[0] + T * (b[0] - a[0]), Y: a[1] + T * (b[1] - a[1])}
            length = float(np.linalg.norm(b - a))
            for i in range(el.n_nodes):
                for j in range(i, el.n_nodes):
                    want = float(sp.integrate(
                        (phis[i] * phis[j]).subs(sub), (T, 0, 1))) * length
                    assert el.boundary[m][i, j] == pytest.approx(want, abs=1e-13)

    def test_grad_gramian_matches_symbolic(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        phis = sympy_basis(el)
        for i in range(el.n_nodes):
            for j in range(i, el.n_nodes):
                want = float(tri_integrate(
                    sp.diff(phis[i], X) * sp.diff(phis[j], X)
                    + sp.diff(phis[i], Y) * sp.diff(phis[j], Y)))
                assert el.grad_gram[i, j] == pytest.approx(want, abs=1e-12)

    def test_symmetries(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        assert np.allclose(el.mass, el.mass.T, atol=1e-15)
        assert np.allclose(el.grad_gram, el.grad_gram.T, atol=1e-13)
        for B in el.boundary:
            assert np.allclose(B, B.T, atol=1e-15)

    def test_mass_total_is_triangle_area(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        assert el.mass.sum() == pytest.approx(0.5, abs=1e-14)

    def test_basis_integrals(self, degree, elem1, elem3):
        el = {1: elem1, 3: elem3}[degree]
        phis = sympy_basis(el)
        for i, phi in enumerate(phis):
            assert el.basis_integrals[i] == pytest.approx(
                float(tri_integrate(phi)), abs=1e-14)


class TestBasisProperties:
    def test_kronecker_property(self, elem):
        vals = elem.basis.eval_at(elem.nodes)
        assert np.allclose(vals, np.eye(elem.n_nodes), atol=1e-12)

    def test_partition_of_unity(self, elem, rng):
        pts = rng.random((50, 2)) * [1.0, 1.0]
        pts[:, 1] *= 1.0 - pts[:, 0]
        assert np.allclose(elem.basis.eval_at(pts).sum(axis=1), 1.0, atol=1e-12)

    def test_gradient_consistency(self, elem, rng):
        # finite differences on random interior points
        pts = 0.1 + 0.3 * rng.random((20, 2))
        gx, gy = elem.basis.eval_grad_at(pts)
        h = 1e-6
        fx = (elem.basis.eval_at(pts + [h, 0]) - elem.basis.eval_at(pts - [h, 0])) / (2 * h)
        fy = (elem.basis.eval_at(pts + [0, h]) - elem.basis.eval_at(pts - [0, h])) / (2 * h)
        assert np.allclose(gx, fx, atol=1e-8)
        assert np.allclose(gy, fy, atol=1e-8)

    def test_degenerate_nodes_rejected(self):
        from dgrate.ref_element import build_basis
        nodes = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]])  # collinear
        with pytest.raises(ValueError):
            build_basis(1, nodes)
