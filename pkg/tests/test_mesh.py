"""Mesh parsing, connectivity and geometry."""

import numpy as np
import pytest

from dgrate.mesh import (
    MeshError,
    Mesh,
    all_cell_geometry,
    build_connectivity,
    cell_geometry,
    load_mesh_files,
    load_triangle_mesh,
    parse_node,
    parse_segments,
    validate_mesh,
    write_triangle_mesh,
)

# two triangles forming the unit square, 1-based indices, with comments
NODE_TEXT = """# unit square
4 2 0 1
1 0.0 0.0 1
2 1.0 0.0 1
3 1.0 1.0 1
4 0.0 1.0 1
"""
ELE_TEXT = """2 3 0
1 1 2 3
2 1 3 4
"""
POLY_TEXT = """0 2 0 1
4 1
1 1 2 10
2 2 3 11
3 3 4 12
4 4 1 13
0
"""


def square_mesh():
    return load_triangle_mesh(NODE_TEXT, ELE_TEXT, POLY_TEXT)


class TestParsing:
    def test_basic_load(self):
        m = square_mesh()
        assert m.n_vertices == 4
        assert m.n_cells == 2
        assert m.n_edges == 5
        assert np.all(m.signed_areas() > 0)

    def test_zero_based_indices(self):
        node0 = "3 2 0 0\n0 0.0 0.0\n1 1.0 0.0\n2 0.0 1.0\n"
        ele0 = "1 3 0\n0 0 1 2\n"
        m = load_triangle_mesh(node0, ele0)
        assert m.n_cells == 1
        assert np.array_equal(np.sort(m.cells[0]), [0, 1, 2])

    def test_clockwise_cells_reoriented(self):
        ele_cw = "2 3 0\n1 1 3 2\n2 1 4 3\n"
        m = load_triangle_mesh(NODE_TEXT, ele_cw, POLY_TEXT)
        assert np.all(m.signed_areas() > 0)

    def test_markers_applied(self):
        m = square_mesh()
        boundary = m.edge_cells[:, 1] < 0
        assert sorted(m.boundary_marker[boundary].tolist()) == [10, 11, 12, 13]
        assert np.all(m.boundary_marker[~boundary] == 0)

    def test_default_marker_without_poly(self):
        m = load_triangle_mesh(NODE_TEXT, ELE_TEXT)
        boundary = m.edge_cells[:, 1] < 0
        assert np.all(m.boundary_marker[boundary] == 1)

    def test_edge_file_segments(self):
        edge_text = "4 1\n1 1 2 10\n2 2 3 11\n3 3 4 12\n4 4 1 13\n"
        segs = parse_segments(edge_text, 1, name=".edge")
        assert segs[(0, 1)] == 10
        assert segs[(2, 3)] == 12

    def test_empty_file_rejected(self):
        with pytest.raises(MeshError, match="empty"):
            parse_node("# only a comment\n")

    def test_wrong_dimension_rejected(self):
        with pytest.raises(MeshError, match="dimension"):
            parse_node("3 3 0 0\n1 0 0 0\n2 1 0 0\n3 0 1 0\n")

    def test_short_file_rejected(self):
        with pytest.raises(MeshError, match="promises"):
            parse_node("5 2 0 0\n1 0.0 0.0\n")

    def test_bad_point_line_reports_lineno(self):
        with pytest.raises(MeshError, match=":3:"):
            parse_node("2 2 0 0\n1 0.0 0.0\n2 1.0\n")

    def test_out_of_range_vertex_rejected(self):
        bad_ele = "1 3 0\n1 1 2 9\n"
        with pytest.raises(MeshError, match="out of range"):
            load_triangle_mesh(NODE_TEXT, bad_ele)

    def test_degenerate_triangle_rejected(self):
        node = "3 2 0 0\n1 0.0 0.0\n2 1.0 0.0\n3 2.0 0.0\n"
        ele = "1 3 0\n1 1 2 3\n"
        with pytest.raises(MeshError, match="degenerate"):
            load_triangle_mesh(node, ele)

    def test_nonmanifold_rejected(self):
        node = "5 2 0 0\n1 0.0 0.0\n2 1.0 0.0\n3 0.0 1.0\n4 0.0 -1.0\n5 -1.0 0.5\n"
        ele = "3 3 0\n1 1 2 3\n2 1 2 4\n3 1 2 5\n"
        with pytest.raises(MeshError, match="non-manifold"):
            load_triangle_mesh(node, ele)


class TestConnectivity:
    def test_interior_edge_has_two_cells(self):
        m = square_mesh()
        interior = m.edge_cells[:, 1] >= 0
        assert interior.sum() == 1
        e = np.nonzero(interior)[0][0]
        assert sorted(m.edge_vertices[e].tolist()) == [0, 2]  # the diagonal

    def test_local_edges_match_vertices(self):
        m = square_mesh()
        for e in range(m.n_edges):
            for side in range(2):
                z, loc = m.edge_cells[e, side], m.edge_local[e, side]
                if z < 0:
                    continue
                a, b = m.cells[z, loc], m.cells[z, (loc + 1) % 3]
                assert sorted((a, b)) == m.edge_vertices[e].tolist()

    def test_euler_formula(self):
        # V - E + F = 1 for a simply connected planar triangulation
        m = square_mesh()
        assert m.n_vertices - m.n_edges + m.n_cells == 1


class TestGeometry:
    def test_affine_map_corners(self):
        m = square_mesh()
        geo = cell_geometry(m, 0)
        v = m.vertices[m.cells[0]]
        # T(r,s) = v0 + J (r,s): check the two remaining corners
        assert np.allclose(v[1], v[0] + geo.jacobian @ [1, 0], atol=1e-14)
        assert np.allclose(v[2], v[0] + geo.jacobian @ [0, 1], atol=1e-14)

    def test_det_is_twice_area(self):
        m = square_mesh()
        geo = all_cell_geometry(m)
        assert np.allclose(geo["det"], 2 * m.signed_areas(), atol=1e-14)

    def test_inverse_jacobian(self):
        m = square_mesh()
        geo = all_cell_geometry(m)
        for z in range(m.n_cells):
            assert np.allclose(geo["jacobian"][z] @ geo["inv_jacobian"][z],
                               np.eye(2), atol=1e-14)

    def test_normals_outward_unit(self):
        m = square_mesh()
        geo = all_cell_geometry(m)
        v = m.vertices[m.cells]
        centroids = v.mean(axis=1)
        for z in range(m.n_cells):
            for loc in range(3):
                n = geo["normals"][z, loc]
                assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-14)
                midpoint = 0.5 * (v[z, loc] + v[z, (loc + 1) % 3])
                assert n @ (midpoint - centroids[z]) > 0

    def test_inradius_unit_right_triangle(self):
        m = square_mesh()
        geo = cell_geometry(m, 0)
        # right triangle with legs 1,1: r = (a + b - c)/2
        assert geo.inradius == pytest.approx((2 - np.sqrt(2)) / 2, rel=1e-12)


class TestValidation:
    def test_report_fields(self):
        rep = validate_mesh(square_mesh())
        assert rep["ok"]
        assert rep["n_boundary_edges"] == 4
        assert rep["total_area"] == pytest.approx(1.0, rel=1e-13)
        assert rep["min_angle"] == pytest.approx(45.0, abs=1e-10)
        assert rep["max_angle"] == pytest.approx(90.0, abs=1e-10)

    def test_strict_raises_on_violation(self):
        m = square_mesh()
        m.boundary_marker[:] = 0
        with pytest.raises(MeshError, match="marker"):
            validate_mesh(m)
        rep = validate_mesh(m, strict=False)
        assert not rep["ok"]


class TestRoundTrip:
    def test_write_and_reload(self, tmp_path):
        m = square_mesh()
        base = str(tmp_path / "rt")
        write_triangle_mesh(m, base)
        m2 = load_mesh_files(base)
        assert np.array_equal(m2.vertices, m.vertices)
        assert np.array_equal(m2.cells, m.cells)
        assert np.array_equal(m2.boundary_marker, m.boundary_marker)

    def test_generated_mesh_loads(self):
        m = load_mesh_files("meshes/acc1600")
        rep = validate_mesh(m)
        assert rep["ok"]
        assert rep["total_area"] == pytest.approx(3.0, rel=1e-10)
