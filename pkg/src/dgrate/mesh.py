"""Triangle-program mesh ingestion, connectivity and affine cell geometry.

Reads the ASCII .node/.ele(/.poly or .edge) formats produced by the
Triangle mesh generator.  Cells are reoriented counter-clockwise on load;
edge identity is the sorted vertex-index pair and edges are stored in
deterministic (sorted) order.  Boundary edges without an explicit marker
get marker 1.
"""

from dataclasses import dataclass, field

import numpy as np


class MeshError(ValueError):
    """Malformed mesh file or violated mesh invariant."""


def _data_lines(text, name):
    """Non-comment lines of a Triangle file with their 1-based line numbers."""
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    if not out:
        raise MeshError(f"{name}: file is empty")
    return out


def _parse_header(line, name, lineno, expect):
    parts = line.split()
    if len(parts) < expect:
        raise MeshError(f"{name}:{lineno}: malformed header {line!r}")
    try:
        return [int(float(p)) for p in parts]
    except ValueError as exc:
        raise MeshError(f"{name}:{lineno}: malformed header {line!r}") from exc


@dataclass
class Mesh:
    """Unstructured triangle mesh with edge connectivity.

    edge_cells[e] = (left cell, right cell) with right = -1 on the
    boundary; edge_local[e] gives the local edge index (0..2) of the edge
    within each adjacent cell.  boundary_marker is 0 on interior edges.
    """

    vertices: np.ndarray            # (V, 2)
    cells: np.ndarray               # (Z, 3) CCW
    edge_vertices: np.ndarray = field(default=None)   # (E, 2) sorted pairs
    edge_cells: np.ndarray = field(default=None)      # (E, 2)
    edge_local: np.ndarray = field(default=None)      # (E, 2)
    boundary_marker: np.ndarray = field(default=None)  # (E,)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_edges(self):
        return len(self.edge_vertices)

    def signed_areas(self):
        a = self.vertices[self.cells[:, 0]]
        b = self.vertices[self.cells[:, 1]]
        c = self.vertices[self.cells[:, 2]]
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                      - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def parse_node(text, name=".node"):
    lines = _data_lines(text, name)
    lineno, header = lines[0]
    n, dim, n_attr, n_marker = (_parse_header(header, name, lineno, 4) + [0, 0])[:4]
    if dim != 2:
        raise MeshError(f"{name}:{lineno}: expected dimension 2, got {dim}")
    if len(lines) - 1 < n:
        raise MeshError(f"{name}: header promises {n} points, found {len(lines) - 1}")
    ids = np.empty(n, dtype=int)
    pts = np.empty((n, 2))
    markers = np.zeros(n, dtype=int)
    for row, (lno, line) in enumerate(lines[1:n + 1]):
        parts = line.split()
        if len(parts) < 3 + n_attr:
            raise MeshError(f"{name}:{lno}: malformed point line {line!r}")
        ids[row] = int(parts[0])
        pts[row] = (float(parts[1]), float(parts[2]))
        if n_marker and len(parts) > 3 + n_attr:
            markers[row] = int(parts[3 + n_attr])
    base = ids.min()
    if base not in (0, 1) or not np.array_equal(np.sort(ids), np.arange(base, base + n)):
        raise MeshError(f"{name}: point indices are not consecutive 0- or 1-based")
    order = np.argsort(ids)
    return pts[order], markers[order], base


def parse_ele(text, n_points, base_hint, name=".ele"):
    lines = _data_lines(text, name)
    lineno, header = lines[0]
    n, nodes_per, _ = (_parse_header(header, name, lineno, 2) + [0])[:3]
    if nodes_per != 3:
        raise MeshError(f"{name}:{lineno}: expected 3 nodes per triangle, got {nodes_per}")
    if len(lines) - 1 < n:
        raise MeshError(f"{name}: header promises {n} triangles, found {len(lines) - 1}")
    cells = np.empty((n, 3), dtype=int)
    for row, (lno, line) in enumerate(lines[1:n + 1]):
        parts = line.split()
        if len(parts) < 4:
            raise MeshError(f"{name}:{lno}: malformed triangle line {line!r}")
        cells[row] = [int(parts[1]), int(parts[2]), int(parts[3])]
    base = base_hint if cells.min() >= base_hint else 0
    cells = cells - base
    if cells.min() < 0 or cells.max() >= n_points:
        bad = int(np.argmax((cells < 0) | (cells >= n_points)).item())
        raise MeshError(f"{name}: vertex index out of range in triangle {bad}")
    return cells


def parse_segments(text, base_hint, name=".poly"):
    """Boundary segments with markers from a .poly or .edge file."""
    lines = _data_lines(text, name)
    pos = 0
    if name.endswith(".poly"):
        lineno, header = lines[0]
        n_pts = _parse_header(header, name, lineno, 1)[0]
        pos = 1 + n_pts  # vertex block (usually empty, count 0)
    lineno, header = lines[pos]
    hdr = _parse_header(header, name, lineno, 1)
    n_seg = hdr[0]
    has_marker = len(hdr) > 1 and hdr[1] > 0
    segs = {}
    for lno, line in lines[pos + 1:pos + 1 + n_seg]:
        parts = line.split()
        if len(parts) < 3:
            raise MeshError(f"{name}:{lno}: malformed segment line {line!r}")
        a, b = int(parts[1]), int(parts[2])
        marker = int(parts[3]) if has_marker and len(parts) > 3 else 1
        segs[(min(a, b) - base_hint, max(a, b) - base_hint)] = marker
    return segs


def build_connectivity(mesh):
    """Populate the edge arrays of a mesh with valid CCW cells (in place)."""
    cells = mesh.cells
    # local edge m of a cell runs from vertex m to vertex (m+1) % 3
    pair_map = {}
    for z in range(len(cells)):
        for m in range(3):
            a, b = cells[z, m], cells[z, (m + 1) % 3]
            key = (min(a, b), max(a, b))
            adj = pair_map.setdefault(key, [])
            if len(adj) >= 2:
                raise MeshError(f"edge {key} shared by more than two cells (non-manifold)")
            adj.append((z, m))

    keys = sorted(pair_map)
    E = len(keys)
    mesh.edge_vertices = np.array(keys, dtype=int).reshape(E, 2)
    mesh.edge_cells = np.full((E, 2), -1, dtype=int)
    mesh.edge_local = np.full((E, 2), -1, dtype=int)
    mesh.boundary_marker = np.zeros(E, dtype=int)
    for e, key in enumerate(keys):
        for side, (z, m) in enumerate(pair_map[key]):
            mesh.edge_cells[e, side] = z
            mesh.edge_local[e, side] = m
    return mesh


def load_triangle_mesh(node_text, ele_text, poly_or_edge_text=None, seg_name=".poly"):
    """Build a Mesh from Triangle-format file contents."""
    vertices, _, base = parse_node(node_text)
    cells = parse_ele(ele_text, len(vertices), base)

    mesh = Mesh(vertices=vertices, cells=cells)
    areas = mesh.signed_areas()
    diam2 = np.max(np.sum((vertices[cells] - vertices[cells][:, [1, 2, 0]]) ** 2, axis=2), axis=1)
    if np.any(np.abs(areas) <= 0.5e-14 * diam2):
        z = int(np.argmin(np.abs(areas) / diam2))
        raise MeshError(f"degenerate (zero-area) triangle {z}: vertices {cells[z].tolist()}")
    flip = areas < 0.0
    cells[flip] = cells[flip][:, [0, 2, 1]]

    build_connectivity(mesh)

    boundary = mesh.edge_cells[:, 1] < 0
    mesh.boundary_marker[boundary] = 1
    if poly_or_edge_text is not None:
        segs = parse_segments(poly_or_edge_text, base, seg_name)
        for e in np.nonzero(boundary)[0]:
            key = (int(mesh.edge_vertices[e, 0]), int(mesh.edge_vertices[e, 1]))
            if key in segs:
                mesh.boundary_marker[e] = segs[key]
    return mesh


def load_mesh_files(basepath):
    """Load <base>.node and <base>.ele, plus <base>.poly or <base>.edge if present."""
    import os

    with open(basepath + ".node") as f:
        node_text = f.read()
    with open(basepath + ".ele") as f:
        ele_text = f.read()
    seg_text, seg_name = None, ".poly"
    for ext in (".poly", ".edge"):
        if os.path.exists(basepath + ext):
            with open(basepath + ext) as f:
                seg_text = f.read()
            seg_name = ext
            break
    return load_triangle_mesh(node_text, ele_text, seg_text, seg_name=seg_name)


def write_triangle_mesh(mesh, basepath):
    """Write .node/.ele/.poly files (1-based indices) for round-trip checks."""
    V, Z = mesh.n_vertices, mesh.n_cells
    with open(basepath + ".node", "w") as f:
        f.write(f"{V} 2 0 0\n")
        for i, (x, y) in enumerate(mesh.vertices, start=1):
            f.write(f"{i} {float(x)!r} {float(y)!r}\n")
    with open(basepath + ".ele", "w") as f:
        f.write(f"{Z} 3 0\n")
        for i, (a, b, c) in enumerate(mesh.cells, start=1):
            f.write(f"{i} {a + 1} {b + 1} {c + 1}\n")
    boundary = np.nonzero(mesh.edge_cells[:, 1] < 0)[0]
    with open(basepath + ".poly", "w") as f:
        f.write("0 2 0 1\n")
        f.write(f"{len(boundary)} 1\n")
        for i, e in enumerate(boundary, start=1):
            a, b = mesh.edge_vertices[e]
            f.write(f"{i} {a + 1} {b + 1} {mesh.boundary_marker[e]}\n")
        f.write("0\n")


@dataclass
class CellGeometry:
    jacobian: np.ndarray        # (2, 2)
    det_jacobian: float
    inv_jacobian: np.ndarray    # (2, 2)
    edge_lengths: np.ndarray    # (3,)
    outward_normals: np.ndarray  # (3, 2)
    inradius: float


def cell_geometry(mesh, cell):
    """Affine geometry of a single cell."""
    geo = all_cell_geometry(mesh)
    return CellGeometry(
        jacobian=geo["jacobian"][cell],
        det_jacobian=float(geo["det"][cell]),
        inv_jacobian=geo["inv_jacobian"][cell],
        edge_lengths=geo["edge_lengths"][cell],
        outward_normals=geo["normals"][cell],
        inradius=float(geo["inradius"][cell]),
    )


def all_cell_geometry(mesh):
    """Vectorized geometry of all cells as stacked arrays."""
    v = mesh.vertices[mesh.cells]  # (Z, 3, 2)
    jac = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=2)  # columns d/dr, d/ds
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    diam2 = np.max(np.sum((v - v[:, [1, 2, 0]]) ** 2, axis=2), axis=1)
    if np.any(det <= 1e-14 * diam2):
        raise MeshError(f"degenerate triangle {int(np.argmin(det / diam2))}")
    inv = np.empty_like(jac)
    inv[:, 0, 0] = jac[:, 1, 1] / det
    inv[:, 0, 1] = -jac[:, 0, 1] / det
    inv[:, 1, 0] = -jac[:, 1, 0] / det
    inv[:, 1, 1] = jac[:, 0, 0] / det

    tangents = v[:, [1, 2, 0]] - v  # local edge m: vertex m -> m+1
    lengths = np.linalg.norm(tangents, axis=2)
    normals = np.stack([tangents[..., 1], -tangents[..., 0]], axis=2) / lengths[..., None]
    area = 0.5 * det
    inradius = 2.0 * area / lengths.sum(axis=1)
    return {
        "jacobian": jac,
        "det": det,
        "inv_jacobian": inv,
        "edge_lengths": lengths,
        "normals": normals,
        "inradius": inradius,
        "area": area,
    }


def validate_mesh(mesh, strict=True):
    """Quality metrics and invariant checks.

    Returns a dict report; with strict=True any invariant violation raises
    MeshError after the report is assembled.
    """
    violations = []
    areas = mesh.signed_areas()
    if np.any(areas <= 0.0):
        violations.append(f"{int(np.sum(areas <= 0))} cells not counter-clockwise")

    v = mesh.vertices[mesh.cells]
    angles = np.empty((mesh.n_cells, 3))
    for k in range(3):
        e1 = v[:, (k + 1) % 3] - v[:, k]
        e2 = v[:, (k + 2) % 3] - v[:, k]
        cosang = np.einsum("ij,ij->i", e1, e2) / (
            np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1))
        angles[:, k] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))

    if mesh.edge_vertices is None:
        violations.append("connectivity not built")
        report = {"ok": not violations, "violations": violations}
    else:
        n_adj = np.sum(mesh.edge_cells >= 0, axis=1)
        if np.any((n_adj < 1) | (n_adj > 2)):
            violations.append("edge with invalid adjacency count")
        counts = np.zeros(mesh.n_cells, dtype=int)
        for side in range(2):
            sel = mesh.edge_cells[:, side]
            np.add.at(counts, sel[sel >= 0], 1)
        if np.any(counts != 3):
            violations.append("cell not adjacent to exactly 3 edges")
        boundary = mesh.edge_cells[:, 1] < 0
        if np.any(mesh.boundary_marker[boundary] == 0):
            violations.append("boundary edge without marker")

        geo = all_cell_geometry(mesh)
        report = {
            "n_vertices": mesh.n_vertices,
            "n_cells": mesh.n_cells,
            "n_edges": mesh.n_edges,
            "n_boundary_edges": int(np.sum(boundary)),
            "min_angle": float(angles.min()),
            "max_angle": float(angles.max()),
            "min_inradius": float(geo["inradius"].min()),
            "total_area": float(geo["area"].sum()),
            "violations": violations,
        }
        report["ok"] = not violations
    if strict and violations:
        raise MeshError("; ".join(violations))
    return report
