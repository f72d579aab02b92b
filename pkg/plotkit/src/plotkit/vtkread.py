"""Reader for legacy ASCII VTK UNSTRUCTURED_GRID files with triangle cells.

Covers exactly the subset the solver writes: 3D points (z ignored), CELLS
of triangles (type 5) and POINT_DATA SCALARS blocks.  Values are parsed
with float(), so repr-written doubles round-trip bit-exactly.
"""

from dataclasses import dataclass, field

import numpy as np


class VTKParseError(ValueError):
    pass


@dataclass
class Snapshot:
    points: np.ndarray              # (P, 2)
    triangles: np.ndarray           # (T, 3) int
    scalars: dict = field(default_factory=dict)   # name -> (P,)

    def field_named(self, name):
        if name not in self.scalars:
            raise VTKParseError(
                f"no point field {name!r}; available: {sorted(self.scalars)}")
        return self.scalars[name]


def read_vtk(path):
    with open(path) as f:
        lines = [ln.strip() for ln in f]
    lines = [ln for ln in lines if ln]
    i = 0

    def expect(prefix):
        nonlocal i
        while i < len(lines) and not lines[i].upper().startswith(prefix):
            i += 1
        if i == len(lines):
            raise VTKParseError(f"missing {prefix} section")
        header = lines[i]
        i += 1
        return header

    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise VTKParseError("not a legacy VTK file")
    expect("ASCII")
    expect("DATASET UNSTRUCTURED_GRID")

    header = expect("POINTS")
    n_pts = int(header.split()[1])
    vals = []
    while len(vals) < 3 * n_pts:
        vals.extend(float(tok) for tok in lines[i].split())
        i += 1
    points = np.array(vals).reshape(n_pts, 3)[:, :2]

    header = expect("CELLS")
    n_cells = int(header.split()[1])
    tris = []
    for _ in range(n_cells):
        row = lines[i].split()
        i += 1
        if row[0] != "3":
            raise VTKParseError(f"non-triangle cell with {row[0]} points")
        tris.append([int(v) for v in row[1:4]])
    triangles = np.array(tris, dtype=int)

    header = expect("CELL_TYPES")
    n_types = int(header.split()[1])
    seen = 0
    while seen < n_types:
        toks = lines[i].split()
        if any(tok != "5" for tok in toks):
            raise VTKParseError("cell type other than triangle (5)")
        seen += len(toks)
        i += 1

    scalars = {}
    header = expect("POINT_DATA")
    n_data = int(header.split()[1])
    while i < len(lines):
        if not lines[i].upper().startswith("SCALARS"):
            i += 1
            continue
        name = lines[i].split()[1]
        i += 1
        if lines[i].upper().startswith("LOOKUP_TABLE"):
            i += 1
        vals = []
        while len(vals) < n_data:
            vals.extend(float(tok) for tok in lines[i].split())
            i += 1
        scalars[name] = np.array(vals)
    if not scalars:
        raise VTKParseError("no SCALARS blocks in POINT_DATA")
    return Snapshot(points=points, triangles=triangles, scalars=scalars)
