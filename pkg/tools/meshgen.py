"""Unstructured triangle mesh generation in Triangle's file formats.

Stand-in for the external Triangle program (not available in this
environment): jittered hex-lattice seeds inside a polygonal domain
(optionally with holes), Delaunay triangulation and Lloyd smoothing with
pinned boundary points, written out as .node/.ele/.poly files that
dgrate.mesh can load.

Boundary chains carry markers: the solver maps markers to boundary
condition types via its run configuration.
"""

import argparse
import os

import numpy as np
from scipy.spatial import Delaunay


def _resample_chain(points, h, closed=False):
    """Insert points along a polyline so segment lengths are <= h."""
    pts = [np.asarray(points[0], dtype=float)]
    seq = list(points[1:]) + ([points[0]] if closed else [])
    for q in seq:
        q = np.asarray(q, dtype=float)
        p = pts[-1]
        n = max(1, int(np.ceil(np.linalg.norm(q - p) / h)))
        for k in range(1, n + 1):
            pts.append(p + (q - p) * (k / n))
    if closed:
        pts.pop()
    return np.array(pts)


class Domain:
    """Polygonal domain with marked boundary chains and optional holes.

    chains: list of (points, marker, closed) tuples; the union of all
    chains must trace every boundary loop exactly once.  holes: list of
    closed polygons (points) excluded from the domain; their chains must
    also appear in `chains` with a marker.
    """

    def __init__(self, chains, holes=()):
        self.chains = chains
        self.holes = [np.asarray(hp, dtype=float) for hp in holes]

    def _loops(self):
        loops = []
        outer = []
        for pts, _, closed in self.chains:
            if closed:
                loops.append(np.asarray(pts, dtype=float))
            else:
                outer.extend(list(pts)[:-1] if outer else list(pts))
        if outer:
            loops.insert(0, np.asarray(outer, dtype=float))
        return loops

    def contains(self, xy):
        """Even-odd point-in-polygon over all loops (holes flip parity)."""
        xy = np.asarray(xy, dtype=float)
        inside = np.zeros(len(xy), dtype=bool)
        for loop in self._loops():
            x0, y0 = loop[:, 0], loop[:, 1]
            x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
            for (a, b, c, d) in zip(x0, y0, x1, y1):
                cross = ((b > xy[:, 1]) != (d > xy[:, 1])) & (
                    xy[:, 0] < (c - a) * (xy[:, 1] - b) / (d - b + 1e-300) + a)
                inside ^= cross
        return inside

    def boundary_distance(self, xy):
        """Distance from each point to the closest boundary segment."""
        xy = np.asarray(xy, dtype=float)
        best = np.full(len(xy), np.inf)
        for loop in self._loops():
            best = np.minimum(best, polyline_distance(xy, loop))
        return best


def polyline_distance(xy, loop):
    """Distance from each point in xy to a closed polygon's segments."""
    xy = np.asarray(xy, dtype=float)
    loop = np.asarray(loop, dtype=float)
    best = np.full(len(xy), np.inf)
    for p, q in zip(loop, np.roll(loop, -1, axis=0)):
        d = q - p
        L2 = d @ d
        t = np.clip(((xy - p) @ d) / (L2 + 1e-300), 0.0, 1.0)
        proj = p[None, :] + t[:, None] * d[None, :]
        best = np.minimum(best, np.linalg.norm(xy - proj, axis=1))
    return best


def generate(domain, h, seed=0, lloyd_iters=150, jitter=0.05, spacing=None):
    """Mesh a domain at target edge length h.

    spacing, if given, is a callable mapping (n, 2) points to local target
    edge lengths (graded meshes); the constant h is the default.  Returns
    (points, triangles, segment_markers) where segment_markers maps sorted
    boundary vertex pairs to their chain marker.
    """
    rng = np.random.default_rng(seed)
    if spacing is None:
        spacing = lambda xy: np.full(len(xy), h)

    # boundary points and marked segments
    bpts = []
    seg_marker = {}
    index_of = {}

    def add_point(p):
        key = (round(p[0], 12), round(p[1], 12))
        if key not in index_of:
            index_of[key] = len(bpts)
            bpts.append(np.asarray(p, dtype=float))
        return index_of[key]

    for pts, marker, closed in domain.chains:
        ring = list(pts) + ([pts[0]] if closed else [])
        hb = float(np.min(spacing(np.asarray(ring))))
        chain = _resample_chain(pts, hb, closed)
        ids = [add_point(p) for p in chain]
        pairs = list(zip(ids, ids[1:])) + ([(ids[-1], ids[0])] if closed else [])
        for a, b in pairs:
            seg_marker[(min(a, b), max(a, b))] = marker
    bpts = np.array(bpts)
    n_bnd = len(bpts)

    # jittered hex lattice candidates at the finest spacing, thinned to the
    # local density (generator density ~ spacing^-2)
    x0, y0 = bpts.min(axis=0)
    x1, y1 = bpts.max(axis=0)
    h_min = float(np.min(spacing(bpts)))
    dy = h_min * np.sqrt(3) / 2
    rows = []
    y = y0 + 0.5 * dy
    row = 0
    while y < y1:
        xs = np.arange(x0 + (0.25 + 0.5 * (row % 2)) * h_min, x1, h_min)
        rows.append(np.column_stack([xs, np.full_like(xs, y)]))
        y += dy
        row += 1
    seeds = np.vstack(rows)
    seeds = seeds + rng.uniform(-jitter * h_min, jitter * h_min, seeds.shape)
    ell = spacing(seeds)
    keep = rng.random(len(seeds)) < (h_min / ell) ** 2
    seeds = seeds[keep]
    ell = ell[keep]
    keep = domain.contains(seeds) & (domain.boundary_distance(seeds) > 0.55 * ell)
    pts = np.vstack([bpts, seeds[keep]])

    def triangulate(points):
        tri = Delaunay(points)
        cells = tri.simplices
        cent = points[cells].mean(axis=1)
        return cells[domain.contains(cent)]

    # density-weighted Lloyd iteration (weight spacing^-4 targets
    # generator density spacing^-2), boundary points pinned
    for _ in range(lloyd_iters):
        cells = triangulate(pts)
        cent = pts[cells].mean(axis=1)
        v = pts[cells]
        area = 0.5 * np.abs(
            (v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
            - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))
        weight = area * spacing(cent) ** -4
        acc = np.zeros_like(pts)
        wsum = np.zeros(len(pts))
        for k in range(3):
            np.add.at(acc, cells[:, k], weight[:, None] * cent)
            np.add.at(wsum, cells[:, k], weight)
        moved = acc[n_bnd:] / np.maximum(wsum[n_bnd:], 1e-300)[:, None]
        ok = wsum[n_bnd:] > 0
        pts[n_bnd:][ok] = moved[ok]

    # drop interior points that drifted too close to the boundary during
    # smoothing (they break conformity near thin features)
    close = domain.boundary_distance(pts[n_bnd:]) < 0.40 * spacing(pts[n_bnd:])
    if close.any():
        pts = np.vstack([bpts, pts[n_bnd:][~close]])

    cells = triangulate(pts)

    # drop stranded points (never happens for sane parameters, but keep ids tight)
    used = np.zeros(len(pts), dtype=bool)
    used[cells.ravel()] = True
    if not used[:n_bnd].all():
        raise RuntimeError("boundary point unused; decrease h or jitter")
    remap = -np.ones(len(pts), dtype=int)
    remap[used] = np.arange(used.sum())
    pts = pts[used]
    cells = remap[cells]

    # conformity: every marked segment must be a triangulation edge
    edge_set = set()
    for tri in cells:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_set.add((min(a, b), max(a, b)))
    missing = [sm for sm in seg_marker if sm not in edge_set]
    if missing:
        where = ", ".join(
            f"({pts[remap[a]][0]:.4f},{pts[remap[a]][1]:.4f})-({pts[remap[b]][0]:.4f},{pts[remap[b]][1]:.4f})"
            for a, b in missing[:5])
        raise RuntimeError(
            f"{len(missing)} boundary segments not conforming (near {where}); decrease h")

    return pts, cells, seg_marker


def generate_point_symmetric(domain, h, seed=0, lloyd_iters=150, jitter=0.05):
    """Mesh an origin-symmetric domain with a 180-degree symmetric grid.

    Seeds are generated in the upper half plane and mirrored through the
    origin; Lloyd updates are re-symmetrized every iteration.  For problems
    with central symmetry this removes the grid as a symmetry-breaking
    source.  Boundary chains must already trace a symmetric polygon.
    """
    rng = np.random.default_rng(seed)

    bpts = []
    seg_marker = {}
    index_of = {}

    def add_point(p):
        key = (round(p[0], 12), round(p[1], 12))
        if key not in index_of:
            index_of[key] = len(bpts)
            bpts.append(np.asarray(p, dtype=float))
        return index_of[key]

    for pts_, marker, closed in domain.chains:
        chain = _resample_chain(pts_, h, closed)
        ids = [add_point(p) for p in chain]
        pairs = list(zip(ids, ids[1:])) + ([(ids[-1], ids[0])] if closed else [])
        for a, b in pairs:
            seg_marker[(min(a, b), max(a, b))] = marker
    bpts = np.array(bpts)
    n_bnd = len(bpts)
    keys = {(round(x, 9), round(y, 9)) for x, y in bpts}
    if any((round(-x, 9), round(-y, 9)) not in keys for x, y in bpts):
        raise RuntimeError("boundary point set is not origin symmetric")

    # hex lattice seeds in the upper half plane, mirrored through the origin
    x0, y0 = bpts.min(axis=0)
    x1, y1 = bpts.max(axis=0)
    dy = h * np.sqrt(3) / 2
    rows = []
    y = 0.5 * dy
    row = 0
    while y < y1:
        xs = np.arange(x0 + (0.25 + 0.5 * (row % 2)) * h, x1, h)
        rows.append(np.column_stack([xs, np.full_like(xs, y)]))
        y += dy
        row += 1
    half = np.vstack(rows)
    half = half + rng.uniform(-jitter * h, jitter * h, half.shape)
    keep = (domain.contains(half) & (domain.boundary_distance(half) > 0.55 * h)
            & (half[:, 1] > 0.3 * h))
    half = half[keep]
    n_half = len(half)
    pts = np.vstack([bpts, half, -half])

    def triangulate(points):
        tri = Delaunay(points)
        cells = tri.simplices
        cent = points[cells].mean(axis=1)
        return cells[domain.contains(cent)]

    for _ in range(lloyd_iters):
        cells = triangulate(pts)
        cent = pts[cells].mean(axis=1)
        v = pts[cells]
        area = 0.5 * np.abs(
            (v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
            - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))
        acc = np.zeros_like(pts)
        wsum = np.zeros(len(pts))
        for k in range(3):
            np.add.at(acc, cells[:, k], area[:, None] * cent)
            np.add.at(wsum, cells[:, k], area)
        moved = acc[n_bnd:] / np.maximum(wsum[n_bnd:], 1e-300)[:, None]
        ok = wsum[n_bnd:] > 0
        new = pts[n_bnd:].copy()
        new[ok] = moved[ok]
        # re-symmetrize: average each point with the mirror of its partner
        base = 0.5 * (new[:n_half] - new[n_half:])
        pts[n_bnd:n_bnd + n_half] = base
        pts[n_bnd + n_half:] = -base

    cells = triangulate(pts)
    edge_set = set()
    for tri in cells:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_set.add((min(a, b), max(a, b)))
    missing = [sm for sm in seg_marker if sm not in edge_set]
    if missing:
        raise RuntimeError(f"{len(missing)} boundary segments not conforming")
    return pts, cells, seg_marker


def min_angle(pts, cells):
    v = pts[cells]
    ang = []
    for k in range(3):
        e1 = v[:, (k + 1) % 3] - v[:, k]
        e2 = v[:, (k + 2) % 3] - v[:, k]
        c = np.einsum("ij,ij->i", e1, e2) / (
            np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1))
        ang.append(np.degrees(np.arccos(np.clip(c, -1, 1))))
    return float(np.min(ang))


def write_triangle_files(basepath, pts, cells, seg_marker):
    """Write .node/.ele/.poly (1-based indices)."""
    os.makedirs(os.path.dirname(basepath) or ".", exist_ok=True)
    with open(basepath + ".node", "w") as f:
        f.write(f"{len(pts)} 2 0 0\n")
        for i, (x, y) in enumerate(pts, start=1):
            f.write(f"{i} {float(x)!r} {float(y)!r}\n")
    with open(basepath + ".ele", "w") as f:
        f.write(f"{len(cells)} 3 0\n")
        for i, (a, b, c) in enumerate(cells, start=1):
            f.write(f"{i} {a + 1} {b + 1} {c + 1}\n")
    with open(basepath + ".poly", "w") as f:
        f.write("0 2 0 1\n")
        f.write(f"{len(seg_marker)} 1\n")
        for i, ((a, b), m) in enumerate(sorted(seg_marker.items()), start=1):
            f.write(f"{i} {a + 1} {b + 1} {m}\n")
        f.write("0\n")


# -- standard domains --------------------------------------------------------

def rectangle(x0, x1, y0, y1, marker=1):
    ring = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    return Domain([(ring, marker, True)])


def forward_facing_step():
    """Channel [0,3]x[0,1] with a step of height 0.2 at x = 0.6.

    Markers: 1 = walls (top, bottom, step), 2 = inflow, 3 = outflow.
    """
    walls_bottom = [(0.0, 0.0), (0.6, 0.0), (0.6, 0.2), (3.0, 0.2)]
    outflow = [(3.0, 0.2), (3.0, 1.0)]
    wall_top = [(3.0, 1.0), (0.0, 1.0)]
    inflow = [(0.0, 1.0), (0.0, 0.0)]
    return Domain([
        (walls_bottom, 1, False),
        (outflow, 3, False),
        (wall_top, 1, False),
        (inflow, 2, False),
    ])


def naca0012(spacing_max=0.02, spacing_min=0.006, closed_te=True):
    """NACA 0012 profile polygon, chord [0, 1], counter-clockwise from TE.

    Points are placed by arc length at roughly spacing_max, refined toward
    the nose (high curvature) down to spacing_min.
    """
    coef = np.array([0.2969, -0.1260, -0.3516, 0.2843, -0.1036 if closed_te else -0.1015])
    x = 0.5 * (1 - np.cos(np.linspace(0.0, np.pi, 4001)))  # fine sampling
    yt = 0.6 * (coef[0] * np.sqrt(x) + coef[1] * x + coef[2] * x ** 2
                + coef[3] * x ** 3 + coef[4] * x ** 4)
    seg = np.hypot(np.diff(x), np.diff(yt))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    # walk the upper surface nose -> TE with a curvature-graded step
    picks = []
    t = 0.0
    while True:
        xh = np.interp(t, s, x)
        step = np.clip(spacing_max * np.sqrt((xh + 0.005) / 0.1),
                       spacing_min, spacing_max)
        t += step
        if t >= s[-1] - 0.5 * step:
            break
        picks.append(t)
    ts = np.array(picks)
    upper = np.column_stack([np.interp(ts, s, x), np.interp(ts, s, yt)])
    lower = upper * np.array([1.0, -1.0])
    return np.vstack([[1.0, 0.0], upper[::-1], [0.0, 0.0], lower])


def naca_domain():
    """Rectangle [-3,3]^2 (marker 2) around a NACA 0012 airfoil (marker 1)."""
    outer = [(-3.0, -3.0), (3.0, -3.0), (3.0, 3.0), (-3.0, 3.0)]
    foil = naca0012()[::-1]  # clockwise: hole boundary
    return Domain([(list(outer), 2, True), (foil.tolist(), 1, True)],
                  holes=[foil])


def naca_spacing(h_far=0.126, h_foil=0.018, grade=0.225):
    """Graded spacing field: fine at the airfoil, coarsening outward."""
    foil = naca0012()

    def spacing(xy):
        d = polyline_distance(np.asarray(xy, dtype=float), foil)
        return np.clip(h_foil + grade * d, h_foil, h_far)

    return spacing


STANDARD_MESHES = {
    # name: (domain factory, h, spacing field, seed)
    "acc1600": (lambda: rectangle(-1.5, 1.5, -0.5, 0.5), 0.0660, None, 1),
    "acc4800": (lambda: rectangle(-1.5, 1.5, -0.5, 0.5), 0.0381, None, 2),
    "acc16000": (lambda: rectangle(-1.5, 1.5, -0.5, 0.5), 0.0209, None, 3),
    "sedov5000": (lambda: rectangle(-0.6, 0.6, -0.6, 0.6), 0.0258, "symmetric", 4),
    "ffs8000": (forward_facing_step, 0.0270, None, 5),
    "naca5844": (naca_domain, 0.126, naca_spacing(), 6),
}


def make_standard_mesh(name, out_dir="meshes"):
    factory, h, spacing, seed = STANDARD_MESHES[name]
    domain = factory()
    if spacing == "symmetric":
        pts, cells, segs = generate_point_symmetric(domain, h, seed=seed)
    else:
        pts, cells, segs = generate(domain, h, seed=seed, spacing=spacing)
    base = os.path.join(out_dir, name)
    write_triangle_files(base, pts, cells, segs)
    return base, len(cells), min_angle(pts, cells)


def main():
    parser = argparse.ArgumentParser(description="generate the standard mesh set")
    parser.add_argument("names", nargs="*", default=list(STANDARD_MESHES),
                        help="mesh names (default: all)")
    parser.add_argument("-o", "--out-dir", default="meshes")
    args = parser.parse_args()
    for name in args.names or list(STANDARD_MESHES):
        base, n, ang = make_standard_mesh(name, args.out_dir)
        print(f"{name}: {n} triangles, min angle {ang:.1f} deg -> {base}.node/.ele/.poly")


if __name__ == "__main__":
    main()
