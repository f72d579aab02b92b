"""Test-case initial conditions, run configuration and the simulation driver."""

import csv
import os
from dataclasses import dataclass, field as dcfield

import numpy as np

from dgrate import euler
from dgrate.filters import build_filter_generator, pocs_cubature
from dgrate.mesh import all_cell_geometry, load_mesh_files, validate_mesh
from dgrate.quadrature import l2_error_density
from dgrate.ref_element import ReferenceElement
from dgrate.solver import BoundaryCondition, DGOperator
from dgrate.timestep import compute_dt, ssprk33_step
from dgrate.vtkout import write_vtk

ENTROPY_RATE_TOL = 1e-8

DIAG_COLUMNS = ["t", "mass", "mom_x", "mom_y", "energy", "entropy",
                "lambda_ed_sum", "lambda_er_sum", "min_rho", "min_p",
                "sigma_total", "entropy_rate", "boundary_entropy_flux"]


# -- initial conditions --------------------------------------------------

def bump(r):
    """Compactly supported C-infinity bump, 1 at r=0, 0 for r >= 1."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def accuracy_density(x, y, t=0.0):
    """Density of the translating-bump accuracy test (exact for all t)."""
    r = 3.0 * np.hypot(x + 1.0 - t, y)
    return bump(r) ** 6 + 1.0


def node_positions(mesh, element):
    """Physical coordinates of all element nodes, shape (Z, N, 2)."""
    v0 = mesh.vertices[mesh.cells[:, 0]]
    v1 = mesh.vertices[mesh.cells[:, 1]]
    v2 = mesh.vertices[mesh.cells[:, 2]]
    r = element.nodes[:, 0]
    s = element.nodes[:, 1]
    return (v0[:, None, :]
            + r[None, :, None] * (v1 - v0)[:, None, :]
            + s[None, :, None] * (v2 - v0)[:, None, :])


def naca_free_stream(gamma=euler.GAMMA_DEFAULT, mach=0.8, alpha_deg=1.25):
    """Free-stream primitive state with unit sound speed."""
    alpha = np.radians(alpha_deg)
    # rho = gamma, p = 1 gives c = 1, so |v| = mach
    return np.array([gamma, mach * np.cos(alpha), mach * np.sin(alpha), 1.0])


def _state_param(value):
    """Primitive 4-state from a list or a whitespace-separated string."""
    if isinstance(value, str):
        value = value.split()
    return np.asarray([float(v) for v in value])


def make_initial_condition(case, mesh, element, gamma=euler.GAMMA_DEFAULT, params=None):
    """Nodal interpolation of the case's exact initial condition."""
    params = params or {}
    xy = node_positions(mesh, element)
    x, y = xy[..., 0], xy[..., 1]
    q = np.empty(xy.shape[:-1] + (4,))
    if case == "accuracy":
        q[..., 0] = accuracy_density(x, y)
        q[..., 1] = 1.0
        q[..., 2] = 0.0
        q[..., 3] = 1.0
    elif case == "sedov":
        r = float(params.get("radius", 0.08))
        inside = np.hypot(x, y) <= r
        q[..., 0] = np.where(inside, 1.0, 0.125)
        q[..., 1] = 0.0
        q[..., 2] = 0.0
        q[..., 3] = np.where(inside, 1.0, 0.1)
    elif case == "ffs":
        q[..., 0] = 7.0 / 5.0
        q[..., 1] = 3.0
        q[..., 2] = 0.0
        q[..., 3] = 1.0
    elif case == "naca":
        fs = naca_free_stream(gamma, float(params.get("mach", 0.8)),
                              float(params.get("alpha_deg", 1.25)))
        q[...] = fs
    elif case == "freestream":
        q[...] = _state_param(params["state"])
    else:
        raise ValueError(f"unknown case {case!r}")
    return euler.prim_to_cons(q, gamma)


def default_bc_map(case, gamma=euler.GAMMA_DEFAULT, params=None):
    """Marker -> BC mapping used by the standard test cases.

    Markers follow the bundled mesh files: 1 = solid wall / generic,
    2 = inflow / far field, 3 = outflow.
    """
    params = params or {}
    if case == "accuracy":
        far = euler.prim_to_cons(np.array([1.0, 1.0, 0.0, 1.0]), gamma)
        return {1: BoundaryCondition("coupling_fixed", far)}
    if case == "sedov":
        return {1: BoundaryCondition("reflective")}
    if case == "ffs":
        inflow = euler.prim_to_cons(np.array([1.4, 3.0, 0.0, 1.0]), gamma)
        return {1: BoundaryCondition("reflective"),
                2: BoundaryCondition("coupling_fixed", inflow),
                3: BoundaryCondition("coupling_copy")}
    if case == "naca":
        fs = euler.prim_to_cons(naca_free_stream(
            gamma, float(params.get("mach", 0.8)), float(params.get("alpha_deg", 1.25))), gamma)
        return {1: BoundaryCondition("reflective"),
                2: BoundaryCondition("coupling_fixed", fs)}
    if case == "freestream":
        state = euler.prim_to_cons(_state_param(params["state"]), gamma)
        return {1: BoundaryCondition("coupling_fixed", state),
                2: BoundaryCondition("coupling_fixed", state),
                3: BoundaryCondition("coupling_fixed", state)}
    raise ValueError(f"unknown case {case!r}")


# -- configuration ---------------------------------------------------------

@dataclass
class RunConfig:
    case: str
    mesh: str                      # base path of .node/.ele(/.poly) files
    degree: int
    t_end: float
    cfl: float = None              # defaults: 0.5 (p=1), 0.1 (p=3)
    snapshots: tuple = ()
    gamma: float = euler.GAMMA_DEFAULT
    bc_map: dict = None            # marker -> BoundaryCondition; case default if None
    output: str = None             # directory for VTK/CSV output (optional)
    params: dict = dcfield(default_factory=dict)
    assert_entropy_rate: bool = True

    def __post_init__(self):
        if self.degree not in (1, 3):
            raise ValueError(f"degree must be 1 or 3, got {self.degree}")
        if self.cfl is None:
            self.cfl = 0.5 if self.degree == 1 else 0.1
        if self.bc_map is None:
            self.bc_map = default_bc_map(self.case, self.gamma, self.params)
        if not os.path.exists(self.mesh + ".node"):
            raise FileNotFoundError(self.mesh + ".node")


def parse_config(text, base_dir="."):
    """Flat key = value run configuration.

    Recognized keys: case, mesh, degree, t_end, cfl, snapshots, gamma,
    output, and bc.<marker> with values 'reflective', 'coupling_copy' or
    'coupling_fixed rho vx vy p' (primitive state).  Unknown keys go into
    params.
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, val = line.split("=", 1)
        kv[key.strip()] = val.strip()

    gamma = float(kv.pop("gamma", euler.GAMMA_DEFAULT))
    bc_map = {}
    for key in [k for k in kv if k.startswith("bc.")]:
        marker = int(key[3:])
        parts = kv.pop(key).split()
        if parts[0] == "coupling_fixed":
            prim = np.array([float(v) for v in parts[1:5]])
            bc_map[marker] = BoundaryCondition("coupling_fixed", euler.prim_to_cons(prim, gamma))
        else:
            bc_map[marker] = BoundaryCondition(parts[0])

    known = {
        "case": kv.pop("case"),
        "mesh": os.path.join(base_dir, kv.pop("mesh")),
        "degree": int(kv.pop("degree")),
        "t_end": float(kv.pop("t_end")),
        "gamma": gamma,
        "bc_map": bc_map or None,
    }
    if "cfl" in kv:
        known["cfl"] = float(kv.pop("cfl"))
    if "snapshots" in kv:
        known["snapshots"] = tuple(float(s) for s in kv.pop("snapshots").split(",") if s.strip())
    if "output" in kv:
        known["output"] = os.path.join(base_dir, kv.pop("output"))
    known["params"] = kv
    return RunConfig(**known)


# -- driver ----------------------------------------------------------------

@dataclass
class Diagnostics:
    """Per-step time series written to the diagnostics CSV."""

    rows: list = dcfield(default_factory=list)

    def append(self, **kwargs):
        self.rows.append([kwargs[c] for c in DIAG_COLUMNS])

    def column(self, name):
        i = DIAG_COLUMNS.index(name)
        return np.array([row[i] for row in self.rows])

    def write(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(DIAG_COLUMNS)
            for row in self.rows:
                writer.writerow([repr(float(v)) for v in row])


@dataclass
class RunResult:
    field: np.ndarray
    mesh: object
    element: ReferenceElement
    operator: DGOperator
    diagnostics: Diagnostics
    t: float
    snapshot_paths: list


class EntropyRateViolation(RuntimeError):
    pass


def setup_operator(config, mesh=None):
    """Startup procedure: operators, positive cubature, filter generator."""
    element = ReferenceElement(config.degree)
    cubature = pocs_cubature(element)
    fgen = build_filter_generator(element, cubature)
    if mesh is None:
        mesh = load_mesh_files(config.mesh)
    validate_mesh(mesh)
    op = DGOperator(mesh, element, fgen, config.bc_map, config.gamma)
    return element, mesh, op


def run_simulation(config, mesh=None, progress=None):
    """Integrate a test case to t_end, recording diagnostics and snapshots."""
    element, mesh, op = setup_operator(config, mesh)
    u = make_initial_condition(config.case, mesh, element, config.gamma, config.params)
    inradius = op.geo["inradius"]

    stops = sorted(set(list(config.snapshots) + [config.t_end]))
    snapshot_set = set(config.snapshots)
    if config.output:
        os.makedirs(config.output, exist_ok=True)
    snapshot_paths = []

    diag = Diagnostics()
    t = 0.0
    step = 0
    while t < config.t_end - 1e-13:
        next_stop = min(s for s in stops if s > t + 1e-13)
        dt = compute_dt(u, inradius, config.cfl, config.gamma, t, next_stop)
        rhs = lambda v, dt=dt: op.corrected_rhs(v, dt=dt)
        u, step_diag = ssprk33_step(u, dt, rhs, rescue=op.positivity_rescue)
        t += dt
        step += 1

        totals = op.conserved_totals(u)
        p = euler.pressure(u, config.gamma)
        budget = step_diag["sigma_total"] - step_diag["boundary_entropy_flux"]
        diag.append(t=t, mass=float(totals[0]), mom_x=float(totals[1]),
                    mom_y=float(totals[2]), energy=float(totals[3]),
                    entropy=op.total_entropy(u),
                    lambda_ed_sum=step_diag["lambda_ed_sum"],
                    lambda_er_sum=step_diag["lambda_er_sum"],
                    min_rho=float(u[..., 0].min()), min_p=float(p.min()),
                    sigma_total=step_diag["sigma_total"],
                    entropy_rate=step_diag["entropy_rate"],
                    boundary_entropy_flux=step_diag["boundary_entropy_flux"])
        if config.assert_entropy_rate and step_diag["entropy_rate"] > budget + ENTROPY_RATE_TOL:
            raise EntropyRateViolation(
                f"step {step} (t = {t:.6e}): entropy rate "
                f"{step_diag['entropy_rate']:.6e} exceeds bound {budget:.6e}")

        if config.output and any(abs(t - s) < 1e-11 for s in snapshot_set):
            path = os.path.join(config.output, f"{config.case}_t{t:.6f}.vtk")
            write_vtk(u, mesh, element, path, config.gamma)
            snapshot_paths.append(path)
        if progress and step % progress == 0:
            print(f"  t = {t:.5f} / {config.t_end}  dt = {dt:.3e}  "
                  f"min rho = {u[..., 0].min():.4f}", flush=True)

    if config.output:
        final = os.path.join(config.output, f"{config.case}_final.vtk")
        write_vtk(u, mesh, element, final, config.gamma)
        snapshot_paths.append(final)
        diag.write(os.path.join(config.output, f"{config.case}_diagnostics.csv"))
    return RunResult(field=u, mesh=mesh, element=element, operator=op,
                     diagnostics=diag, t=t, snapshot_paths=snapshot_paths)


# -- convergence study -------------------------------------------------------

def convergence_study(config, mesh_paths, progress=None):
    """Accuracy runs over a mesh sequence; returns table rows.

    Each row: (n_triangles, avg_area, typical_length, l2_error, eoc).
    EOC between levels uses the typical length sqrt(avg area).
    """
    rows = []
    for path in mesh_paths:
        cfg = RunConfig(case="accuracy", mesh=path, degree=config.degree,
                        t_end=config.t_end, cfl=config.cfl, gamma=config.gamma,
                        bc_map=config.bc_map, params=config.params,
                        assert_entropy_rate=config.assert_entropy_rate)
        result = run_simulation(cfg, progress=progress)
        err = l2_error_density(
            result.field, result.mesh, result.element,
            lambda x, y: accuracy_density(x, y, t=cfg.t_end))
        area = float(np.mean(result.operator.geo["area"]))
        rows.append([result.mesh.n_cells, area, np.sqrt(area), err, np.nan])
    for i in range(1, len(rows)):
        e1, e2 = rows[i - 1][3], rows[i][3]
        h1, h2 = rows[i - 1][2], rows[i][2]
        rows[i][4] = np.log(e1 / e2) / np.log(h1 / h2)
    return rows


def write_eoc_table(rows, csv_path, txt_path=None):
    header = ["triangles", "avg_area", "typ_len", "l2_error", "eoc"]
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([int(v) if float(v).is_integer() and abs(v) < 1e15
                             else repr(float(v)) for v in row])
    text = f"{'triangles':>10} {'avg_area':>12} {'typ_len':>10} {'l2_error':>12} {'eoc':>7}\n"
    for ntri, area, h, err, eoc in rows:
        eoc_s = f"{eoc:7.3f}" if np.isfinite(eoc) else "      -"
        text += f"{ntri:>10d} {area:>12.4e} {h:>10.4e} {err:>12.4e} {eoc_s}\n"
    if txt_path:
        with open(txt_path, "w") as f:
            f.write(text)
    return text
