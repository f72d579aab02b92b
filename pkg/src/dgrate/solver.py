"""Semidiscrete DG operator with entropy-rate corrections.

The operator evaluates, for the whole mesh at once:

  du/dt = M^-1 (sum_l S^l f_l - sum_m B^m f*_m) + lambda G u

where f* is the HLL flux on every edge (computed once, shared with
opposite sign by both cells), G the filter generator on the reference
element and lambda = lambda_ED + lambda_ER steers the discrete per-cell
entropy inequality and the edge-integrated dissipation bound.

The field is an ndarray of shape (Z, N, 4): nodal conserved states per
cell.  All physical operators factor through the reference element via
the affine map, so only per-cell scalars are stored.
"""

from dataclasses import dataclass

import numpy as np

from dgrate import euler, predictor
from dgrate.mesh import all_cell_geometry
from dgrate.ref_element import REF_EDGE_LENGTHS

DENOM_GUARD = -1e-13


@dataclass
class BoundaryCondition:
    """kind: 'reflective' | 'coupling_fixed' | 'coupling_copy'."""

    kind: str
    state: np.ndarray = None  # conserved exterior state for coupling_fixed

    def __post_init__(self):
        if self.kind not in ("reflective", "coupling_fixed", "coupling_copy"):
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind == "coupling_fixed":
            self.state = np.asarray(self.state, dtype=float)
            if self.state.shape != (4,):
                raise ValueError("coupling_fixed needs a conserved 4-state")


def assemble_cell_operators(mesh, element):
    """Physical per-cell Gramians via the affine mapping rules.

    Returns stacked arrays; used for verification, the solver itself works
    with the factored reference operators.
    """
    geo = all_cell_geometry(mesh)
    det = geo["det"]
    inv = geo["inv_jacobian"]
    M = det[:, None, None] * element.mass[None]
    S = []
    for m in range(2):  # x_m
        S.append(det[:, None, None] * (
            inv[:, 0, m, None, None] * element.stiffness_r[None]
            + inv[:, 1, m, None, None] * element.stiffness_s[None]))
    B = []
    for m in range(3):
        scale = geo["edge_lengths"][:, m] / REF_EDGE_LENGTHS[m]
        B.append(scale[:, None, None] * element.boundary[m][None])
    w_phys = det[:, None] * element.basis_integrals[None, :]
    return {"M": M, "S": S, "B": B, "w_phys": w_phys, "geometry": geo}


class DGOperator:
    """Assembled spatial operator for one mesh / element / BC map."""

    def __init__(self, mesh, element, fgen, bc_map, gamma=euler.GAMMA_DEFAULT):
        self.mesh = mesh
        self.element = element
        self.fgen = fgen
        self.gamma = gamma
        self.bc_map = dict(bc_map)
        self.geo = all_cell_geometry(mesh)
        self.last_rescued = 0
        self._build_reference_ops()
        self._build_edge_tables()

    # -- setup ---------------------------------------------------------

    def _build_reference_ops(self):
        el = self.element
        Minv = el.mass_inv
        self.A_r = Minv @ el.stiffness_r
        self.A_s = Minv @ el.stiffness_s
        self.lift = [Minv @ el.boundary[m][:, el.edge_nodes[m]] for m in range(3)]
        self.G = self.fgen.generator
        # largest s for which I + s G is row-stochastic (G is Metzler with
        # zero row sums): a forward Euler substep of the pure correction
        # with lam dt <= lam_stable stays a convex nodal blend
        self.lam_stable = 1.0 / float(np.max(-np.diag(self.G)))
        self.w_ref = self.fgen.cubature.weights
        self.wq = el.edge_quad_weights
        self.q = len(self.wq)
        inv = self.geo["inv_jacobian"]
        self.drdx = inv[:, 0, 0]
        self.dsdx = inv[:, 1, 0]
        self.drdy = inv[:, 0, 1]
        self.dsdy = inv[:, 1, 1]

    def _build_edge_tables(self):
        mesh, el = self.mesh, self.element
        N, q = el.n_nodes, self.q
        Z, E = mesh.n_cells, mesh.n_edges
        zl = mesh.edge_cells[:, 0]
        ml = mesh.edge_local[:, 0]
        zr = mesh.edge_cells[:, 1]
        mr = mesh.edge_local[:, 1]

        self.edge_normal = self.geo["normals"][zl, ml]          # (E, 2)
        self.edge_length = self.geo["edge_lengths"][zl, ml]     # (E,)

        en = np.array(el.edge_nodes)                            # (3, q)
        self.traceL = zl[:, None] * N + en[ml]                  # (E, q)
        self.interior = zr >= 0
        self.traceR = np.where(
            self.interior[:, None],
            np.where(zr[:, None] >= 0, zr[:, None], 0) * N + en[np.where(mr >= 0, mr, 0)][:, ::-1],
            0)

        # boundary edges grouped by BC kind
        boundary = ~self.interior
        markers = mesh.boundary_marker
        present = sorted(set(int(m) for m in markers[boundary]))
        for m in present:
            if m not in self.bc_map:
                raise ValueError(f"no boundary condition configured for marker {m}")
        self.bc_groups = []
        for m in present:
            sel = np.nonzero(boundary & (markers == m))[0]
            self.bc_groups.append((self.bc_map[m], sel))
        self.boundary_edges = np.nonzero(boundary)[0]

        # per cell: its 3 edges in canonical edge order, with orientation
        self.cell_edge = np.empty((Z, 3), dtype=int)
        self.cell_sign = np.empty((Z, 3))
        self.cell_gather = np.empty((Z, 3, q), dtype=int)
        fwd = np.arange(q)
        rev = fwd[::-1]
        for side, sgn in ((0, 1.0), (1, -1.0)):
            zs = mesh.edge_cells[:, side]
            sel = zs >= 0
            e_ids = np.nonzero(sel)[0]
            self.cell_edge[zs[sel], mesh.edge_local[sel, side]] = e_ids
            self.cell_sign[zs[sel], mesh.edge_local[sel, side]] = sgn
            order = fwd if side == 0 else rev
            self.cell_gather[zs[sel], mesh.edge_local[sel, side]] = e_ids[:, None] * q + order

        # surface scaling: len / (ref_len * det)
        self.surf_coef = (self.geo["edge_lengths"]
                          / REF_EDGE_LENGTHS[None, :]
                          / self.geo["det"][:, None])        # (Z, 3)
        self.w_phys = self.geo["det"][:, None] * self.w_ref[None, :]  # (Z, N)

    # -- boundary ghosts -------------------------------------------------

    def ghost_traces(self, uL):
        """Exterior trace on every edge; interior edges get the neighbor trace."""
        uR = np.empty_like(uL)
        flat = None
        if np.any(self.interior):
            flat = self._uflat
            uR[self.interior] = flat[self.traceR[self.interior]]
        for bc, sel in self.bc_groups:
            if bc.kind == "reflective":
                uR[sel] = predictor.mirror_state(uL[sel], self.edge_normal[sel, None, :])
            elif bc.kind == "coupling_fixed":
                uR[sel] = bc.state[None, None, :]
            else:  # coupling_copy
                uR[sel] = uL[sel]
        return uR

    # -- evaluation ------------------------------------------------------

    def compute_rhs(self, u, check=True):
        """Uncorrected DG right-hand side plus everything the corrections need."""
        el = self.element
        Z, N = u.shape[0], u.shape[1]
        if check:
            euler.check_physical(u, self.gamma, context="(cell, node)")

        fx, fy = euler.phys_flux_xy(u, self.gamma)
        vol = (np.einsum("kl,zlc->zkc", self.A_r, fx) * self.drdx[:, None, None]
               + np.einsum("kl,zlc->zkc", self.A_s, fx) * self.dsdx[:, None, None]
               + np.einsum("kl,zlc->zkc", self.A_r, fy) * self.drdy[:, None, None]
               + np.einsum("kl,zlc->zkc", self.A_s, fy) * self.dsdy[:, None, None])

        self._uflat = u.reshape(Z * N, 4)
        uL = self._uflat[self.traceL]          # (E, q, 4)
        uR = self.ghost_traces(uL)
        n = self.edge_normal[:, None, :]

        speeds = euler.wave_speed_estimates(uL, uR, n, self.gamma)
        fstar = euler.hll_flux(uL, uR, n, self.gamma, speeds=speeds)       # (E, q, 4)
        estar = euler.hll_entropy_flux(uL, uR, n, self.gamma, speeds=speeds)  # (E, q)

        # predictor values; boundary variants by group
        sig = predictor.sigma_1d(uL, uR, n, self.gamma, speeds=speeds)
        for bc, sel in self.bc_groups:
            if bc.kind == "reflective":
                sig[sel] = 0.5 * sig[sel]  # ghost is the mirror state already
            else:
                sig[sel] = np.where(speeds[0][sel] > 0.0, 0.0, sig[sel])
        sigma_e = self.edge_length * (sig @ self.wq)          # (E,)

        # surface term, one flux per edge distributed with opposite signs
        fstar_flat = fstar.reshape(-1, 4)
        fcell = fstar_flat[self.cell_gather] * self.cell_sign[:, :, None, None]  # (Z,3,q,4)
        surf = np.zeros_like(vol)
        for m in range(3):
            surf += self.surf_coef[:, m, None, None] * np.einsum(
                "kq,zqc->zkc", self.lift[m], fcell[:, m])
        rhs_tilde = vol - surf

        # entropy bookkeeping
        v_ent = euler.entropy_variables(u, self.gamma)
        upsilon = np.einsum("kl,zlc->zkc", self.G, u)
        diss = np.einsum("zk,zkc,zkc->z", self.w_phys, v_ent, upsilon)
        production = np.einsum("zk,zkc,zkc->z", self.w_phys, v_ent, rhs_tilde)

        estar_flat = estar.reshape(-1)
        ecell = estar_flat[self.cell_gather] * self.cell_sign[:, :, None]  # (Z,3,q)
        outflux = np.einsum("zmq,q,zm->z", ecell, self.wq,
                            self.geo["edge_lengths"])  # outward entropy flux integral
        allowed = -outflux

        # per-cell interface entropy excess, measured nodewise so that the
        # collocation errors of the volume term do not enter.  With the
        # HLL-form entropy flux both one-sided excesses are nonpositive for
        # every state pair, so this only catches rounding and exotic states.
        vL = euler.entropy_variables(uL, self.gamma)
        vR = euler.entropy_variables(uR, self.gamma)
        fnL = euler.phys_flux(uL, n, self.gamma)
        fnR = euler.phys_flux(uR, n, self.gamma)
        FL = euler.entropy_pair(uL, n, self.gamma)[1]
        FR = euler.entropy_pair(uR, n, self.gamma)[1]
        thetaL = np.einsum("eqc,eqc->eq", vL, fnL - fstar) - FL + estar
        thetaR = np.einsum("eqc,eqc->eq", vR, fstar - fnR) + FR - estar
        thL_flat = thetaL.reshape(-1)
        thR_flat = thetaR.reshape(-1)
        theta_cell = np.where(self.cell_sign[:, :, None] > 0.0,
                              thL_flat[self.cell_gather],
                              thR_flat[self.cell_gather])       # (Z,3,q)
        itf_excess = np.einsum("zmq,q,zm->z", theta_cell, self.wq,
                               self.geo["edge_lengths"])

        be = self.boundary_edges
        boundary_eflux = float(np.einsum(
            "eq,q,e->", estar[be], self.wq, self.edge_length[be]))

        return {
            "rhs_tilde": rhs_tilde,
            "upsilon": upsilon,
            "dissipativity": diss,
            "production": production,
            "allowed_rate": allowed,
            "interface_excess": itf_excess,
            "sigma_edges": sigma_e,
            "boundary_entropy_flux": boundary_eflux,
        }

    def compute_lambda_ed(self, aux):
        """Correction strength for the classical per-cell entropy inequality.

        The cell inequality is evaluated through the interface excess, i.e.
        with the cell's own entropy production telescoped to its boundary
        nodes.  Measured this way the volume collocation error drops out:
        enforcing the raw cubature production against the boundary entropy
        flux reacts to aliasing noise of the smooth solution and destroys
        the design order of the scheme.  A global guard in corrected_rhs
        keeps the summed inequality intact regardless.
        """
        diss = aux["dissipativity"]
        need = -aux["interface_excess"]
        lam = np.where(diss < DENOM_GUARD, need / np.where(diss < DENOM_GUARD, diss, -1.0), 0.0)
        return np.maximum(lam, 0.0)

    def compute_lambda_er(self, aux):
        """Correction strength for the edge-integrated entropy rate bound."""
        diss = aux["dissipativity"]
        zl = self.mesh.edge_cells[:, 0]
        zr = self.mesh.edge_cells[:, 1]
        denom = np.where(self.interior, diss[zl] + diss[np.where(zr >= 0, zr, 0)], 2.0 * diss[zl])
        contrib = np.where(denom < DENOM_GUARD,
                           aux["sigma_edges"] / np.where(denom < DENOM_GUARD, denom, -1.0),
                           0.0)
        lam = contrib[self.cell_edge].sum(axis=1)
        return np.maximum(lam, 0.0)

    @staticmethod
    def apply_correction(rhs_tilde, lam, upsilon):
        """du/dt = rhs_tilde + lambda G u, componentwise per cell."""
        return rhs_tilde + lam[:, None, None] * upsilon

    def corrected_rhs(self, u, check=True, dt=None):
        """Full entropy-rate corrected right-hand side with diagnostics.

        With dt given, per-cell strengths are capped at lam_stable / dt so
        the correction substep of a forward Euler stage stays a convex blend
        of the nodal states (no positivity overshoot); the global guard then
        redistributes the remaining dissipation demand over cells with
        headroom.
        """
        aux = self.compute_rhs(u, check=check)
        lam_ed = self.compute_lambda_ed(aux)
        lam_er = self.compute_lambda_er(aux)
        cap = np.inf if dt is None else self.lam_stable / dt
        lam = np.minimum(lam_ed + lam_er, cap)

        # global guard: the step must dissipate the predicted rate on top of
        # the boundary entropy flux; distribute any shortfall over the
        # dissipative cells
        diss = aux["dissipativity"]
        sigma_total = float(aux["sigma_edges"].sum())
        target = sigma_total - aux["boundary_entropy_flux"]
        rate = float(aux["production"].sum() + np.sum(lam * diss))
        active = diss < DENOM_GUARD
        rate_final = rate
        if rate > target and np.any(active):
            # the guard itself is not capped: it is what enforces the summed
            # inequality, and the positivity failsafe backstops any
            # overshoot.  The guarded rate equals the target by
            # construction, so report that value: recomputing it re-rounds
            # the (possibly huge) pre-guard rate into O(eps * rate) noise
            diss_active = float(diss[active].sum())
            lam = lam + (rate - target) / -diss_active * active
            rate_final = target

        rhs = self.apply_correction(aux["rhs_tilde"], lam, aux["upsilon"])
        diag = {
            "lambda_ed_sum": float(lam.sum() - lam_er.sum()),
            "lambda_er_sum": float(lam_er.sum()),
            "sigma_total": sigma_total,
            "entropy_rate": rate_final,
            "boundary_entropy_flux": aux["boundary_entropy_flux"],
        }
        return rhs, diag

    # -- positivity failsafe ----------------------------------------------

    def positivity_rescue(self, u, rho_min=1e-11, p_min=1e-11):
        """Blend nonphysical cells toward their cell mean.

        The blend u_bar + theta (u - u_bar) with theta in [0, 1] is itself a
        positive conservative filter (rows sum to one, column sums equal the
        cubature weights), so it stays within the correction family: cell
        means are conserved exactly and the cell entropy cannot increase.
        Cells whose nodal states are physical are returned untouched.
        Raises NonPhysicalState when even the cell mean is nonphysical.
        """
        rho = u[..., 0]
        p = euler.pressure(u, self.gamma)
        bad = np.nonzero((rho.min(axis=1) < rho_min) | (p.min(axis=1) < p_min))[0]
        if len(bad) == 0:
            return u
        w = self.w_phys[bad]                                    # (B, N)
        mean = np.einsum("zk,zkc->zc", w, u[bad]) / w.sum(axis=1)[:, None]
        p_mean = euler.pressure(mean, self.gamma)
        if np.any(mean[:, 0] < rho_min) or np.any(p_mean < p_min):
            z = bad[int(np.argmin(p_mean))]
            raise euler.NonPhysicalState(
                f"cell {z}: mean state nonphysical, rescue impossible")
        # blend targets relative to the cell mean: parking a cell exactly at
        # the absolute floor leaves near-vacuum states whose entropy
        # variables (~ 1/p) wreck the entropy accounting downstream
        rho_t = np.maximum(rho_min, 0.05 * mean[:, 0])
        p_t = np.maximum(p_min, 0.05 * p_mean)
        out = u.copy()
        lo = np.zeros(len(bad))
        hi = np.ones(len(bad))
        dev = u[bad] - mean[:, None, :]
        for _ in range(60):  # bisection: largest admissible blend factor
            mid = 0.5 * (lo + hi)
            cand = mean[:, None, :] + mid[:, None, None] * dev
            ok = ((cand[..., 0].min(axis=1) >= rho_t)
                  & (euler.pressure(cand, self.gamma).min(axis=1) >= p_t))
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        out[bad] = mean[:, None, :] + lo[:, None, None] * dev
        self.last_rescued = len(bad)
        return out

    # -- reductions used by the driver ------------------------------------

    def total_entropy(self, u):
        U = -u[..., 0] * euler.entropy_scalar(u, self.gamma)
        return float(np.sum(self.w_phys * U))

    def conserved_totals(self, u):
        return np.einsum("zk,zkc->c", self.w_phys, u)
