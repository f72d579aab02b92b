"""Positive cubature via POCS and the entropy-dissipative filter generator.

The cubature weights are found by alternating projections onto the
positivity cone and the exactness hyperplanes (one per basis function).
The filter C(t) = exp(t L) with L = -M^-1 Q becomes entrywise nonnegative
for large enough t; the smallest such t defines the generator
G = (C(t*) - I) / t*.
"""

from dataclasses import dataclass
import os

import numpy as np
import scipy.linalg

POSITIVITY_SLACK = -1e-12
WEIGHT_SLACK = -1e-13
T_MIN = 1e-8
T_MAX = 1e12


class StartupError(RuntimeError):
    """Raised when the startup procedure cannot produce a valid filter."""


@dataclass
class PositiveCubature:
    """Nonnegative weights exact for every basis function."""

    weights: np.ndarray
    iterations: int
    residual: float


def pocs_cubature(element, w0=None, max_iter=10**6, tol=1e-12):
    """Projection-onto-convex-sets iteration for positive exact weights.

    Alternates clipping at zero with least-squares projections onto the
    exactness constraint of each basis function.  Aborts when the
    intersection appears empty (no convergence within max_iter).
    """
    phi = element.basis.eval_at(element.nodes)  # phi[i, k] = phi_k(x_i)
    targets = element.basis_integrals
    n = element.n_nodes
    w = np.full(n, float(np.sum(targets)) / n) if w0 is None else np.asarray(w0, dtype=float).copy()
    if w.shape != (n,):
        raise ValueError(f"initial weights must have shape ({n},)")

    norms2 = np.einsum("ik,ik->k", phi, phi)
    it = 0
    residual = np.inf
    for it in range(1, max_iter + 1):
        w = np.maximum(w, 0.0)
        for k in range(n):
            col = phi[:, k]
            w = w - (col @ w - targets[k]) / norms2[k] * col
        residual = np.max(np.abs(phi.T @ w - targets))
        if residual < tol and w.min() > WEIGHT_SLACK:
            return PositiveCubature(weights=w, iterations=it, residual=residual)
    raise StartupError(
        f"POCS cubature did not converge after {max_iter} iterations "
        f"(residual {residual:.3e}, min weight {w.min():.3e}); "
        "no positive exact cubature on this node set")


def laplacian_generator(element):
    """L = -M^-1 Q with Q the exact gradient Gramian."""
    return -element.mass_inv @ element.grad_gram


def matrix_exponential(A):
    """Dense matrix exponential (scaling and squaring, Pade approximant)."""
    return scipy.linalg.expm(np.asarray(A, dtype=float))


def find_positivity_time(L, rel_tol=1e-3):
    """Smallest t with exp(tL) entrywise >= POSITIVITY_SLACK, via bisection.

    A bracket is grown by doubling from t=1; t below T_MIN counts as the
    degenerate identity filter and is reported as T_MIN.
    """

    def min_entry(t):
        return matrix_exponential(t * L).min()

    if min_entry(T_MIN) >= POSITIVITY_SLACK:
        return T_MIN
    hi = 1.0
    while min_entry(hi) < POSITIVITY_SLACK:
        hi *= 2.0
        if hi > T_MAX:
            raise StartupError(f"no positive filter time below {T_MAX:.1e}")
    lo = T_MIN
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if min_entry(mid) >= POSITIVITY_SLACK:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class FilterGenerator:
    """Filter C(t*) = exp(t* L) and its generator G = (C - I)/t*."""

    laplacian: np.ndarray
    positivity_time: float
    filter: np.ndarray
    generator: np.ndarray
    cubature: PositiveCubature


def build_filter_generator(element, cubature):
    """Assemble the generator and verify the discrete-filter conditions.

    Checks on C(t*): entrywise nonnegativity, unit row sums (filter),
    w-weighted column sums equal to w (conservativity).  Any failure
    aborts startup.
    """
    L = laplacian_generator(element)
    t_star = find_positivity_time(L)
    C = matrix_exponential(t_star * L)
    w = cubature.weights

    if C.min() < POSITIVITY_SLACK:
        raise StartupError(f"filter has negative entry {C.min():.3e} at t* = {t_star:.3e}")
    row_defect = np.max(np.abs(C.sum(axis=1) - 1.0))
    if row_defect > 1e-9:
        raise StartupError(f"filter row sums off by {row_defect:.3e}")
    col_defect = np.abs(w @ C - w)
    if col_defect.max() > 1e-9:
        k = int(np.argmax(col_defect))
        raise StartupError(
            f"filter conservativity violated in column {k} by {col_defect[k]:.3e}")

    # at the degenerate minimum time (L already has nonnegative
    # off-diagonals) the difference quotient only amplifies rounding;
    # its exact limit is L itself
    G = L if t_star == T_MIN else (C - np.eye(len(C))) / t_star
    return FilterGenerator(laplacian=L, positivity_time=t_star, filter=C,
                           generator=G, cubature=cubature)


def dump_csv(fg, dirpath):
    """Debug dump of w, L, C(t*), G."""
    os.makedirs(dirpath, exist_ok=True)
    np.savetxt(os.path.join(dirpath, "weights.csv"), fg.cubature.weights[None, :], delimiter=",")
    np.savetxt(os.path.join(dirpath, "laplacian.csv"), fg.laplacian, delimiter=",")
    np.savetxt(os.path.join(dirpath, "filter.csv"), fg.filter, delimiter=",")
    np.savetxt(os.path.join(dirpath, "generator.csv"), fg.generator, delimiter=",")
