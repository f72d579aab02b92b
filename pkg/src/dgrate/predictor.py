"""HLL entropy inequality predictors on edges.

sigma_1d bounds the instantaneous entropy dissipation rate of an exact weak
solution of the Riemann problem (ul, ur) per unit edge length; it is the
entropy defect of the HLL intermediate state and is always <= 0 up to
rounding.  Boundary variants assign only the dissipation that can happen
inside the domain: sigma_cbc zeroes the supersonic-outflow case, sigma_rbc
halves the value of the mirrored Riemann problem at a wall.

All functions vectorize over leading dimensions.
"""

from dataclasses import dataclass

import numpy as np

from dgrate import euler


def sigma_1d(ul, ur, n, gamma=euler.GAMMA_DEFAULT, speeds=None):
    """Entropy dissipation rate predictor for an interior jump."""
    if speeds is None:
        speeds = euler.wave_speed_estimates(ul, ur, n, gamma)
    a_l, a_r = speeds
    u_lr = euler.hll_mean_state(ul, ur, n, gamma, speeds=speeds)
    # Davis estimates do not guarantee a physical mean for extreme pairs;
    # floor density and pressure before taking logarithms
    u_lr = np.array(u_lr, copy=True)
    u_lr[..., 0] = np.maximum(u_lr[..., 0], 1e-13)
    p_lr = euler.pressure(u_lr, gamma)
    u_lr[..., 3] += np.maximum(1e-13 - p_lr, 0.0) / (gamma - 1.0)
    U_lr = -u_lr[..., 0] * euler.entropy_scalar(u_lr, gamma)
    Ul, Fl = euler.entropy_pair(ul, n, gamma)
    Ur, Fr = euler.entropy_pair(ur, n, gamma)
    # Jensen bound on the entropy in the wave fan [a_l t, a_r t] plus the
    # entropy carried in and out at its edges
    return (a_r - a_l) * U_lr + a_l * Ul - a_r * Ur - Fl + Fr


def sigma_cbc(ul, ur, n, gamma=euler.GAMMA_DEFAULT, speeds=None):
    """Coupling-boundary predictor: n is the outward normal of the interior cell.

    For supersonic outflow (0 < a_l) all dissipation happens outside the
    domain and the prediction is zero; every other case is assigned fully
    to the interior cell.
    """
    if speeds is None:
        speeds = euler.wave_speed_estimates(ul, ur, n, gamma)
    a_l, _ = speeds
    sig = sigma_1d(ul, ur, n, gamma, speeds=speeds)
    return np.where(a_l > 0.0, 0.0, sig)


def mirror_state(u, n):
    """Ghost state for a wall: normal velocity reflected, tangential kept."""
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    mn = u[..., 1] * n[..., 0] + u[..., 2] * n[..., 1]
    ghost = u.copy()
    ghost[..., 1] -= 2.0 * mn * n[..., 0]
    ghost[..., 2] -= 2.0 * mn * n[..., 1]
    return ghost


def sigma_rbc(u_in, n, gamma=euler.GAMMA_DEFAULT):
    """Reflective-boundary predictor: half the dissipation of the mirror problem."""
    ghost = mirror_state(u_in, n)
    return 0.5 * sigma_1d(u_in, ghost, n, gamma)


@dataclass
class EdgeSigma:
    edge: int
    value: float
    interior_share: float


def integrate_edge_sigma(ul, ur, n, edge_length, quad_weights, kind="interior",
                         gamma=euler.GAMMA_DEFAULT, edge=-1):
    """Gauss-Lobatto integral of pointwise sigma along one edge.

    ul, ur: traces at the edge quadrature nodes, shape (q, 4); ur is
    ignored for kind="reflective".  n is the outward normal of the
    interior (left) cell.  Unknown kinds are rejected.
    """
    if kind == "interior":
        vals = sigma_1d(ul, ur, n, gamma)
    elif kind == "coupling":
        vals = sigma_cbc(ul, ur, n, gamma)
    elif kind == "reflective":
        vals = sigma_rbc(ul, n, gamma)
    else:
        raise ValueError(f"unknown boundary kind {kind!r}")
    value = float(edge_length * np.dot(quad_weights, vals))
    return EdgeSigma(edge=edge, value=value, interior_share=value)
