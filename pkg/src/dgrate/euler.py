"""Euler-equation state algebra, HLL fluxes and the entropy pair.

All routines are vectorized: conserved states have shape (..., 4) with
components (rho, rho*vx, rho*vy, E), normals have shape (..., 2) and
broadcast against the states.  The adiabatic exponent gamma is passed
explicitly, default 1.4.

Entropy convention (Harten): S = log(p rho^-gamma), U = -rho S, with
directional entropy flux F_n = -(v . n) rho S.  U is convex on the set of
physical states.
"""

import numpy as np

GAMMA_DEFAULT = 1.4


class NonPhysicalState(ValueError):
    """Density or pressure lost positivity."""


def pressure(u, gamma=GAMMA_DEFAULT):
    u = np.asarray(u)
    rho = u[..., 0]
    kinetic = 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho
    return (gamma - 1.0) * (u[..., 3] - kinetic)


def check_physical(u, gamma=GAMMA_DEFAULT, context=""):
    """Raise NonPhysicalState unless all densities and pressures are positive."""
    u = np.asarray(u)
    rho = u[..., 0]
    if not np.all(rho > 0.0):
        bad = np.unravel_index(int(np.argmin(rho)), rho.shape)
        raise NonPhysicalState(f"non-positive density {rho[bad]:.6e} at {bad} {context}")
    p = pressure(u, gamma)
    if not np.all(p > 0.0):
        bad = np.unravel_index(int(np.argmin(p)), p.shape)
        raise NonPhysicalState(f"non-positive pressure {p[bad]:.6e} at {bad} {context}")


def cons_to_prim(u, gamma=GAMMA_DEFAULT):
    """(rho, m, E) -> (rho, v, p).  Raises on non-physical input."""
    u = np.asarray(u, dtype=float)
    check_physical(u, gamma)
    q = np.empty_like(u)
    q[..., 0] = u[..., 0]
    q[..., 1] = u[..., 1] / u[..., 0]
    q[..., 2] = u[..., 2] / u[..., 0]
    q[..., 3] = pressure(u, gamma)
    return q


def prim_to_cons(q, gamma=GAMMA_DEFAULT):
    """(rho, v, p) -> (rho, m, E)."""
    q = np.asarray(q, dtype=float)
    u = np.empty_like(q)
    rho = q[..., 0]
    u[..., 0] = rho
    u[..., 1] = rho * q[..., 1]
    u[..., 2] = rho * q[..., 2]
    u[..., 3] = q[..., 3] / (gamma - 1.0) + 0.5 * rho * (q[..., 1] ** 2 + q[..., 2] ** 2)
    return u


def phys_flux_xy(u, gamma=GAMMA_DEFAULT):
    """Both coordinate fluxes f(u), g(u), each shaped like u."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    vx = u[..., 1] / rho
    vy = u[..., 2] / rho
    p = pressure(u, gamma)
    f = np.empty_like(u)
    g = np.empty_like(u)
    f[..., 0] = u[..., 1]
    f[..., 1] = u[..., 1] * vx + p
    f[..., 2] = u[..., 2] * vx
    f[..., 3] = vx * (u[..., 3] + p)
    g[..., 0] = u[..., 2]
    g[..., 1] = u[..., 1] * vy
    g[..., 2] = u[..., 2] * vy + p
    g[..., 3] = vy * (u[..., 3] + p)
    return f, g


def phys_flux(u, n, gamma=GAMMA_DEFAULT):
    """Directional flux f(u) n_x + g(u) n_y."""
    f, g = phys_flux_xy(u, gamma)
    n = np.asarray(n, dtype=float)
    return f * n[..., 0, None] + g * n[..., 1, None]


def entropy_scalar(u, gamma=GAMMA_DEFAULT):
    """Physical specific entropy S = log(p rho^-gamma)."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    p = pressure(u, gamma)
    return np.log(p) - gamma * np.log(rho)


def entropy_pair(u, n, gamma=GAMMA_DEFAULT):
    """(U, F_n) = (-rho S, -(v.n) rho S)."""
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    S = entropy_scalar(u, gamma)
    U = -u[..., 0] * S
    vn = (u[..., 1] * n[..., 0] + u[..., 2] * n[..., 1]) / u[..., 0]
    return U, -vn * u[..., 0] * S


def entropy_variables(u, gamma=GAMMA_DEFAULT):
    """dU/du for U = -rho S, shaped like u."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    vx = u[..., 1] / rho
    vy = u[..., 2] / rho
    p = pressure(u, gamma)
    S = entropy_scalar(u, gamma)
    v = np.empty_like(u)
    v[..., 0] = gamma - S - 0.5 * (gamma - 1.0) * rho * (vx ** 2 + vy ** 2) / p
    v[..., 1] = (gamma - 1.0) * rho * vx / p
    v[..., 2] = (gamma - 1.0) * rho * vy / p
    v[..., 3] = -(gamma - 1.0) * rho / p
    return v


def sound_speed(u, gamma=GAMMA_DEFAULT):
    return np.sqrt(gamma * pressure(u, gamma) / np.asarray(u)[..., 0])


def wave_speed_estimates(ul, ur, n, gamma=GAMMA_DEFAULT):
    """Davis bounds (a_l, a_r) on the fastest left/right waves."""
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    n = np.asarray(n, dtype=float)
    cl = sound_speed(ul, gamma)
    cr = sound_speed(ur, gamma)
    vnl = (ul[..., 1] * n[..., 0] + ul[..., 2] * n[..., 1]) / ul[..., 0]
    vnr = (ur[..., 1] * n[..., 0] + ur[..., 2] * n[..., 1]) / ur[..., 0]
    a_l = np.minimum(vnl - cl, vnr - cr)
    a_r = np.maximum(vnl + cl, vnr + cr)
    return a_l, a_r


def hll_flux(ul, ur, n, gamma=GAMMA_DEFAULT, speeds=None):
    """Three-case HLL numerical flux in direction n."""
    a_l, a_r = wave_speed_estimates(ul, ur, n, gamma) if speeds is None else speeds
    fl = phys_flux(ul, n, gamma)
    fr = phys_flux(ur, n, gamma)
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    denom = a_r - a_l
    # guard: with Davis estimates on physical states a_l < a_r always
    denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
    middle = (a_r[..., None] * fl - a_l[..., None] * fr
              + (a_l * a_r)[..., None] * (ur - ul)) / denom[..., None]
    out = np.where(a_l[..., None] >= 0.0, fl, np.where(a_r[..., None] <= 0.0, fr, middle))
    return out


def hll_mean_state(ul, ur, n, gamma=GAMMA_DEFAULT, speeds=None):
    """HLL intermediate state u_lr = (a_r u_r - a_l u_l + f_l - f_r)/(a_r - a_l)."""
    a_l, a_r = wave_speed_estimates(ul, ur, n, gamma) if speeds is None else speeds
    denom = a_r - a_l
    if np.any(np.abs(denom) < 1e-300):
        raise ZeroDivisionError("coinciding wave speed estimates in HLL mean state")
    fl = phys_flux(ul, n, gamma)
    fr = phys_flux(ur, n, gamma)
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    return (a_r[..., None] * ur - a_l[..., None] * ul + fl - fr) / denom[..., None]


def hll_entropy_flux(ul, ur, n, gamma=GAMMA_DEFAULT, speeds=None):
    """HLL-form numerical entropy flux with the same wave speeds."""
    a_l, a_r = wave_speed_estimates(ul, ur, n, gamma) if speeds is None else speeds
    Ul, Fl = entropy_pair(ul, n, gamma)
    Ur, Fr = entropy_pair(ur, n, gamma)
    denom = a_r - a_l
    denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
    middle = (a_r * Fl - a_l * Fr + a_l * a_r * (Ur - Ul)) / denom
    return np.where(a_l >= 0.0, Fl, np.where(a_r <= 0.0, Fr, middle))
