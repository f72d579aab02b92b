"""SSPRK33 time stepping with CFL-based step size selection."""

import numpy as np

from dgrate import euler

DT_UNDERFLOW = 1e-14


class TimeStepError(RuntimeError):
    pass


def compute_dt(u, inradius, cfl, gamma=euler.GAMMA_DEFAULT, t=0.0, t_stop=None):
    """dt = cfl * min_z inradius_z / max_node(|v| + c), clipped to t_stop."""
    rho = u[..., 0]
    speed = np.sqrt((u[..., 1] ** 2 + u[..., 2] ** 2)) / rho + euler.sound_speed(u, gamma)
    dt = cfl * float(np.min(inradius / speed.max(axis=1)))
    if t_stop is not None and t + dt >= t_stop:
        dt = t_stop - t
    if dt < DT_UNDERFLOW:
        raise TimeStepError(f"timestep underflow (dt = {dt:.3e} at t = {t:.6e})")
    return dt


def ssprk33_step(u, dt, rhs, rescue=None):
    """Classical three-stage Shu-Osher SSP Runge-Kutta step.

    rhs(u) must return (du/dt, diagnostics); the diagnostics of the first
    stage are passed through (convexity carries per-stage invariants to
    the full step).  rescue, when given, is applied to every stage state
    (positivity failsafe, see DGOperator.positivity_rescue).
    """
    fix = rescue if rescue is not None else lambda v: v
    k1, diag = rhs(u)
    u1 = fix(u + dt * k1)
    k2, _ = rhs(u1)
    u2 = fix(0.75 * u + 0.25 * (u1 + dt * k2))
    k3, _ = rhs(u2)
    return fix(u / 3.0 + 2.0 / 3.0 * (u2 + dt * k3)), diag
