"""CFL step selection and SSP Runge-Kutta order."""

import numpy as np
import pytest

from dgrate.euler import prim_to_cons
from dgrate.timestep import TimeStepError, compute_dt, ssprk33_step


class TestComputeDt:
    def test_hand_value(self):
        # single cell, rho=1, v=(3,0), p=1/1.4 -> c=1, |v|+c=4
        u = prim_to_cons(np.array([[[1.0, 3.0, 0.0, 1.0 / 1.4]]]))
        dt = compute_dt(u, inradius=np.array([0.2]), cfl=0.5)
        assert dt == pytest.approx(0.5 * 0.2 / 4.0, rel=1e-12)

    def test_min_over_cells(self):
        ua = prim_to_cons(np.array([1.0, 3.0, 0.0, 1.0 / 1.4]))
        ub = prim_to_cons(np.array([1.0, 7.0, 0.0, 1.0 / 1.4]))
        u = np.stack([ua[None], ub[None]])
        dt = compute_dt(u, inradius=np.array([0.2, 0.2]), cfl=1.0)
        assert dt == pytest.approx(0.2 / 8.0, rel=1e-12)

    def test_clip_to_stop_time(self):
        u = prim_to_cons(np.array([[[1.0, 0.0, 0.0, 1.0 / 1.4]]]))
        dt = compute_dt(u, inradius=np.array([1.0]), cfl=0.5, t=0.95, t_stop=1.0)
        assert dt == pytest.approx(0.05, rel=1e-12)

    def test_underflow_aborts(self):
        u = prim_to_cons(np.array([[[1.0, 0.0, 0.0, 1.0 / 1.4]]]))
        with pytest.raises(TimeStepError):
            compute_dt(u, inradius=np.array([1.0]), cfl=0.5, t=1.0 - 1e-16, t_stop=1.0)


class TestSSPRK33:
    def test_third_order_on_scalar_ode(self):
        # u' = u, exact e^t: error per step must scale like dt^4
        def rhs(u):
            return u, {}

        errs = []
        for dt in (0.1, 0.05, 0.025):
            u = np.array(1.0)
            n = round(1.0 / dt)
            for _ in range(n):
                u, _ = ssprk33_step(u, dt, rhs)
            errs.append(abs(float(u) - np.e))
        order1 = np.log(errs[0] / errs[1]) / np.log(2)
        order2 = np.log(errs[1] / errs[2]) / np.log(2)
        assert order1 > 2.8
        assert order2 > 2.8

    def test_matches_shu_osher_stages(self):
        # one step on a linear system against the hand-rolled stage formula
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])

        def rhs(u):
            return A @ u, {"tag": 1}

        u0 = np.array([1.0, 0.0])
        dt = 0.1
        u1 = u0 + dt * (A @ u0)
        u2 = 0.75 * u0 + 0.25 * (u1 + dt * (A @ u1))
        want = u0 / 3.0 + 2.0 / 3.0 * (u2 + dt * (A @ u2))
        got, diag = ssprk33_step(u0, dt, rhs)
        assert np.allclose(got, want, atol=1e-15)
        assert diag == {"tag": 1}

    def test_convex_combination_preserves_bounds(self):
        # SSP property: with forward-Euler-stable rhs (here projection to
        # [0,1] dynamics), stage combinations stay in the convex hull
        def rhs(u):
            return -u, {}

        u = np.array([1.0])
        out, _ = ssprk33_step(u, 0.5, rhs)
        assert 0.0 <= float(out[0]) <= 1.0
