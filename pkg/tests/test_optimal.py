"""Receding-horizon controller: collocation system, cost, bounds."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from mirrorgame.dynamics import HkbParams, HkbState, LinearParams
from mirrorgame.optimal import (
    OptimalWeights,
    SingularSystemError,
    build_collocation_system,
    cost_functional,
    mode_preset,
    one_step_error_bounds,
    opc_step,
    perturbation_check,
    solve_collocation,
)
from mirrorgame.optimal import _linear_optimal_control, _simulate_linear

import reference

PLANT = HkbParams(1.0, 1.0, 1.0, 1.0)
FOLLOWER = OptimalWeights(0.9, 0.1, 1e-4)
T = 0.03


class TestWeights:
    def test_presets(self):
        f = mode_preset("follower")
        assert (f.theta_p, f.theta_sigma) == (0.9, 0.1)
        l = mode_preset("leader")
        assert (l.theta_p, l.theta_sigma) == (0.1, 0.9)

    def test_custom_complement(self):
        w = mode_preset("custom", 0.43)
        assert w.theta_sigma == pytest.approx(0.57)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            OptimalWeights(0.9, 0.2)

    def test_custom_requires_weight(self):
        with pytest.raises(ValueError):
            mode_preset("custom")


class TestCollocationSolve:
    def test_solution_satisfies_the_system(self):
        A, B = build_collocation_system(
            HkbState(0.1, -0.2), 0.12, -0.2, -0.1, FOLLOWER, PLANT, T)
        sol = solve_collocation(A, B, T=T, eta_m=FOLLOWER.eta_m)
        z = np.array([sol.a0, sol.a1, sol.a2, sol.b0, sol.b1, sol.b2,
                      sol.c0, sol.c1, sol.c2])
        assert np.max(np.abs(A @ z - B)) < 1e-10

    def test_identity_system(self):
        sol = solve_collocation(np.eye(9), np.eye(9)[0], T=T, eta_m=1.0)
        assert sol.a0 == 1.0
        assert sol.a1 == sol.a2 == sol.b0 == 0.0

    def test_singular_system_rejected(self):
        with pytest.raises(SingularSystemError):
            solve_collocation(np.zeros((9, 9)), np.zeros(9))

    def test_matches_independent_formulation(self):
        # sinusoidal references around a generic state
        state = HkbState(0.1, 0.0)
        rp = 0.1 + T * 0.25 * math.sin(1.3)
        rk = 0.25 * math.sin(1.3)
        rk1 = 0.25 * math.sin(1.3 + T)
        A, B = build_collocation_system(state, rp, rk, rk1, FOLLOWER,
                                        PLANT, T)
        sol = solve_collocation(A, B, T=T, eta_m=FOLLOWER.eta_m)
        z = np.array([sol.a0, sol.a1, sol.a2, sol.b0, sol.b1, sol.b2,
                      sol.c0, sol.c1, sol.c2])
        z_ref = reference.solve_interval_conditions(
            state, rp, rk, rk1, FOLLOWER, PLANT, T)
        assert np.max(np.abs(z - z_ref)) < 1e-9


class TestOneStep:
    def test_stationary_input_needs_no_correction(self):
        # a drift-free state with consistent references needs no control:
        # pick (x, y) on the zero-drift manifold of the unit plant
        y = 0.2
        # root of y*x^2 + x + y*(y^2 - 1) = 0, i.e. zero drift at (x, y)
        x = (-1.0 + math.sqrt(1.0 - 4.0 * y * y * (y * y - 1.0))) / (2.0 * y)
        state = HkbState(x, y)
        assert abs((x * x + y * y - 1.0) * y + x) < 1e-12
        rp = x + T * y
        nxt, u, sol = opc_step(state, rp, y, y, FOLLOWER, PLANT, T)
        scale = max(1.0, abs(sol.a0), abs(sol.a1))
        assert abs(sol.a2) <= 1e-6 * scale
        assert abs(nxt.x - rp) < 1e-8

    def test_next_state_read_off_polynomial(self):
        state = HkbState(0.05, -0.1)
        nxt, _, sol = opc_step(state, 0.04, -0.1, -0.05, FOLLOWER, PLANT, T)
        assert nxt.x == sol.position(T)
        assert nxt.y == sol.velocity(T)

    def test_agrees_with_shooting_solver(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            x = rng.uniform(-0.4, 0.4)
            y = rng.uniform(-0.7, 0.7)
            rp = x + T * y + rng.uniform(-0.02, 0.02)
            rk = y + rng.uniform(-0.05, 0.05)
            rk1 = y + rng.uniform(-0.05, 0.05)
            state = HkbState(x, y)
            nxt, _, _ = opc_step(state, rp, rk, rk1, FOLLOWER, PLANT, T)
            x_T, y_T, *_ = reference.shoot_optimal_step(
                state, rp, rk, rk1, FOLLOWER, PLANT, T, n=800)
            assert abs(nxt.x - x_T) < 1e-3


class TestCost:
    def test_exact_tracking_zero_control_is_free(self):
        t = np.linspace(0.0, T, 50)
        r = 0.2 * np.ones_like(t)
        J = cost_functional(t, r, np.zeros_like(t), 0.3, 0.3, r, FOLLOWER)
        assert J == 0.0

    def test_terminal_error_only(self):
        t = np.linspace(0.0, T, 50)
        r = np.zeros_like(t)
        e = 0.11
        J = cost_functional(t, r, np.zeros_like(t), e, 0.0, r, FOLLOWER)
        assert J == pytest.approx(0.5 * FOLLOWER.theta_p * e * e)

    def test_matches_fine_quadrature_oracle(self):
        w = FOLLOWER

        def xd(tt):
            return 0.3 * np.sin(7.0 * tt)

        def uu(tt):
            return 2.0 * np.cos(3.0 * tt)

        def rs(tt):
            return 0.1 * tt

        t = np.linspace(0.0, T, 4001)
        J = cost_functional(t, xd(t), uu(t), 0.2, 0.15, rs(t), w)
        integrand = lambda tt: 0.5 * (
            w.theta_sigma * (xd(tt) - rs(tt)) ** 2 + w.eta_m * uu(tt) ** 2)
        J_ref = quad(integrand, 0.0, T, epsabs=1e-13)[0] \
            + 0.5 * w.theta_p * (0.2 - 0.15) ** 2
        assert abs(J - J_ref) < 1e-8

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            cost_functional([0, 1], [0], [0, 0], 0.0, 0.0, [0, 0], FOLLOWER)


class TestErrorBounds:
    def test_bounds_dominate_measured_one_step_errors(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = rng.uniform(-0.4, 0.4)
            y = rng.uniform(-0.7, 0.7)
            rp = x + T * y + rng.uniform(-0.02, 0.02)
            rk = y + rng.uniform(-0.05, 0.05)
            rk1 = y + rng.uniform(-0.05, 0.05)
            state = HkbState(x, y)
            _, _, sol = opc_step(state, rp, rk, rk1, FOLLOWER, PLANT, T)
            b = one_step_error_bounds(state, rp, rk, rk1, FOLLOWER, PLANT, T)
            assert abs(sol.position(T) - rp) <= b.pos_bound + 1e-12
            assert abs(sol.velocity(T) - rk1) <= b.vel_bound + 1e-12

    def test_bounds_are_non_negative(self):
        b = one_step_error_bounds(HkbState(0.2, -0.3), 0.1, 0.0, 0.1,
                                  FOLLOWER, PLANT, T)
        assert b.pos_bound >= 0.0
        assert b.vel_bound >= 0.0
        assert b.D != 0.0


class TestPerturbationCheck:
    LP = LinearParams(1.0, 1.0)

    def test_zero_perturbation_leaves_cost_unchanged(self):
        t, _, _, u = _linear_optimal_control(
            HkbState(0.1, 0.2), 0.15, 0.2, 0.25, FOLLOWER, self.LP, T)
        xs, ys = _simulate_linear(HkbState(0.1, 0.2), t, u, self.LP)
        rs = 0.2 + (0.25 - 0.2) * (t / T)
        J1 = cost_functional(t, ys, u, xs[-1], 0.15, rs, FOLLOWER)
        J2 = cost_functional(t, ys, u + 0.0, xs[-1], 0.15, rs, FOLLOWER)
        assert J1 == J2

    def test_scaled_perturbation_grows_at_least_linearly(self):
        # convexity along a ray: J(u* + 2 du) - J* >= J(u* + du) - J*
        state = HkbState(0.1, 0.2)
        t, _, _, u = _linear_optimal_control(
            state, 0.15, 0.2, 0.25, FOLLOWER, self.LP, T)
        rs = 0.2 + (0.25 - 0.2) * (t / T)

        def J(profile):
            xs, ys = _simulate_linear(state, t, profile, self.LP)
            return cost_functional(t, ys, profile, xs[-1], 0.15, rs, FOLLOWER)

        du = 0.05 * np.sin(np.linspace(0.0, math.pi, len(t)))
        J0 = J(u)
        d1 = J(u + du) - J0
        d2 = J(u + 2.0 * du) - J0
        assert d1 >= -1e-12
        assert d2 >= d1 - 1e-12

    def test_random_perturbations_never_win(self):
        ok, J_star, worst = perturbation_check(
            HkbState(0.1, 0.2), 0.15, 0.2, 0.25, FOLLOWER, self.LP, T,
            n_perturbations=30)
        assert ok
        assert J_star >= 0.0
        assert worst >= -1e-9
