"""Receding-horizon optimal controller: per-interval cost, the quadratic
collocation solution of the Pontryagin boundary value problem, one-step
error bounds, and the convexity perturbation check for the linear plant.

The collocation linear system, the costate dynamics and the N/D closed
form all use the oscillator damping written as (alpha*x^2 + beta*y^2 -
gamma); with the default plant (alpha = beta) this coincides with the
controlled end-effector form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import HkbState


class SingularSystemError(RuntimeError):
    """The collocation matrix is numerically singular."""


@dataclass(frozen=True)
class OptimalWeights:
    """Cost weights: terminal position, signature similarity, control effort."""

    theta_p: float
    theta_sigma: float
    eta_m: float = 1e-4

    def __post_init__(self):
        if abs(self.theta_p + self.theta_sigma - 1.0) > 1e-9:
            raise ValueError(
                f"theta_p + theta_sigma must equal 1, got "
                f"{self.theta_p} + {self.theta_sigma}")
        if self.theta_p <= 0 or self.theta_sigma <= 0 or self.eta_m <= 0:
            raise ValueError("all weights must be positive")


def mode_preset(mode, theta_p=None):
    """Weight presets: follower (0.9/0.1), leader (0.1/0.9), or custom."""
    if mode == "follower":
        return OptimalWeights(0.9, 0.1, 1e-4)
    if mode == "leader":
        return OptimalWeights(0.1, 0.9, 1e-4)
    if mode == "custom":
        if theta_p is None:
            raise ValueError("custom mode requires theta_p")
        return OptimalWeights(theta_p, 1.0 - theta_p, 1e-4)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CollocationSolution:
    """Quadratic polynomial coefficients for position and both costates on
    one interval [t_k, t_k + T]; tau below is time since t_k."""

    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float
    c0: float
    c1: float
    c2: float
    T: float
    eta_m: float

    def position(self, tau):
        return self.a0 + self.a1 * tau + self.a2 * tau * tau

    def velocity(self, tau):
        return self.a1 + 2.0 * self.a2 * tau

    def costate1(self, tau):
        return self.b0 + self.b1 * tau + self.b2 * tau * tau

    def costate2(self, tau):
        return self.c0 + self.c1 * tau + self.c2 * tau * tau

    def control(self, tau):
        return -self.costate2(tau) / self.eta_m


@dataclass(frozen=True)
class ErrorBounds:
    """One-step terminal position/velocity error bounds plus internals."""

    pos_bound: float
    vel_bound: float
    N: float
    D: float
    L: float
    M: float
    P: float


def _drift(x, y, p):
    # damping written with alpha on x^2, matching the collocation derivation
    return (p.alpha * x * x + p.beta * y * y - p.gamma) * y + p.omega ** 2 * x


def build_collocation_system(state, r_p_hat, r_sigma_k, r_sigma_k1, w, p, T):
    """Assemble the 9x9 linear system pinning the quadratic ansatz for
    position and costates; unknowns ordered (a0,a1,a2,b0,b1,b2,c0,c1,c2)."""
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    x, y = state.x, state.y
    tp, ts, em = w.theta_p, w.theta_sigma, w.eta_m
    al, be, ga, w2 = p.alpha, p.beta, p.gamma, p.omega ** 2

    q = 2.0 * al * x * y + w2              # d(drift)/dx at t_k
    s = al * x * x + 3.0 * be * y * y - ga  # d(drift)/dy at t_k

    A = np.zeros((9, 9))
    B = np.zeros(9)
    # initial conditions pin a0, a1
    A[0, 0] = 1.0
    B[0] = x
    A[1, 1] = 1.0
    B[1] = y
    # terminal costate lambda1(T) = theta_p (x~(T) - r_p_hat)
    A[2, 0:3] = (tp, tp * T, tp * T * T)
    A[2, 3:6] = (-1.0, -T, -T * T)
    B[2] = tp * r_p_hat
    # terminal costate lambda2(T) = 0
    A[3, 6:9] = (1.0, T, T * T)
    # state equation at t_k: 2 a2 + eta_m^{-1} c0 = -drift
    A[4, 2] = 2.0
    A[4, 6] = 1.0 / em
    B[4] = -_drift(x, y, p)
    # costate-1 equation at t_k
    A[5, 4] = 1.0
    A[5, 6] = -q
    # costate-2 equation at t_k
    A[6, 3] = 1.0
    A[6, 6] = -s
    A[6, 7] = 1.0
    B[6] = -ts * (y - r_sigma_k)
    # costate-2 equation at t_{k+1}
    A[7, 0:3] = (tp, T * tp + ts, T * (T * tp + 2.0 * ts))
    A[7, 7] = 1.0
    A[7, 8] = 2.0 * T
    B[7] = tp * r_p_hat + ts * r_sigma_k1
    # costate-1 equation at t_{k+1}
    A[8, 4] = 1.0
    A[8, 5] = 2.0 * T
    return A, B


def solve_collocation(A, B, T=None, eta_m=None):
    """Dense partial-pivoting solve of the collocation system."""
    scale = np.prod(np.linalg.norm(A, axis=1))
    det = np.linalg.det(A)
    if scale == 0.0 or abs(det) < 1e-12 * scale:
        raise SingularSystemError(
            f"collocation matrix is singular (det={det}, scale={scale})")
    X = np.linalg.solve(A, B)
    if T is None:
        T = math.nan
    if eta_m is None:
        eta_m = 1.0 / A[4, 6] if A[4, 6] != 0.0 else math.nan
    return CollocationSolution(*X.tolist(), T=T, eta_m=eta_m)


def opc_step(state, ref, r_sigma_k, r_sigma_k1, w, p, T):
    """One receding-horizon interval: solve the collocation system and read
    the next state off the position polynomial.

    Returns (next_state, u_mid, solution); on a singular system falls back
    to u = 0 for the interval (solution None, fallback flagged via u_mid
    being None is avoided: the caller inspects ``solution``).
    """
    r_p_hat = ref.r_p_hat_next if hasattr(ref, "r_p_hat_next") else float(ref)
    A, B = build_collocation_system(
        state, r_p_hat, r_sigma_k, r_sigma_k1, w, p, T)
    try:
        sol = solve_collocation(A, B, T=T, eta_m=w.eta_m)
    except SingularSystemError:
        from .dynamics import hkb_step
        nxt = hkb_step(state, 0.0, p, T)
        return nxt, 0.0, None
    nxt = HkbState(sol.position(T), sol.velocity(T))
    return nxt, sol.control(0.5 * T), sol


def cost_functional(t, x_dot, u, x_end, r_p_hat_end, r_sigma, w):
    """Per-interval cost: terminal position error plus the running
    signature-similarity and control-effort terms (trapezoidal quadrature).

    ``t``, ``x_dot``, ``u`` and ``r_sigma`` are arrays sampled on the
    interval; ``x_end`` is the terminal position.
    """
    t = np.asarray(t, dtype=float)
    x_dot = np.asarray(x_dot, dtype=float)
    u = np.asarray(u, dtype=float)
    r_sigma = np.asarray(r_sigma, dtype=float)
    if not (len(t) == len(x_dot) == len(u) == len(r_sigma)):
        raise ValueError("trajectory arrays must share a length")
    integrand = w.theta_sigma * (x_dot - r_sigma) ** 2 + w.eta_m * u ** 2
    running = 0.5 * float(np.trapezoid(integrand, t))
    terminal = 0.5 * w.theta_p * (x_end - r_p_hat_end) ** 2
    return terminal + running


def one_step_error_bounds(state, r_p_hat, r_sigma_k, r_sigma_k1, w, p, T):
    """Closed-form bounds on the terminal position/velocity error of the
    collocation solution; both shrink as the corresponding weight
    approaches one and the control-effort weight approaches zero."""
    x, y = state.x, state.y
    tp, ts, em = w.theta_p, w.theta_sigma, w.eta_m
    al, be, ga, w2 = p.alpha, p.beta, p.gamma, p.omega ** 2

    f0 = _drift(x, y, p)
    L = (T * T * w2 / 2.0 + al * T * T * x * y + al * T * x * x
         + 3.0 * be * T * y * y - ga * T + 2.0)
    D = 2.0 * T * T * (tp * T + ts) + 2.0 * em * L
    if D == 0.0:
        raise ZeroDivisionError("degenerate bound denominator D = 0")
    N = (2.0 * T * ((0.5 * (r_sigma_k + r_sigma_k1) - y) * ts
                    + (r_p_hat - x - T * y) * tp)
         - em * L * f0)
    M = 2.0 * (x + T * y - r_p_hat) - T * T * f0
    P = y - r_sigma_k1 - T * f0

    pos_bound = (T * T * (1.0 - tp)
                 * abs(2.0 * (x - r_p_hat) + T * (r_sigma_k + r_sigma_k1))
                 / abs(D)
                 + em * abs(L * M) / abs(D))
    vel_bound = ((1.0 - ts) * 2.0 * T * T
                 * abs(T * (y - r_sigma_k1) + 2.0 * (r_p_hat - x - T * y))
                 / abs(D)
                 + ts * 2.0 * T * T * abs(r_sigma_k - y) / abs(D)
                 + 2.0 * em * abs(L * P) / abs(D))
    return ErrorBounds(pos_bound, vel_bound, N, D, L, M, P)


def _linear_optimal_control(state, r_p_hat, r_sigma_k, r_sigma_k1, w, lp, T,
                            n_grid=400):
    """Exact-optimal control for the linear plant on one interval.

    Single shooting on the initial costate: the costate-to-terminal map is
    affine for a linear plant, so two unit-vector integrations plus one base
    integration determine it exactly (up to RK4 error on a fine grid).
    Returns (t, x, y, u) arrays.
    """
    a, b = lp.a_lin, lp.b_lin
    tp, ts, em = w.theta_p, w.theta_sigma, w.eta_m

    def rhs(tau, z):
        x, y, l1, l2 = z
        rs = r_sigma_k + (r_sigma_k1 - r_sigma_k) * (tau / T)
        u = -l2 / em
        return np.array([
            y,
            -a * y - b * x + u,
            b * l2,
            -l1 + a * l2 - ts * (y - rs),
        ])

    def integrate(l0):
        z = np.array([state.x, state.y, l0[0], l0[1]])
        h = T / n_grid
        traj = np.empty((n_grid + 1, 4))
        traj[0] = z
        tau = 0.0
        for i in range(n_grid):
            k1 = rhs(tau, z)
            k2 = rhs(tau + 0.5 * h, z + 0.5 * h * k1)
            k3 = rhs(tau + 0.5 * h, z + 0.5 * h * k2)
            k4 = rhs(tau + h, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            tau += h
            traj[i + 1] = z
        return traj

    def residual(traj):
        x_T, _, l1_T, l2_T = traj[-1]
        return np.array([l1_T - tp * (x_T - r_p_hat), l2_T])

    base = integrate(np.zeros(2))
    r0 = residual(base)
    J = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = 1.0
        J[:, j] = residual(integrate(e)) - r0
    l0 = np.linalg.solve(J, -r0)
    traj = integrate(l0)
    t = np.linspace(0.0, T, n_grid + 1)
    u = -traj[:, 3] / em
    return t, traj[:, 0], traj[:, 1], u


def _simulate_linear(state, t, u, lp):
    """RK4 simulation of the linear plant under a sampled control profile
    (linear interpolation between grid points). Returns (x, y) arrays."""
    a, b = lp.a_lin, lp.b_lin
    n = len(t) - 1
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    x, y = state.x, state.y
    xs[0], ys[0] = x, y
    for i in range(n):
        h = t[i + 1] - t[i]
        u0, u1 = u[i], u[i + 1]
        um = 0.5 * (u0 + u1)

        def f(x_, y_, uc):
            return y_, -a * y_ - b * x_ + uc

        k1 = f(x, y, u0)
        k2 = f(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], um)
        k3 = f(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], um)
        k4 = f(x + h * k3[0], y + h * k3[1], u1)
        x += (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        xs[i + 1], ys[i + 1] = x, y
    return xs, ys


def perturbation_check(state, r_p_hat, r_sigma_k, r_sigma_k1, w, lp, T,
                       n_perturbations=100, amplitude=0.1, seed=0,
                       slack=1e-9):
    """Second-variation check on the linear plant: no bounded piecewise-
    linear control perturbation may decrease the per-interval cost.

    Returns (all_passed, J_optimal, worst_margin) where worst_margin is the
    most negative J(u* + du) - J(u*) observed.
    """
    t, _, _, u_star = _linear_optimal_control(
        state, r_p_hat, r_sigma_k, r_sigma_k1, w, lp, T)
    r_sigma = r_sigma_k + (r_sigma_k1 - r_sigma_k) * (t / T)

    def evaluate(u_profile):
        xs, ys = _simulate_linear(state, t, u_profile, lp)
        return cost_functional(t, ys, u_profile, xs[-1], r_p_hat, r_sigma, w)

    J_star = evaluate(u_star)
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    n_nodes = 7
    node_t = np.linspace(0.0, T, n_nodes)
    for _ in range(n_perturbations):
        nodes = rng.uniform(-amplitude, amplitude, n_nodes)
        du = np.interp(t, node_t, nodes)
        margin = evaluate(u_star + du) - J_star
        worst = min(worst, margin)
        if margin < -slack:
            ok = False
    return ok, J_star, worst
