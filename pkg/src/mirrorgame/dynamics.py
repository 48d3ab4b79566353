"""End-effector dynamics: the HKB oscillator, its coupled two-oscillator
form, a linear damped oscillator, fixed-step integration and the
limit-cycle region construction used by the boundedness argument.

All steppers are deterministic pure functions: identical inputs produce
bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAIN_ARENA_HALF = 0.5  # normalized arena is [-0.5, 0.5]


class DivergenceError(RuntimeError):
    """Integration produced a non-finite state.

    Carries the last finite state seen before the blow-up.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NoLimitCycleError(ValueError):
    """The limit-cycle region construction has no valid radii
    (a radicand gamma/alpha or gamma/beta is non-positive)."""


def _require_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {values!r}")


@dataclass(frozen=True)
class HkbParams:
    """Coefficients of the HKB end-effector oscillator."""

    alpha: float
    beta: float
    gamma: float
    omega: float

    def __post_init__(self):
        _require_finite(self.alpha, self.beta, self.gamma, self.omega)
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class HkbState:
    """Position and velocity of the end effector."""

    x: float
    y: float

    def __post_init__(self):
        _require_finite(self.x, self.y)


@dataclass(frozen=True)
class CoupledHkbState:
    """Positions and velocities of the two mutually coupled oscillators."""

    z: float
    z_dot: float
    w: float
    w_dot: float

    def __post_init__(self):
        _require_finite(self.z, self.z_dot, self.w, self.w_dot)


@dataclass(frozen=True)
class LinearParams:
    """Damping and stiffness of the linear oscillator xdd + a*xd + b*x = u."""

    a_lin: float
    b_lin: float

    def __post_init__(self):
        _require_finite(self.a_lin, self.b_lin)


@dataclass(frozen=True)
class LimitCycleRegion:
    """Ring between the energy levels c1 <= V <= c2 that traps the
    uncontrolled oscillator's limit cycle."""

    r_min: float
    r_max: float
    c1: float
    c2: float
    degenerate: bool = False


def _damping(x, y, p, swap_damping):
    # Standard form weights alpha by the velocity squared; the swapped form
    # (used by the limit-cycle analysis) weights alpha by the position squared.
    if swap_damping:
        return p.alpha * x * x + p.beta * y * y - p.gamma
    return p.alpha * y * y + p.beta * x * x - p.gamma


def hkb_derivative(state, u, p, swap_damping=False):
    """Right-hand side of the controlled HKB oscillator.

    Returns an ``HkbState`` holding (dx/dt, dy/dt).
    """
    _require_finite(state.x, state.y, u)
    dy = -_damping(state.x, state.y, p, swap_damping) * state.y \
        - p.omega ** 2 * state.x + u
    return HkbState(state.y, dy)


def _rk4_scalar2(f, x, y, dt, n_sub):
    """Classical RK4 on a 2-state system given f(x, y) -> (dx, dy)."""
    h = dt / n_sub
    for _ in range(n_sub):
        k1x, k1y = f(x, y)
        k2x, k2y = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y)
        k3x, k3y = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y)
        k4x, k4y = f(x + h * k3x, y + h * k3y)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return x, y


def _substeps(dt, max_substep):
    if max_substep is None:
        return 10
    return max(1, math.ceil(dt / max_substep - 1e-12))


def hkb_step(state, u, p, dt, *, method="rk4", swap_damping=False,
             max_substep=None):
    """Advance the HKB state by ``dt`` under piecewise-constant control.

    Uses classical RK4 with an internal substep <= dt/10 by default;
    ``method="euler"`` selects forward Euler with the same substepping.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    _require_finite(state.x, state.y, u)

    a, b, g, w2 = p.alpha, p.beta, p.gamma, p.omega ** 2

    if swap_damping:
        def f(x, y):
            return y, -(a * x * x + b * y * y - g) * y - w2 * x + u
    else:
        def f(x, y):
            return y, -(a * y * y + b * x * x - g) * y - w2 * x + u

    n = _substeps(dt, max_substep)
    x, y = state.x, state.y
    if method == "rk4":
        x, y = _rk4_scalar2(f, x, y, dt, n)
    elif method == "euler":
        h = dt / n
        for _ in range(n):
            dx, dy = f(x, y)
            x, y = x + h * dx, y + h * dy
    else:
        raise ValueError(f"unknown method {method!r}")

    if not (math.isfinite(x) and math.isfinite(y)):
        raise DivergenceError(
            f"HKB integration diverged (dt={dt}, u={u})", last_state=state)
    return HkbState(x, y)


def coupled_hkb_step(state, p, a, b, dt, *, max_substep=None):
    """Advance the two mutually coupled HKB oscillators by ``dt`` with RK4.

    Each oscillator is driven by [a + b*(z-w)^2]*(zd - wd) with the roles
    of the two swapped.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    _require_finite(state.z, state.z_dot, state.w, state.w_dot, a, b)

    al, be, g, w2 = p.alpha, p.beta, p.gamma, p.omega ** 2

    def f(s):
        z, zd, w, wd = s
        czw = (a + b * (z - w) ** 2) * (zd - wd)
        cwz = (a + b * (w - z) ** 2) * (wd - zd)
        dzd = -(al * zd * zd + be * z * z - g) * zd - w2 * z + czw
        dwd = -(al * wd * wd + be * w * w - g) * wd - w2 * w + cwz
        return np.array([zd, dzd, wd, dwd])

    n = _substeps(dt, max_substep)
    h = dt / n
    s = np.array([state.z, state.z_dot, state.w, state.w_dot])
    for _ in range(n):
        k1 = f(s)
        k2 = f(s + 0.5 * h * k1)
        k3 = f(s + 0.5 * h * k2)
        k4 = f(s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    if not np.all(np.isfinite(s)):
        raise DivergenceError("coupled HKB integration diverged",
                              last_state=state)
    return CoupledHkbState(*s.tolist())


def orbit_energy(state, p):
    """Energy-like level V = (omega^2 x^2 + y^2) / 2 of an HKB state."""
    return 0.5 * (p.omega ** 2 * state.x ** 2 + state.y ** 2)


def limit_cycle_region(p):
    """Construct the ring c1 <= V <= c2 trapping the uncontrolled limit cycle.

    Requires both radicands gamma/alpha and gamma/beta to be positive; the
    adaptive experiments' gamma = -1 plant has no such region, which is an
    expected error, not a defect.
    """
    ra = p.gamma / p.alpha
    rb = p.gamma / p.beta
    if ra <= 0 or rb <= 0:
        raise NoLimitCycleError(
            f"no limit-cycle region: gamma/alpha={ra}, gamma/beta={rb}")
    r_lo = math.sqrt(min(ra, rb))
    r_hi = math.sqrt(max(ra, rb))
    w2 = p.omega ** 2
    # r_min = max(sqrt(2 c1 / omega^2), sqrt(2 c1)) inverted for c1;
    # r_max = min(sqrt(2 c2 / omega^2), sqrt(2 c2)) inverted for c2.
    c1 = 0.5 * r_lo ** 2 * min(1.0, w2)
    c2 = 0.5 * r_hi ** 2 * max(1.0, w2)
    return LimitCycleRegion(r_lo, r_hi, c1, c2, degenerate=(r_lo == r_hi))


def linear_step(state, u, p, dt, *, max_substep=None):
    """Advance the linear oscillator xdd + a_lin*xd + b_lin*x = u with RK4."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    _require_finite(state.x, state.y, u)

    a, b = p.a_lin, p.b_lin

    def f(x, y):
        return y, -a * y - b * x + u

    n = _substeps(dt, max_substep)
    x, y = _rk4_scalar2(f, state.x, state.y, dt, n)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DivergenceError("linear integration diverged", last_state=state)
    return HkbState(x, y)


def linear_exact_step(state, u, p, dt):
    """Closed-form matrix-exponential solution of the linear oscillator.

    Solves the affine system exactly by exponentiating the augmented
    matrix; serves as the analytic oracle for ``linear_step``.
    """
    from scipy.linalg import expm

    M = np.array([
        [0.0, 1.0, 0.0],
        [-p.b_lin, -p.a_lin, u],
        [0.0, 0.0, 0.0],
    ])
    phi = expm(M * dt)
    v = phi @ np.array([state.x, state.y, 1.0])
    return HkbState(float(v[0]), float(v[1]))
