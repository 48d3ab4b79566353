"""Comparison models: the reactive-predictive controller (sinusoid-bank
feedforward plus a velocity-error integral term) and the fixed-coupling
HKB follower."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DivergenceError, HkbState, hkb_step


@dataclass(frozen=True)
class RpcParams:
    """Fixed frequencies, amplitude adaptation rate and velocity gain."""

    omega: tuple = (0.025, 0.05, 0.075, 0.1, 0.125)
    lam: float = 0.01
    k: float = 30.0


@dataclass(frozen=True)
class RpcState:
    """Avatar position/velocity, integral correction and the five adaptive
    amplitudes (all zero at start)."""

    x: float = 0.0
    x_dot: float = 0.0
    f: float = 0.0
    A: tuple = (0.0, 0.0, 0.0, 0.0, 0.0)


def rpc_step(state, r_v_hat, p, t, dt, max_substep=None):
    """Advance the reactive-predictive avatar by ``dt`` with RK4.

    xdd = sum_i A_i w_i cos(w_i t) + f, with f integrating the velocity
    error and the amplitudes adapted against the sinusoid bank.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    w = np.asarray(p.omega)
    n_sub = 10 if max_substep is None else max(1, math.ceil(dt / max_substep - 1e-12))
    h = dt / n_sub

    def f_rhs(tau, s):
        x, xd, fi = s[0], s[1], s[2]
        A = s[3:]
        sin_wt = np.sin(w * tau)
        xdd = float(np.dot(A, w * np.cos(w * tau))) + fi
        dfi = p.k * (r_v_hat - xd)
        dA = p.lam * (r_v_hat - float(np.dot(A, sin_wt))) * sin_wt
        return np.concatenate(([xd, xdd, dfi], dA))

    s = np.concatenate(([state.x, state.x_dot, state.f], state.A))
    tau = t
    for _ in range(n_sub):
        k1 = f_rhs(tau, s)
        k2 = f_rhs(tau + 0.5 * h, s + 0.5 * h * k1)
        k3 = f_rhs(tau + 0.5 * h, s + 0.5 * h * k2)
        k4 = f_rhs(tau + h, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        tau += h

    if not np.all(np.isfinite(s)):
        raise DivergenceError("RPC integration diverged", last_state=state)
    return RpcState(float(s[0]), float(s[1]), float(s[2]), tuple(s[3:].tolist()))


def hkb_fixed_follower_step(state, ref, a, b, p, dt):
    """HKB follower with constant couplings: the coordination coupling term
    applied as the control input, then one plant step."""
    e_x = state.x - ref.r_p
    e_v = state.y - ref.r_v_hat
    u = (a + b * e_x * e_x) * e_v
    return hkb_step(state, u, p, dt), u
