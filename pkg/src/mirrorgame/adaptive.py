"""Adaptive feedback controller: the two-term control law, the adaptive
coupling laws, energy diagnostics and the tracking-bound machinery.

Within each sampling interval the controller and plant form a coupled
4-state ODE (x, y, a, b) that is integrated continuously with the
estimated reference velocity held constant; along that flow the energy
E decays exactly at rate 2*eta_a while the gains are unsaturated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DivergenceError, HkbParams, HkbState

GAIN_LIMIT = 10.0  # e^{-2a} explodes for very negative a; clamp keeps the
                   # stiff adaptive laws integrable (saturation is flagged)


@dataclass(frozen=True)
class AdaptiveConfig:
    """Constants of the adaptive controller."""

    C_p: float = 40.0
    delta: float = 0.25
    eta_a: float = 30.0
    T: float = 0.1

    def __post_init__(self):
        if self.C_p <= 0:
            raise ValueError(f"C_p must be positive, got {self.C_p}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.T <= 0:
            raise ValueError(f"T must be positive, got {self.T}")
        ok, threshold = check_eta_condition(self.eta_a, self.T)
        if not ok:
            raise ValueError(
                f"eta_a={self.eta_a} violates eta_a > ln2/(2T) = {threshold}")


@dataclass(frozen=True)
class AdaptiveGains:
    """Time-varying couplings of the control law."""

    a: float = -5.0
    b: float = -5.0
    saturated_a: bool = False
    saturated_b: bool = False

    @property
    def saturated(self):
        return self.saturated_a or self.saturated_b


@dataclass(frozen=True)
class EnergyDiagnostics:
    E: float
    E0: float
    epsilon: float
    bound_pos: float


def afc_control(state, ref, gains, cfg):
    """Two-term control law: coordination coupling plus a gated position
    correction that takes over as the velocity mismatch vanishes."""
    e_x = state.x - ref.r_p
    e_v = state.y - ref.r_v_hat
    return _control(e_x, e_v, gains.a, gains.b, cfg.C_p, cfg.delta)


def _control(e_x, e_v, a, b, C_p, delta):
    if not all(map(math.isfinite, (e_x, e_v, a, b))):
        raise ValueError("non-finite control input")
    return (a + b * e_x * e_x) * e_v - C_p * math.exp(-delta * e_v * e_v) * e_x


def _clamp_gain(g):
    return min(max(g, -GAIN_LIMIT), GAIN_LIMIT)


def _gain_rates(a, b, x, y, r_p, r_v, u, p, eta_a):
    # evaluate at the projection onto the saturation box so intermediate
    # integrator stages cannot blow up the e^{-2a} factor
    a = _clamp_gain(a)
    b = _clamp_gain(b)
    e_x = x - r_p
    e_v = y - r_v
    da = -math.exp(-2.0 * a) * (e_x * e_v + eta_a * e_x * e_x) - eta_a
    db = math.exp(-2.0 * b) * e_v * (
        p.omega ** 2 * x + (p.alpha * y * y + p.beta * x * x - p.gamma) * y
        - eta_a * e_v - u) - eta_a
    return da, db


def update_gains(gains, state, ref, u, p, cfg, dt):
    """Integrate the adaptive laws over ``dt`` with the plant state, the
    reference and the control held frozen.

    RK4 with substeps <= T/20 (the laws are stiffer than the plant); the
    result is clamped to [-GAIN_LIMIT, GAIN_LIMIT] with saturation flags.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x, y, r_p, r_v = state.x, state.y, ref.r_p, ref.r_v_hat
    n = max(1, math.ceil(dt / (cfg.T / 20.0) - 1e-12))
    h = dt / n
    a, b = gains.a, gains.b

    def f(a_, b_):
        return _gain_rates(a_, b_, x, y, r_p, r_v, u, p, cfg.eta_a)

    for _ in range(n):
        k1a, k1b = f(a, b)
        k2a, k2b = f(a + 0.5 * h * k1a, b + 0.5 * h * k1b)
        k3a, k3b = f(a + 0.5 * h * k2a, b + 0.5 * h * k2b)
        k4a, k4b = f(a + h * k3a, b + h * k3b)
        a = a + (h / 6.0) * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + (h / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)

    if not (math.isfinite(a) and math.isfinite(b)):
        # divergence before the clamp: hold previous gains
        return AdaptiveGains(gains.a, gains.b, True, True)
    sat_a = abs(a) > GAIN_LIMIT
    sat_b = abs(b) > GAIN_LIMIT
    a = min(max(a, -GAIN_LIMIT), GAIN_LIMIT)
    b = min(max(b, -GAIN_LIMIT), GAIN_LIMIT)
    return AdaptiveGains(a, b, sat_a, sat_b)


def energy(state, ref, gains):
    """Energy-like value E = [(x-r_p)^2 + (y-r_v)^2 + e^{2a} + e^{2b}] / 2."""
    e_x = state.x - ref.r_p
    e_v = state.y - ref.r_v_hat
    return 0.5 * (e_x * e_x + e_v * e_v
                  + math.exp(2.0 * gains.a) + math.exp(2.0 * gains.b))


def check_eta_condition(eta_a, T):
    """Strict adaptation-rate condition eta_a > ln2/(2T)."""
    threshold = math.log(2.0) / (2.0 * T)
    return eta_a > threshold, threshold


def tracking_bound(E0, epsilon, eta_a, T):
    """Closed-form uniform bound on |x(t) - r_p(t)|."""
    ok, threshold = check_eta_condition(eta_a, T)
    if not ok:
        raise ValueError(
            f"tracking bound needs eta_a > {threshold}, got {eta_a}")
    if E0 < 0 or epsilon < 0:
        raise ValueError("E0 and epsilon must be non-negative")
    g = math.exp(eta_a * T)
    return g * math.sqrt(2.0 * epsilon / (g * g - 2.0)) + 2.0 / g * math.sqrt(E0)


def epsilon_bound(l, T):
    """Conservative arena-geometry bound on the velocity-jump term."""
    if l < 0 or T <= 0:
        raise ValueError("need l >= 0 and T > 0")
    return 4.0 * l * l * (1.0 + T * T) / (T * T)


class AfcController:
    """Stateful per-session adaptive controller.

    ``step`` advances the coupled plant-plus-gains system over one sampling
    interval with RK4 substeps <= T/20, computing the control continuously
    from the current state while holding the reference constant. Gains are
    clamped at each substep. Optionally records fine-grained (t, E,
    saturated) samples for energy-decay diagnostics.
    """

    def __init__(self, plant, cfg=None, gains=None, record_energy=False):
        self.plant = plant if plant is not None else HkbParams(10, 20, -1, 0.1)
        self.cfg = cfg if cfg is not None else AdaptiveConfig()
        self.gains = gains if gains is not None else AdaptiveGains()
        self.record_energy = record_energy
        self.energy_samples = []          # (t, E, saturated)
        self.epsilon_measured = 0.0       # running sup of (T^2+1) dv^2
        self._prev_r_v = None
        self.E0 = None

    def _note_reference(self, ref):
        if self._prev_r_v is not None:
            dv = ref.r_v_hat - self._prev_r_v
            cand = (self.cfg.T ** 2 + 1.0) * dv * dv
            if cand > self.epsilon_measured:
                self.epsilon_measured = cand
        self._prev_r_v = ref.r_v_hat

    def step(self, state, ref, t, dt=None):
        """Advance (x, y, a, b) over [t, t+dt]; returns (state, u_at_start)."""
        cfg, p = self.cfg, self.plant
        dt = cfg.T if dt is None else dt
        self._note_reference(ref)
        if self.E0 is None:
            self.E0 = energy(state, ref, self.gains)

        r_p, r_v = ref.r_p, ref.r_v_hat
        al, be, g, w2 = p.alpha, p.beta, p.gamma, p.omega ** 2
        eta = cfg.eta_a
        C_p, delta = cfg.C_p, cfg.delta

        def f(x, y, a, b):
            # projection keeps e^{-2a}/e^{-2b} bounded for integrator stages
            a = _clamp_gain(a)
            b = _clamp_gain(b)
            e_x = x - r_p
            e_v = y - r_v
            u = (a + b * e_x * e_x) * e_v \
                - C_p * math.exp(-delta * e_v * e_v) * e_x
            dy = -(al * y * y + be * x * x - g) * y - w2 * x + u
            da = -math.exp(-2.0 * a) * (e_x * e_v + eta * e_x * e_x) - eta
            db = math.exp(-2.0 * b) * e_v * (
                w2 * x + (al * y * y + be * x * x - g) * y - eta * e_v - u) \
                - eta
            return y, dy, da, db

        n = max(1, math.ceil(dt / (cfg.T / 20.0) - 1e-12))
        h = dt / n
        x, y = state.x, state.y
        a, b = self.gains.a, self.gains.b
        u0 = _control(x - r_p, y - r_v, a, b, C_p, delta)
        sat_a = sat_b = False
        for i in range(n):
            k1 = f(x, y, a, b)
            k2 = f(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1],
                   a + 0.5 * h * k1[2], b + 0.5 * h * k1[3])
            k3 = f(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1],
                   a + 0.5 * h * k2[2], b + 0.5 * h * k2[3])
            k4 = f(x + h * k3[0], y + h * k3[1],
                   a + h * k3[2], b + h * k3[3])
            x += (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y += (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            a += (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            b += (h / 6.0) * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
            if not all(map(math.isfinite, (x, y, a, b))):
                raise DivergenceError(
                    "adaptive step diverged", last_state=HkbState(state.x, state.y))
            if abs(a) > GAIN_LIMIT:
                a = math.copysign(GAIN_LIMIT, a)
                sat_a = True
            if abs(b) > GAIN_LIMIT:
                b = math.copysign(GAIN_LIMIT, b)
                sat_b = True
            if self.record_energy:
                e_x, e_v = x - r_p, y - r_v
                E = 0.5 * (e_x * e_x + e_v * e_v
                           + math.exp(2 * a) + math.exp(2 * b))
                self.energy_samples.append(
                    (t + (i + 1) * h, E, sat_a or sat_b))

        self.gains = AdaptiveGains(a, b, sat_a, sat_b)
        new_state = HkbState(x, y)
        return new_state, u0

    def diagnostics(self, state, ref):
        E = energy(state, ref, self.gains)
        E0 = self.E0 if self.E0 is not None else E
        bound = tracking_bound(E0, self.epsilon_measured,
                               self.cfg.eta_a, self.cfg.T)
        return EnergyDiagnostics(E, E0, self.epsilon_measured, bound)
