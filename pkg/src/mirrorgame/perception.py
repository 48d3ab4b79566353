"""Sampled acquisition of the partner's position: low-pass filtering,
velocity estimation by first differences and one-interval-ahead position
prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

ARENA_HALF = 0.5
ARENA_LENGTH = 1.0


@dataclass(frozen=True)
class FilterState:
    """State of the first-order exponential smoother."""

    y_prev: float = 0.0
    alpha_f: float = 0.6

    def __post_init__(self):
        if not (0.0 < self.alpha_f <= 1.0):
            raise ValueError(f"alpha_f must be in (0, 1], got {self.alpha_f}")


@dataclass(frozen=True)
class ReferenceSample:
    """Partner reference at one tick: position, estimated velocity and the
    predicted position at the next tick."""

    t: float
    r_p: float
    r_v_hat: float
    r_p_hat_next: float


def low_pass(fs, sample):
    """One step of the exponential smoother; returns (new state, output)."""
    if not math.isfinite(sample):
        raise ValueError(f"non-finite filter input {sample}")
    y = fs.alpha_f * sample + (1.0 - fs.alpha_f) * fs.y_prev
    return replace(fs, y_prev=y), y


def estimate_velocity(r_p_prev, r_p_cur, T):
    """First-difference velocity estimate, held constant over the interval."""
    if T <= 0:
        raise ValueError(f"sampling period must be positive, got {T}")
    return (r_p_cur - r_p_prev) / T


def predict_position(r_p_k, r_v_hat, dt_into_interval):
    """Linear extrapolation of the partner position within the interval."""
    if dt_into_interval < 0:
        raise ValueError(f"dt must be non-negative, got {dt_into_interval}")
    return r_p_k + r_v_hat * dt_into_interval


class PerceptionPipeline:
    """Per-session acquisition pipeline: clamp, filter, difference, predict.

    Out-of-range positions are clamped to the arena and counted; a missing
    tick holds the previous position with zero estimated velocity and is
    counted as a dropout. Velocity is estimated from filtered positions.
    """

    def __init__(self, T, alpha_f=0.6):
        if T <= 0:
            raise ValueError(f"sampling period must be positive, got {T}")
        self.T = T
        self.filter = FilterState(alpha_f=alpha_f)
        self.clamp_count = 0
        self.dropout_count = 0
        self._prev_filtered = None
        self._last_sample = None
        self.last_raw = 0.0   # clamped raw position of the latest tick

    def tick(self, t, raw_position):
        """Consume the sample for tick time ``t`` (None = no sample arrived)
        and return the ``ReferenceSample`` for the coming interval."""
        if raw_position is None:
            self.dropout_count += 1
            held = self._last_sample.r_p if self._last_sample else 0.0
            sample = ReferenceSample(t, held, 0.0, held)
            self._last_sample = sample
            return sample

        if not math.isfinite(raw_position):
            raise ValueError(f"non-finite position sample {raw_position}")
        pos = raw_position
        if abs(pos) > ARENA_HALF:
            pos = math.copysign(ARENA_HALF, pos)
            self.clamp_count += 1
        self.last_raw = pos

        if self._prev_filtered is None:
            # Seed the smoother so the first output equals the first sample.
            self.filter = replace(self.filter, y_prev=pos)
        self.filter, filtered = low_pass(self.filter, pos)

        if self._prev_filtered is None:
            r_v_hat = 0.0
        else:
            r_v_hat = estimate_velocity(self._prev_filtered, filtered, self.T)
        self._prev_filtered = filtered

        sample = ReferenceSample(
            t, filtered, r_v_hat, predict_position(filtered, r_v_hat, self.T))
        self._last_sample = sample
        return sample
