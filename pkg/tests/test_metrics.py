"""Temporal-correspondence indexes between two position traces."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference
from mirrorgame.metrics import (
    InsufficientDataError,
    Trace,
    circular_variance,
    compute_report,
    interior,
    relative_phase,
    rms,
    rpe,
    time_lag,
)


def sinusoid(freq, duration, T, phase=0.0, amp=1.0):
    t = np.arange(0.0, duration, T)
    return Trace(t, amp * np.sin(2.0 * math.pi * freq * t + phase))


class TestTrace:
    def test_rejects_non_uniform_grid(self):
        with pytest.raises(ValueError):
            Trace(np.array([0.0, 0.1, 0.3]), np.zeros(3))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            Trace(np.array([0.0, 0.1]), np.zeros(3))

    def test_velocities_default_to_differences(self):
        tr = Trace(np.array([0.0, 0.1, 0.2]), np.array([0.0, 0.1, 0.2]))
        assert np.allclose(tr.velocities(), 1.0)


class TestRms:
    def test_identical_traces(self):
        tr = sinusoid(0.25, 10.0, 0.1)
        assert rms(tr, tr) == 0.0

    def test_constant_offset(self):
        tr = sinusoid(0.25, 10.0, 0.1)
        shifted = Trace(tr.t, tr.x + 0.2)
        assert rms(tr, shifted) == pytest.approx(0.2)

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_matches_two_pass_oracle(self, seed):
        rng = np.random.default_rng(seed)
        t = np.arange(50) * 0.1
        a = Trace(t, rng.uniform(-0.5, 0.5, 50))
        b = Trace(t, rng.uniform(-0.5, 0.5, 50))
        assert rms(a, b) == pytest.approx(
            reference.rms_two_pass(a.x, b.x), abs=1e-12)


class TestRpe:
    def test_same_direction_leader_ahead_is_positive(self):
        t = np.arange(10) * 0.1
        leader = Trace(t, 0.1 * t + 0.05, np.full(10, 0.1))
        follower = Trace(t, 0.1 * t, np.full(10, 0.1))
        series, mean = rpe(leader, follower)
        assert np.all(series > 0)
        assert mean == pytest.approx(0.05)

    def test_opposite_directions_use_absolute_error(self):
        t = np.arange(10) * 0.1
        leader = Trace(t, np.full(10, 0.1), np.full(10, 1.0))
        follower = Trace(t, np.full(10, -0.1), np.full(10, -1.0))
        series, mean = rpe(leader, follower)
        assert mean == pytest.approx(0.2)
        # flipping the roles keeps the absolute branch value
        _, mean_flipped = rpe(follower, leader)
        assert mean_flipped == pytest.approx(0.2)

    def test_zero_velocity_falls_back_to_absolute(self):
        t = np.arange(10) * 0.1
        leader = Trace(t, np.full(10, -0.3), np.zeros(10))
        follower = Trace(t, np.zeros(10), np.full(10, 1.0))
        _, mean = rpe(leader, follower)
        assert mean == pytest.approx(0.3)


class TestCircularVariance:
    def test_equal_phases_lock(self):
        assert circular_variance(np.full(100, 0.7)) == pytest.approx(1.0)

    def test_roots_of_unity_cancel(self):
        n = 8
        ph = 2.0 * math.pi * np.arange(n) / n
        assert circular_variance(ph) == pytest.approx(0.0, abs=1e-12)

    def test_two_cluster_value(self):
        ph = np.concatenate([np.zeros(50), np.full(50, math.pi / 2.0)])
        assert circular_variance(ph) == pytest.approx(math.sqrt(2.0) / 2.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            circular_variance([])


class TestTimeLag:
    def test_identical_traces_have_zero_lag(self):
        tr = sinusoid(0.25, 40.0, 0.03)
        assert time_lag(tr, tr, 5.0) == 0.0

    def test_constructed_shift_recovered(self):
        T = 0.03
        t = np.arange(0.0, 60.0, T)
        w = 2.0 * math.pi * 0.25
        x1 = Trace(t, np.sin(w * t))
        x2 = Trace(t, np.sin(w * (t - 0.3)))
        lag = time_lag(x1, x2, 5.0)
        assert abs(lag - 0.3) <= T + 1e-12

    def test_anti_correlated_pair_at_half_period(self):
        T = 0.03
        t = np.arange(0.0, 40.0, T)
        w = 2.0 * math.pi * 0.25
        x1 = Trace(t, np.sin(w * t))
        x2 = Trace(t, -np.sin(w * t))
        lag = time_lag(x1, x2, 5.0)
        assert abs(abs(lag) - 2.0) <= T + 1e-12

    def test_lag_window_capped_at_quarter_duration(self):
        tr = sinusoid(0.25, 10.0, 0.1)
        with pytest.raises(ValueError):
            time_lag(tr, tr, 5.0)


class TestRelativePhase:
    def test_identical_signals_have_zero_phase(self):
        tr = sinusoid(0.25, 40.0, 0.03)
        ph = interior(relative_phase(tr, tr))
        assert np.max(np.abs(ph)) < 1e-6

    def test_quarter_pi_shift_recovered(self):
        T = 0.03
        t = np.arange(0.0, 40.0, T)
        w = 2.0 * math.pi * 0.25
        x1 = Trace(t, np.sin(w * t))
        x2 = Trace(t, np.sin(w * t - math.pi / 4.0))
        ph = interior(relative_phase(x1, x2))
        assert np.all(np.abs(ph - math.pi / 4.0) < 0.05)

    def test_antisymmetric_under_swap(self):
        a = sinusoid(0.25, 40.0, 0.03)
        b = sinusoid(0.25, 40.0, 0.03, phase=0.4)
        assert np.allclose(relative_phase(a, b), -relative_phase(b, a),
                           atol=1e-12)

    def test_wrapped_into_half_open_interval(self):
        a = sinusoid(0.25, 40.0, 0.03)
        b = sinusoid(0.25, 40.0, 0.03, phase=3.0)
        ph = relative_phase(a, b)
        assert np.all(ph > -math.pi - 1e-12)
        assert np.all(ph <= math.pi + 1e-12)

    def test_short_traces_rejected(self):
        tr = sinusoid(0.25, 1.0, 0.1)
        with pytest.raises(InsufficientDataError):
            relative_phase(tr, tr)


class TestReport:
    def test_full_report_on_shifted_sinusoids(self):
        T = 0.03
        t = np.arange(0.0, 60.0, T)
        w = 2.0 * math.pi * 0.25
        leader = Trace(t, 0.4 * np.sin(w * t))
        follower = Trace(t, 0.4 * np.sin(w * (t - 0.3)))
        rep = compute_report(leader, follower)
        assert rep.cv > 0.99
        assert abs(rep.tl_seconds - 0.3) <= T + 1e-12
        assert rep.rms == pytest.approx(rms(leader, follower))
