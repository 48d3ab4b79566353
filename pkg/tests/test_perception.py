"""Partner-position acquisition: smoothing, differencing, prediction."""

import math

import pytest

from mirrorgame.perception import (
    ARENA_HALF,
    FilterState,
    PerceptionPipeline,
    estimate_velocity,
    low_pass,
    predict_position,
)


class TestLowPass:
    def test_unit_coefficient_is_passthrough(self):
        fs = FilterState(y_prev=0.3, alpha_f=1.0)
        _, y = low_pass(fs, 0.77)
        assert y == 0.77

    def test_constant_input_fixed_point(self):
        fs = FilterState(alpha_f=0.5)
        for _ in range(200):
            fs, y = low_pass(fs, 0.42)
        assert abs(y - 0.42) < 1e-9

    def test_step_response_sequence(self):
        fs = FilterState(y_prev=0.0, alpha_f=0.5)
        outs = []
        for _ in range(3):
            fs, y = low_pass(fs, 1.0)
            outs.append(y)
        assert outs == [0.5, 0.75, 0.875]

    def test_invalid_coefficient_rejected(self):
        with pytest.raises(ValueError):
            FilterState(alpha_f=0.0)
        with pytest.raises(ValueError):
            FilterState(alpha_f=1.5)

    def test_non_finite_input_rejected(self):
        with pytest.raises(ValueError):
            low_pass(FilterState(), math.inf)


class TestVelocityEstimate:
    def test_generic_value(self):
        assert estimate_velocity(0.1, 0.3, 0.1) == pytest.approx(2.0)

    def test_equal_positions(self):
        assert estimate_velocity(0.25, 0.25, 0.1) == 0.0

    def test_full_arena_jump_saturates_speed_limit(self):
        # a jump across the whole unit arena in one tick gives the extreme
        # estimate, magnitude (arena length) / T
        v = estimate_velocity(0.5, -0.5, 0.1)
        assert v == pytest.approx(-10.0)
        assert abs(v) == pytest.approx(1.0 / 0.1)

    def test_non_positive_period_rejected(self):
        with pytest.raises(ValueError):
            estimate_velocity(0.0, 0.1, 0.0)


class TestPrediction:
    def test_zero_horizon_is_identity(self):
        assert predict_position(0.2, 3.0, 0.0) == 0.2

    def test_generic_value(self):
        assert predict_position(0.2, 1.0, 0.05) == pytest.approx(0.25)

    def test_zero_velocity_holds_position(self):
        for dt in (0.0, 0.03, 1.0):
            assert predict_position(0.2, 0.0, dt) == 0.2

    def test_negative_horizon_rejected(self):
        with pytest.raises(ValueError):
            predict_position(0.0, 1.0, -0.1)


class TestPipeline:
    def test_out_of_range_samples_clamped_and_counted(self):
        pipe = PerceptionPipeline(0.1)
        ref = pipe.tick(0.0, 0.9)
        assert ref.r_p == ARENA_HALF
        assert pipe.last_raw == ARENA_HALF
        assert pipe.clamp_count == 1

    def test_dropout_holds_position_with_zero_velocity(self):
        pipe = PerceptionPipeline(0.1)
        pipe.tick(0.0, 0.2)
        pipe.tick(0.1, 0.3)
        ref = pipe.tick(0.2, None)
        assert ref.r_v_hat == 0.0
        assert ref.r_p_hat_next == ref.r_p
        assert pipe.dropout_count == 1

    def test_first_sample_seeds_filter(self):
        pipe = PerceptionPipeline(0.1, alpha_f=0.5)
        ref = pipe.tick(0.0, 0.4)
        assert ref.r_p == pytest.approx(0.4)
        assert ref.r_v_hat == 0.0

    def test_velocity_from_filtered_positions(self):
        pipe = PerceptionPipeline(0.1, alpha_f=1.0)
        pipe.tick(0.0, 0.0)
        ref = pipe.tick(0.1, 0.2)
        assert ref.r_v_hat == pytest.approx(2.0)
        assert ref.r_p_hat_next == pytest.approx(0.4)

    def test_non_finite_sample_rejected(self):
        pipe = PerceptionPipeline(0.1)
        with pytest.raises(ValueError):
            pipe.tick(0.0, math.nan)
