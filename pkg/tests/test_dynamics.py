import math

import pytest

from h2blackstart.utils.dynamics import (
    clamp,
    lag,
    lag_complex,
    lag_factor,
    rate_limit,
)


class TestLag:
    def test_matches_closed_form_exponential(self):
        value, dt, tau = 0.0, 1e-3, 0.02
        for _ in range(100):
            value = lag(value, 1.0, dt, tau)

        assert value == pytest.approx(1.0 - math.exp(-0.1 / tau), rel=1e-12)

    def test_independent_of_step_size(self):
        coarse, fine = 0.0, 0.0
        for _ in range(10):
            coarse = lag(coarse, 2.0, 1e-3, 0.05)
        for _ in range(20):
            fine = lag(fine, 2.0, 5e-4, 0.05)

        assert coarse == pytest.approx(fine, rel=1e-12)

    def test_zero_time_constant_is_immediate(self):
        assert lag_factor(1e-3, 0.0) == 1.0
        assert lag(0.3, 0.7, 1e-3, 0.0) == 0.7

    def test_complex(self):
        value = lag_complex(0j, 1 + 1j, 1e-3, 1e-3)

        assert value == pytest.approx((1 - math.exp(-1)) * (1 + 1j))


class TestRateLimit:
    def test_limits_step(self):
        assert rate_limit(0.0, 2.0, 1e-3, 4.0) == pytest.approx(0.004)
        assert rate_limit(2.0, 0.0, 1e-3, 4.0) == pytest.approx(1.996)

    def test_reaches_target(self):
        assert rate_limit(1.999, 2.0, 1e-3, 4.0) == pytest.approx(2.0, abs=1e-15)

    def test_nonpositive_rate_jumps(self):
        assert rate_limit(0.0, 2.0, 1e-3, 0.0) == 2.0


class TestClamp:
    def test_inside(self):
        assert clamp(0.5, 0.0, 1.0) == (0.5, False)

    def test_outside(self):
        assert clamp(1.5, 0.0, 1.0) == (1.0, True)
        assert clamp(-0.5, 0.0, 1.0) == (0.0, True)
