"""Tests for mixed time norms."""

import math

import numpy as np
import pytest

from time_norms import cumulative_lq, lq_time_norm, running_max


class TestTimeNorms:
    """L^q_T by the trapezoid rule and L^inf_T by running max."""

    def setup_method(self):
        """Set up a constant series on [0, 3]."""
        self.times = [0.0, 1.0, 2.0, 3.0]
        self.values = [2.0, 2.0, 2.0, 2.0]

    def test_constant_series(self):
        """Test the L^1, L^2 and L^inf norms of a constant."""
        assert lq_time_norm(self.times, self.values, 1.0) == pytest.approx(6.0)
        assert lq_time_norm(self.times, self.values, 2.0) == pytest.approx(math.sqrt(12.0))
        assert lq_time_norm(self.times, self.values, math.inf) == 2.0

    def test_linear_series_is_exact(self):
        """Test that the trapezoid rule integrates |t| exactly."""
        t = np.linspace(0.0, 2.0, 11)
        assert lq_time_norm(t, t, 1.0) == pytest.approx(2.0)

    def test_single_sample(self):
        """Test zero L^q mass and the sup of a single sample."""
        assert lq_time_norm([0.5], [3.0], 1.0) == 0.0
        assert lq_time_norm([0.5], [3.0], math.inf) == 3.0

    def test_cumulative_is_non_decreasing(self):
        """Test the running norms and their final value."""
        values = [1.0, -3.0, 0.5, 2.0]
        running = cumulative_lq(self.times, values, 1.0)
        assert running[0] == 0.0
        assert np.all(np.diff(running) >= 0)
        assert running[-1] == pytest.approx(lq_time_norm(self.times, values, 1.0))
        assert list(cumulative_lq(self.times, values, math.inf)) == [1.0, 3.0, 3.0, 3.0]
        assert list(running_max(values)) == [1.0, 3.0, 3.0, 3.0]

    def test_bad_series(self):
        """Test mismatched, empty, unsorted series and q < 1."""
        with pytest.raises(ValueError):
            lq_time_norm([0.0, 1.0], [1.0], 1.0)
        with pytest.raises(ValueError):
            lq_time_norm([], [], 1.0)
        with pytest.raises(ValueError):
            lq_time_norm([1.0, 0.0], [1.0, 1.0], 1.0)
        with pytest.raises(ValueError):
            lq_time_norm(self.times, self.values, 0.5)
