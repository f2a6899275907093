"""Tests for the porous medium solver and the Y functional."""

import math

import numpy as np
import pytest

from euler import EulerParams
from grid_field import (
    Grid,
    band_limited_random,
    cosine_mode,
    gradient,
    lp_norm,
    vector_lp_norm,
)
from porous_medium import (
    PMEState,
    PorousParams,
    PositivityError,
    StabilityError,
    darcy_velocity,
    diffusivity,
    pme_functional_Y,
    pme_step,
    run_pme,
)


class TestPorousMedium:
    """Stepping, conservation and the Darcy law."""

    def setup_method(self):
        """Set up a small grid and gamma = 2, A = 1/2."""
        self.grid = Grid(1, 256, 2 * math.pi * 4)
        self.params = PorousParams(2.0, 0.5)

    def test_from_euler(self):
        """Test that the limit takes gamma and A from the Euler parameters."""
        params = PorousParams.from_euler(EulerParams(3.0, 0.2, 0.1))
        assert (params.gamma, params.pressure_constant) == (3.0, 0.2)
        with pytest.raises(ValueError):
            PorousParams(1.0, 0.5)

    def test_diffusivity(self):
        """Test mu = P'(mean N) = gamma A at unit density."""
        state = PMEState(self.grid.constant(1.0))
        assert diffusivity(state, self.params) == pytest.approx(1.0)

    def test_small_mode_follows_heat_kernel(self):
        """Test that a tiny mode decays like exp(-mu xi^2 t)."""
        n0 = cosine_mode(self.grid, 2, 1e-8) + 1.0
        states = run_pme(PMEState(n0), self.params, dt=1e-2, t_end=1.0)
        xi = 2 * math.pi * 2 / self.grid.length
        observed = states[-1].density.spectrum[2].real * 2 / 1e-8
        assert observed == pytest.approx(math.exp(-(xi**2)), rel=1e-6)
        assert states[-1].t == pytest.approx(1.0)

    def test_mass_is_conserved(self):
        """Test that the mean density does not move."""
        rng = np.random.default_rng(0)
        band = self.grid.xi_max / 3
        n0 = band_limited_random(self.grid, rng, xi_high=band, amplitude=0.02) + 1.0
        states = run_pme(PMEState(n0), self.params, dt=1e-2, t_end=0.5)
        means = [s.mean_density for s in states]
        assert max(abs(m / means[0] - 1.0) for m in means) < 1e-10

    def test_darcy_law_for_gamma_two(self):
        """Test -grad P(N) / N = -grad N for P = N^2 / 2."""
        rng = np.random.default_rng(1)
        band = self.grid.xi_max / 3
        n0 = band_limited_random(self.grid, rng, xi_high=band, amplitude=0.02) + 1.0
        velocity = darcy_velocity(PMEState(n0), self.params)
        gap = vector_lp_norm(velocity + gradient(n0), math.inf)
        assert gap / vector_lp_norm(gradient(n0), math.inf) < 1e-10

    def test_positivity_guard(self):
        """Test that a nonpositive density is refused."""
        with pytest.raises(PositivityError):
            pme_step(PMEState(cosine_mode(self.grid, 1, 1.0)), self.params, 1e-3)

    def test_stability_guard(self):
        """Test that a large step on a varying density is refused."""
        n0 = cosine_mode(self.grid, 4, 0.5) + 1.0
        with pytest.raises(StabilityError):
            pme_step(PMEState(n0), self.params, 1.0)

    def test_step_arguments(self):
        """Test dt <= 0 and a run without a time grid."""
        state = PMEState(self.grid.constant(1.0))
        with pytest.raises(ValueError):
            pme_step(state, self.params, 0.0)
        with pytest.raises(ValueError):
            run_pme(state, self.params)

    def test_second_order_in_time(self):
        """Test that halving dt cuts the successive differences about fourfold."""
        rng = np.random.default_rng(2)
        band = self.grid.xi_max / 3
        n0 = band_limited_random(self.grid, rng, xi_high=band, amplitude=0.05) + 1.0
        finals = [
            run_pme(PMEState(n0), self.params, dt=dt, t_end=0.1)[-1].density
            for dt in (0.004, 0.002, 0.001)
        ]
        ratio = lp_norm(finals[0] - finals[1], 2) / lp_norm(finals[1] - finals[2], 2)
        assert 3.0 <= ratio <= 5.0

    def test_explicit_steps(self):
        """Test a run on a given list of steps."""
        state = PMEState(self.grid.constant(1.0))
        states = run_pme(state, self.params, steps=[0.01, 0.02, 0.03])
        assert [s.t for s in states] == pytest.approx([0.0, 0.01, 0.03, 0.06])


class TestFunctionalY:
    """Sup and integral parts of Y."""

    def test_constant_density_has_zero_Y(self):
        """Test that the mean never contributes."""
        grid = Grid(1, 64)
        states = run_pme(PMEState(grid.constant(1.0)), PorousParams(), dt=0.1, t_end=0.3)
        y = pme_functional_Y(states, 6.0)
        assert y.total == 0.0

    def test_parts_add_up(self):
        """Test Y = sup part + integral part on a decaying mode."""
        grid = Grid(1, 128, 2 * math.pi * 4)
        n0 = cosine_mode(grid, 2, 0.01) + 1.0
        states = run_pme(PMEState(n0), PorousParams(), dt=0.01, t_end=0.2)
        y = pme_functional_Y(states, 6.0)
        assert y.sup_part > 0
        assert y.integral_part > 0
        assert y.to_dict()["Y"] == pytest.approx(y.sup_part + y.integral_part)

    def test_empty_trace(self):
        """Test that an empty trace is refused."""
        with pytest.raises(ValueError):
            pme_functional_Y([], 6.0)
