"""Tests for the damped Euler solver and its diagnostics."""

import math

import numpy as np
import pytest

from euler import (
    CFLViolation,
    DensityError,
    EulerParams,
    EulerState,
    Integrator,
    VacuumError,
    damped_mode,
    density,
    heat_form_residual,
    layer_time_grid,
    lyapunov_functional,
    mass,
    run,
    smallness_gate,
    snapshots,
    step,
    to_sound_vars,
)
from grid_field import (
    Grid,
    VecField,
    band_limited_random,
    cosine_mode,
    lp_norm,
    vector_lp_norm,
)
from initial_data import well_prepared
from littlewood_paley import AdmissibleSequence, FrequencyPartition, build_cutoff
from spectral import Scaling, linear_propagate


class TestParameters:
    """Physical constants and the change of variables."""

    def setup_method(self):
        """Set up gamma = 2, A = 1/2 so the sound speed is 1."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 64)

    def test_constants(self):
        """Test gc, c_bar and the sound speed."""
        assert self.params.gamma_check == 0.5
        assert self.params.c_bar == pytest.approx(2.0)
        assert self.params.sound_speed == pytest.approx(1.0)
        assert self.params.with_eps(0.05).eps == 0.05

    def test_rejects_bad_parameters(self):
        """Test gamma <= 1, A <= 0 and eps <= 0."""
        with pytest.raises(ValueError):
            EulerParams(1.0, 0.5, 0.1)
        with pytest.raises(ValueError):
            EulerParams(2.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            EulerParams(2.0, 0.5, 0.0)

    def test_sound_variables_round_trip(self):
        """Test that density(to_sound_vars(rho)) gives rho back."""
        rho = band_limited_random(self.grid, np.random.default_rng(0), amplitude=0.3) + 1.0
        state = to_sound_vars(rho, VecField.zeros(self.grid), self.params)
        assert np.max(np.abs(density(state, self.params).samples - rho.samples)) < 1e-12
        rest = to_sound_vars(self.grid.constant(1.0), VecField.zeros(self.grid), self.params)
        assert np.max(np.abs(rest.c.samples)) < 1e-15

    def test_velocity_is_scaled(self):
        """Test v = u / eps."""
        u = VecField((cosine_mode(self.grid, 1, 0.02),))
        state = to_sound_vars(self.grid.constant(1.0), u, self.params)
        assert state.v.max_abs() == pytest.approx(0.2)

    def test_nonpositive_density(self):
        """Test that a vanishing density is refused."""
        with pytest.raises(DensityError):
            to_sound_vars(self.grid.zeros(), VecField.zeros(self.grid), self.params)


class TestStepping:
    """Single steps, guards and the time grid."""

    def setup_method(self):
        """Set up the default box with 128 points."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 128)

    def test_equilibrium_is_preserved(self):
        """Test that the rest state stays at rest under both integrators."""
        for integrator in Integrator:
            out = step(EulerState.equilibrium(self.grid), self.params, 0.01, integrator)
            assert lp_norm(out.c, math.inf) + out.v.max_abs() < 1e-14
            assert out.t == pytest.approx(0.01)

    def test_vacuum_guard(self):
        """Test that c + c_bar near zero aborts the step."""
        state = EulerState(self.grid.constant(-1.9), VecField.zeros(self.grid))
        with pytest.raises(VacuumError):
            step(state, self.params, 0.01)

    def test_cfl_guard(self):
        """Test that an acoustic CFL number above 1/2 aborts the step."""
        big = Grid(1, 512)
        with pytest.raises(CFLViolation):
            step(EulerState.equilibrium(big), self.params, 1.0)

    def test_step_must_be_positive(self):
        """Test that dt <= 0 is refused."""
        with pytest.raises(ValueError):
            step(EulerState.equilibrium(self.grid), self.params, 0.0)

    def test_layer_time_grid(self):
        """Test the eps^2/8 first step, 5% growth, the dt cap and the end time."""
        steps = layer_time_grid(1.0, 0.01, eps=0.1)
        assert steps[0] == pytest.approx(0.1**2 / 8)
        assert steps[1] == pytest.approx(1.05 * steps[0])
        assert max(steps) <= 0.01 + 1e-15
        assert sum(steps) == pytest.approx(1.0)
        uniform = layer_time_grid(0.1, 0.01)
        assert len(uniform) == 10

    def test_run_collects_states(self):
        """Test that run keeps the initial state and reaches t_end."""
        data = well_prepared(self.grid, self.params, 0.01, 8)
        states = run(data.state, self.params, 0.01, 0.05, Integrator.ETD2)
        assert len(states) == 6
        assert states[0] is data.state
        assert states[-1].t == pytest.approx(0.05)

    def test_snapshots_keep_last(self):
        """Test every-k thinning that always keeps the final state."""
        data = well_prepared(self.grid, self.params, 0.01, 8)
        states = run(data.state, self.params, 0.01, 0.05)
        kept = list(snapshots(states, 4))
        assert [s.t for s in kept] == pytest.approx([0.0, 0.04, 0.05])


class TestConservation:
    """Mass and consistency with the linearization."""

    def test_mass_is_conserved(self):
        """Test the mean density over a layer-resolving run."""
        params = EulerParams(2.0, 0.5, 0.1)
        grid = Grid(1, 128)
        data = well_prepared(grid, params, 0.01, 8)
        states = run(data.state, params, 0.01, 0.2, Integrator.ETD2, resolve_layer=True)
        m0 = mass(states[0], params)
        assert max(abs(mass(s, params) / m0 - 1.0) for s in states) < 1e-7

    def test_small_data_follows_linear_flow(self):
        """Test that amplitude 1e-8 data matches the exact linear propagator."""
        params = EulerParams(2.0, 0.5, 0.1)
        grid = Grid(1, 256, 2 * math.pi * 4)
        c0 = cosine_mode(grid, 3, 1e-8)
        v0 = VecField((cosine_mode(grid, 2, 1e-8),))
        for integrator in Integrator:
            one = step(EulerState(c0, v0), params, 0.01, integrator)
            c_lin, v_lin = linear_propagate(
                c0, v0, params.eps, 0.01, Scaling.DIFFUSIVE, params.sound_speed
            )
            scale = lp_norm(c_lin, 2) + vector_lp_norm(v_lin, 2)
            gap = lp_norm(one.c - c_lin, 2) + vector_lp_norm(one.v - v_lin, 2)
            assert gap / scale < 1e-6

    def test_second_order_in_time(self):
        """Test that halving dt cuts the successive differences about fourfold."""
        params = EulerParams(2.0, 0.5, 0.5)
        grid = Grid(1, 256, 2 * math.pi * 4)
        start = EulerState(cosine_mode(grid, 2, 0.05), VecField.zeros(grid))
        finals = []
        for dt in (0.01, 0.005, 0.0025):
            finals.append(run(start, params, dt, 0.1, Integrator.ETD2)[-1])

        def gap(a, b):
            return lp_norm(a.c - b.c, 2) + vector_lp_norm(a.v - b.v, 2)

        ratio = gap(finals[0], finals[1]) / gap(finals[1], finals[2])
        assert 3.0 <= ratio <= 5.0


class TestDampedMode:
    """The damped mode and the heat form."""

    def setup_method(self):
        """Set up random dealiased sound variables."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 128, 2 * math.pi * 4)
        rng = np.random.default_rng(3)
        self.state = EulerState(
            band_limited_random(self.grid, rng, amplitude=0.05),
            VecField((band_limited_random(self.grid, rng, amplitude=0.05),)),
        )

    def test_darcy_data_has_no_damped_mode(self):
        """Test W = 0 for velocity -gc (c + c_bar) grad c."""
        data = well_prepared(self.grid, self.params, 0.01, 3)
        assert damped_mode(data.state, self.params).max_abs() < 1e-14

    def test_scaled_mode(self):
        """Test w = eps W."""
        big = damped_mode(self.state, self.params)
        small = damped_mode(self.state, self.params, scaled=True)
        assert vector_lp_norm(small - big * 0.1, math.inf) < 1e-15

    def test_heat_form_identity(self):
        """Test the rewrite d_t c - lap c = -div w / eps + Q on random data."""
        assert heat_form_residual(self.state, self.params) < 1e-10


class TestInitialSize:
    """X_0 and the smallness gate."""

    def setup_method(self):
        """Set up the default partition for eps = 0.1 and the p = 6 sequence."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 128)
        self.part = FrequencyPartition(0.1, k0=-3, n0=4, n_medium=2)
        self.seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))

    def test_rest_state_passes(self):
        """Test X_0 = 0 at equilibrium."""
        gate = smallness_gate(
            EulerState.equilibrium(self.grid), self.params, self.part, self.seq, 1.0
        )
        assert gate.passed
        assert gate.x0 == 0.0
        assert len(gate.breakdown.medium) == 2

    def test_gate_threshold(self):
        """Test that nonzero data fails eta = 0 and passes a large eta."""
        data = well_prepared(self.grid, self.params, 0.01, 8)
        strict = smallness_gate(data.state, self.params, self.part, self.seq, 0.0)
        assert not strict.passed
        assert strict.x0 > 0
        loose = smallness_gate(data.state, self.params, self.part, self.seq, 1e6)
        assert loose.passed
        assert loose.to_dict()["X0"] == pytest.approx(strict.x0)

    def test_lyapunov_pieces(self):
        """Test the energy-only value without velocity and the eps^2 weight without c."""
        cut = build_cutoff()
        c = cosine_mode(self.grid, 8, 0.1)
        only_c = lyapunov_functional(
            EulerState(c, VecField.zeros(self.grid)), -3, 0.1, cut
        )
        assert only_c.cross == 0.0
        assert only_c.value == pytest.approx(only_c.energy)
        only_v = lyapunov_functional(
            EulerState(self.grid.zeros(), VecField((c,))), -3, 0.1, cut
        )
        assert only_v.energy == pytest.approx(0.01 * only_c.energy)
