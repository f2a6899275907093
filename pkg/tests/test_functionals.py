"""Tests for the hybrid functionals, the distance and the relaxation errors."""

import math

import numpy as np
import pytest

from euler import EulerParams, EulerState, Integrator, run
from functionals import (
    SolutionTrace,
    TraceError,
    accumulate_X,
    accumulate_X0,
    accumulate_X_series,
    check_aligned,
    darcy_source,
    decay_horizon,
    norm_rows,
    relaxation_errors,
    two_solution_distance,
)
from grid_field import Grid, VecField, cosine_mode, lp_norm
from initial_data import delta_perturbed, well_prepared
from littlewood_paley import AdmissibleSequence, FrequencyPartition, PartitionError
from porous_medium import PMEState, PorousParams, diffusivity, run_pme


class TestHybridFunctional:
    """X itemized over a short well-prepared run."""

    def setup_method(self):
        """Set up a 0.1 time unit run on 128 points with the p = 6 sequence."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 128)
        self.part = FrequencyPartition(0.1, k0=-3, n0=4, n_medium=2)
        self.seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))
        self.data = well_prepared(self.grid, self.params, 0.01, 8)
        states = run(self.data.state, self.params, 0.01, 0.1, Integrator.ETD2)
        self.trace = SolutionTrace(states, self.params, self.part, self.seq)

    def test_items(self):
        """Test six lower items per low and medium regime and four high items."""
        functional = accumulate_X(self.trace)
        items = functional.itemized()
        assert len(items) == 22
        assert "l.W.L1_over_eps" in items
        assert "m2.v.L2" in items
        assert "h.eps2_v.Linf" in items
        assert functional.total == pytest.approx(sum(items.values()))
        assert len(functional.to_dict()["X_medium"]) == 2

    def test_series_are_non_decreasing(self):
        """Test that every summand grows with the horizon."""
        for label, series in accumulate_X_series(self.trace).items():
            assert np.all(np.diff(series) >= -1e-15), label

    def test_bounds_initial_size(self):
        """Test X >= X_0, since the sup items include the initial state."""
        x0 = accumulate_X0(self.data.state, self.params, self.part, self.seq)
        assert x0 > 0
        assert accumulate_X(self.trace).total >= x0 * (1 - 1e-12)

    def test_norm_rows(self):
        """Test one row per state with c, v, W per regime and the mass."""
        rows = norm_rows(self.trace)
        assert len(rows) == len(self.trace.states)
        assert set(rows[0]) == {
            "t",
            "mass",
            *(f"{n}.{r}" for n in ("c", "v", "W") for r in ("l", "m1", "m2", "h")),
        }

    def test_horizon_is_capped(self):
        """Test the decay horizon never passes the cap or the last time."""
        assert decay_horizon(self.trace) <= 0.1 + 1e-12
        assert decay_horizon(self.trace, cap=0.05) <= 0.05


class TestTraceChecks:
    """Trace construction and time alignment."""

    def setup_method(self):
        """Set up the rest state on 64 points."""
        self.params = EulerParams()
        self.part = FrequencyPartition(0.1, k0=-3, n0=4, n_medium=2)
        self.seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))
        self.rest = EulerState.equilibrium(Grid(1, 64))

    def test_empty_and_unsorted(self):
        """Test that empty and repeated-time traces are refused."""
        with pytest.raises(TraceError):
            SolutionTrace([], self.params, self.part, self.seq)
        with pytest.raises(TraceError):
            SolutionTrace([self.rest, self.rest], self.params, self.part, self.seq)

    def test_regime_count_mismatch(self):
        """Test that the partition and sequence must agree on R."""
        with pytest.raises(PartitionError):
            SolutionTrace([self.rest], self.params, self.part, AdmissibleSequence(6.0, 1, (3.0,)))

    def test_alignment(self):
        """Test aligned and misaligned time grids."""
        check_aligned([0.0, 0.1], [0.0, 0.1 + 1e-12])
        with pytest.raises(TraceError):
            check_aligned([0.0, 0.1], [0.0, 0.11])
        with pytest.raises(TraceError):
            check_aligned([0.0, 0.1], [0.0])

    def test_rest_horizon(self):
        """Test that a trace without high content keeps its full length."""
        trace = SolutionTrace([self.rest], self.params, self.part, self.seq)
        assert decay_horizon(trace) == 0.0

    def _decaying_trace(self, start_amplitude):
        """High mode xi = 1 with amplitude 0.01 exp(-5t) on t = 0, 0.05, ..., 2."""
        grid = Grid(1, 256)
        states = []
        for k in range(41):
            t = 0.05 * k
            amplitude = start_amplitude if k == 0 else 0.01 * math.exp(-5.0 * t)
            states.append(EulerState(cosine_mode(grid, 64, amplitude), VecField.zeros(grid), t))
        return SolutionTrace(states, self.params, self.part, self.seq)

    def test_horizon_measures_drop_from_post_layer_peak(self):
        """Test the first time below 1e-3 of the value at t = 0.05 is 1.45."""
        trace = self._decaying_trace(0.01)
        assert decay_horizon(trace) == pytest.approx(1.45)
        assert decay_horizon(trace, cap=1.0) == pytest.approx(1.0)

    def test_horizon_ignores_negligible_start(self):
        """Test that a round-off sized initial state does not end the run at once."""
        trace = self._decaying_trace(1e-20)
        assert decay_horizon(trace) == pytest.approx(1.45)

    def test_round_off_high_content_keeps_full_run(self):
        """Test that high content far below the low mode does not set a horizon."""
        grid = Grid(1, 256)
        states = [
            EulerState(
                cosine_mode(grid, 8, 0.01) + cosine_mode(grid, 64, 1e-15 * math.exp(-5.0 * t)),
                VecField.zeros(grid),
                t,
            )
            for t in (0.05 * k for k in range(41))
        ]
        trace = SolutionTrace(states, self.params, self.part, self.seq)
        assert decay_horizon(trace) == pytest.approx(2.0)


class TestDistanceAndRelaxation:
    """dX between traces and rho^eps - N against a porous-medium run."""

    def setup_method(self):
        """Set up a well-prepared trace and the matching porous-medium run."""
        self.params = EulerParams(2.0, 0.5, 0.1)
        self.grid = Grid(1, 128)
        self.part = FrequencyPartition(0.1, k0=-3, n0=4, n_medium=2)
        self.seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))
        self.data = well_prepared(self.grid, self.params, 0.01, 8)
        states = run(self.data.state, self.params, 0.01, 0.1, Integrator.ETD2)
        self.trace = SolutionTrace(states, self.params, self.part, self.seq)
        steps = np.diff(self.trace.times)
        self.pme = run_pme(
            PMEState(self.data.limit_density),
            PorousParams.from_euler(self.params),
            steps=list(steps),
        )

    def test_self_distance(self):
        """Test dX = 0 and a zero Gronwall ratio for identical traces."""
        report = two_solution_distance(self.trace, self.trace)
        assert np.all(report.delta_x == 0)
        assert np.all(report.gronwall_ratio == 0)
        assert np.all(report.weight > 0)
        assert report.to_dict()["delta_X0"] == 0.0

    def test_relaxation_errors(self):
        """Test zero initial error and finite norms over the run."""
        errors = relaxation_errors(self.trace, self.pme, 1.0, 1.0)
        assert errors.sup_series[0] == 0.0
        summary = errors.to_dict()
        assert summary["T"] == pytest.approx(0.1)
        for key in ("sup_err", "mixed_err", "W_Lr", "source_max"):
            assert math.isfinite(summary[key])
        assert set(summary["tail"]) == {"sup", "mixed", "W"}
        assert math.isnan(summary["gap_err"])

    def test_relaxation_errors_after_the_first_step(self):
        """Test the evolved sup and the heat-propagated gap on perturbed data."""
        data = delta_perturbed(self.grid, self.params, 1.0, 6.0, 0.01, 8)
        limit = PorousParams.from_euler(self.params)
        states = run(data.state, self.params, 0.01, 0.1, Integrator.ETD2)
        trace = SolutionTrace(states, self.params, self.part, self.seq)
        pme = run_pme(PMEState(data.limit_density), limit, steps=list(np.diff(trace.times)))
        mu = diffusivity(pme[0], limit)
        errors = relaxation_errors(trace, pme, 1.0, 1.0, mu)
        assert errors.sup_series[0] > 0
        assert errors.gap_series[0] <= 1e-12 * errors.sup_series[0]
        assert errors.sup_err_evolved == pytest.approx(float(np.max(errors.sup_series[1:])))
        assert errors.sup_err_evolved <= errors.sup_err
        summary = errors.to_dict()
        assert math.isfinite(summary["gap_err"])
        assert summary["gap_err"] >= 0

    def test_relaxation_argument_ranges(self):
        """Test delta outside (0, 1] and r outside [1, 2)."""
        with pytest.raises(ValueError):
            relaxation_errors(self.trace, self.pme, 0.0, 1.0)
        with pytest.raises(ValueError):
            relaxation_errors(self.trace, self.pme, 1.0, 2.0)

    def test_relaxation_needs_alignment(self):
        """Test that a shorter porous-medium trace is refused."""
        with pytest.raises(TraceError):
            relaxation_errors(self.trace, self.pme[:-1], 1.0, 1.0)

    def test_darcy_source_vanishes_on_prepared_data(self):
        """Test S = -div(rho W) = 0 when W = 0."""
        assert lp_norm(darcy_source(self.data.state, self.params), math.inf) < 1e-14
