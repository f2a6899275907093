"""Tests for the linear symbol, its eigenvalues and the exact propagator."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from grid_field import Grid, VecField, band_limited_random, cosine_mode, lp_norm, vector_lp_norm
from spectral import (
    LinearSymbol,
    Scaling,
    SymbolError,
    asymptotics_report,
    damped_mode_residual,
    eigenvalues,
    etd_operators,
    linear_propagate,
    linear_time_derivative,
    propagator_matrix,
    spectral_curves,
    trend_summary,
)


class TestEigenvalues:
    """Roots of l^2 - tau l + det."""

    def test_vieta(self):
        """Test sum and product of the roots in both scalings."""
        for scaling in Scaling:
            for xi in (1e-3, 0.4, 1.0, 4.9, 5.1, 100.0):
                symbol = LinearSymbol(0.1, xi, scaling)
                pair = eigenvalues(0.1, xi, scaling)
                total = pair.lambda_plus + pair.lambda_minus
                prod = pair.lambda_plus * pair.lambda_minus
                assert abs(total - symbol.trace) / symbol.trace < 1e-12
                assert abs(prod - symbol.determinant) / symbol.determinant < 1e-12

    def test_matches_matrix_eigenvalues(self):
        """Test against numpy on the 2x2 matrix."""
        symbol = LinearSymbol(0.1, 2.0)
        pair = eigenvalues(0.1, 2.0)
        oracle = sorted(np.linalg.eigvals(symbol.matrix), key=lambda z: z.real)
        assert pair.lambda_minus == pytest.approx(oracle[0], rel=1e-12)
        assert pair.lambda_plus == pytest.approx(oracle[1], rel=1e-12)

    def test_slow_root_is_parabolic(self):
        """Test lambda_- close to eps |xi|^2 at low frequency (relax scaling)."""
        pair = eigenvalues(0.1, 1.0)
        assert pair.lambda_minus.real == pytest.approx(5.0 - math.sqrt(24.0), rel=1e-12)
        assert abs(pair.lambda_minus.real / 0.1 - 1.0) < 2e-2
        tiny = eigenvalues(0.1, 0.01)
        assert tiny.lambda_minus.real / (0.1 * 0.01**2) == pytest.approx(1.0, abs=1e-4)

    def test_high_frequency_real_part(self):
        """Test Re lambda = 1/(2 eps) in the relax scaling once the roots are complex."""
        pair = eigenvalues(0.1, 100.0)
        assert not pair.is_real
        assert pair.lambda_plus.real == pytest.approx(5.0, rel=1e-12)

    def test_diffusive_e_folding(self):
        """Test Re lambda = 1/(2 eps^2) in the diffusive scaling at eps |xi| = 5."""
        eps = 0.05
        pair = eigenvalues(eps, 5.0 / eps, Scaling.DIFFUSIVE)
        assert pair.lambda_plus.real == pytest.approx(0.5 / eps**2, rel=1e-12)

    def test_invalid_symbol(self):
        """Test that eps <= 0 and negative |xi| are refused."""
        with pytest.raises(SymbolError):
            LinearSymbol(0.0, 1.0)
        with pytest.raises(SymbolError):
            LinearSymbol(0.1, -1.0)


class TestAsymptotics:
    """Reports and curves over a wavenumber grid."""

    def test_trends(self):
        """Test the monotone trends of the ratios along |xi|."""
        rows = asymptotics_report(0.1, np.logspace(-3, 3, 61))
        trends = trend_summary(rows)
        assert trends["slow_ratio_increasing"]
        assert trends["fast_ratio_decreasing"]
        assert rows[0].slow_ratio == pytest.approx(1.0, abs=1e-6)
        assert rows[0].fast_ratio == pytest.approx(1.0, abs=1e-6)

    def test_report_needs_sorted_positive_grid(self):
        """Test that an unsorted grid is refused."""
        with pytest.raises(SymbolError):
            asymptotics_report(0.1, [1.0, 0.5])

    def test_curves(self):
        """Test the curve columns and the Vieta sum on them."""
        xi = np.linspace(0.1, 50.0, 40)
        curves = spectral_curves(0.1, xi)
        assert set(curves) == {"xi", "re_plus", "im_plus", "re_minus", "im_minus"}
        assert np.allclose(curves["re_plus"] + curves["re_minus"], 10.0)


class TestPropagator:
    """exp(-t M) mode by mode."""

    def test_matches_expm(self):
        """Test the Sylvester form against scipy.linalg.expm."""
        for scaling in Scaling:
            for xi in (0.0, 0.5, 1.0, 5.0, 20.0):
                symbol = LinearSymbol(0.1, xi, scaling)
                exact = expm(-0.03 * symbol.matrix)
                ours = propagator_matrix(symbol, 0.03)
                assert np.max(np.abs(ours - exact)) / np.max(np.abs(exact)) < 1e-10

    def test_semigroup(self):
        """Test P(0.5) = P(0.3) P(0.2)."""
        symbol = LinearSymbol(0.1, 3.0)
        whole = propagator_matrix(symbol, 0.5)
        parts = propagator_matrix(symbol, 0.3) @ propagator_matrix(symbol, 0.2)
        assert np.max(np.abs(whole - parts)) < 1e-12

    def test_negative_time(self):
        """Test that t < 0 is refused."""
        with pytest.raises(SymbolError):
            propagator_matrix(LinearSymbol(0.1, 1.0), -0.1)

    def test_grid_propagation_of_a_mode(self):
        """Test that a resting cosine evolves by the (c, c) entry of the propagator."""
        grid = Grid(1, 64, 2 * math.pi * 4)
        c0 = cosine_mode(grid, 3, 0.5)
        c, v = linear_propagate(c0, VecField.zeros(grid), 0.1, 0.2)
        entry = propagator_matrix(LinearSymbol(0.1, 0.75), 0.2)[0, 0]
        assert np.max(np.abs(c.samples - entry.real * c0.samples)) < 1e-12
        assert abs(entry.imag) < 1e-14

    def test_time_derivative(self):
        """Test the differentiated propagator against a centered difference."""
        grid = Grid(1, 64, 2 * math.pi * 4)
        rng = np.random.default_rng(4)
        c0 = band_limited_random(grid, rng)
        v0 = VecField((band_limited_random(grid, rng),))
        h = 1e-5
        dc, dv = linear_time_derivative(c0, v0, 0.2, 0.1)
        cp, vp = linear_propagate(c0, v0, 0.2, 0.1 + h)
        cm, vm = linear_propagate(c0, v0, 0.2, 0.1 - h)
        fd_c = (cp - cm) / (2 * h)
        fd_v = (vp - vm) / (2 * h)
        scale = lp_norm(dc, 2) + vector_lp_norm(dv, 2)
        gap = lp_norm(dc - fd_c, 2) + vector_lp_norm(dv - fd_v, 2)
        assert gap / scale < 1e-5


class TestDampedModeRewrite:
    """The heat / damped-mode form of the linear system."""

    def test_rewrite_holds_on_exact_trajectory(self):
        """Test both residuals on random data."""
        grid = Grid(1, 256, 2 * math.pi * 4)
        rng = np.random.default_rng(0)
        for _ in range(3):
            c0 = band_limited_random(grid, rng)
            v0 = VecField((band_limited_random(grid, rng),))
            res_c, res_w = damped_mode_residual(c0, v0, 0.05, 0.3)
            assert res_c < 1e-10
            assert res_w < 1e-10


class TestEtdOperators:
    """Exponential-integrator operators."""

    def test_exp_block_matches_propagator(self):
        """Test that the exp block equals the Sylvester propagator."""
        grid = Grid(1, 32, 2 * math.pi)
        ops = etd_operators(grid, 0.2, 0.01, Scaling.DIFFUSIVE, 1.0)
        k = 3
        entry = propagator_matrix(LinearSymbol(0.2, 3.0, Scaling.DIFFUSIVE), 0.01)
        assert ops.exp.cc[k] == pytest.approx(entry[0, 0], rel=1e-10)
        assert ops.exp.cv[k] == pytest.approx(entry[0, 1], rel=1e-10)
        assert ops.exp.transverse == pytest.approx(math.exp(-0.01 / 0.2**2), rel=1e-12)

    def test_phi1_at_zero_mode(self):
        """Test phi1 on the c entry of the zero mode, where the symbol vanishes."""
        grid = Grid(1, 32, 2 * math.pi)
        ops = etd_operators(grid, 0.2, 0.01, Scaling.DIFFUSIVE, 1.0)
        assert ops.phi1.cc[0] == pytest.approx(1.0, rel=1e-12)
        assert ops.phi2.cc[0] == pytest.approx(0.5, rel=1e-12)

    def test_step_must_be_positive(self):
        """Test that h <= 0 is refused."""
        with pytest.raises(SymbolError):
            etd_operators(Grid(1, 32), 0.2, 0.0)
