"""Tests for the invariant suites."""

import math

import pytest

from experiment_config import load_config
from verification import (
    Check,
    ConstantEstimate,
    SuiteReport,
    UnknownSuiteError,
    bernstein_constants,
    embedding_constants,
    law_ratio_constants,
    run_suite,
)


class TestChecks:
    """Pass rules of single checks and reports."""

    def test_below_and_above(self):
        """Test strict thresholds in both directions."""
        assert Check("a", 1e-13, 1e-12).passed
        assert not Check("a", 1e-12, 1e-12).passed
        assert Check("b", 2.0, 1.0, above=True).passed

    def test_soft_checks_do_not_fail_a_suite(self):
        """Test that only hard checks decide the verdict."""
        report = SuiteReport("demo")
        report.add("hard", 0.0, 0.5)
        report.add("soft", 1.0, 0.5, hard=False)
        assert report.passed
        assert report.to_dict()["checks"][1]["passed"] is False
        report.add("broken", 1.0, 0.5)
        assert not report.passed

    def test_constant_estimate_spread(self):
        """Test that the largest ratio per label is kept and compared."""
        estimate = ConstantEstimate("demo")
        assert math.isinf(estimate.spread)
        estimate.observe("a", 1.0)
        estimate.observe("b", 3.0)
        estimate.observe("a", 0.5)
        assert estimate.constants == {"a": 1.0, "b": 3.0}
        assert estimate.spread == pytest.approx(3.0)
        assert estimate.to_dict()["C"] == {"a": 1.0, "b": 3.0}


class TestInvariantConstants:
    """Empirical constants compared across resolutions and eps."""

    def setup_method(self):
        """Set up the default configuration."""
        self.config = load_config()

    def test_bernstein_constants(self):
        """Test 100 single-shell trials at n = 512 and n = 1024."""
        estimates = bernstein_constants(seed=1, trials=100)
        assert set(estimates) == {"a=1,b=2", "a=2,b=inf", "a=1,b=inf"}
        for estimate in estimates.values():
            assert set(estimate.constants) == {"n=512", "n=1024"}
            assert min(estimate.constants.values()) > 0
            assert estimate.spread < 2.0
        # sup |block| <= sqrt(#modes in the annulus) ||block||_2 / sqrt(L)
        assert max(estimates["a=2,b=inf"].constants.values()) < 1.0

    def test_embedding_constants(self):
        """Test 100 random fields for B^{d/2}_{2,1} into B^{d/p}_{p,1}."""
        estimates = embedding_constants(seed=1, trials=100)
        assert set(estimates) == {"p=4", "p=6", "p=inf"}
        for estimate in estimates.values():
            assert min(estimate.constants.values()) > 0
            assert estimate.spread < 2.0

    def test_law_ratio_constants(self):
        """Test 50 pairs for both laws across two grids and two eps."""
        laws = law_ratio_constants(self.config, pairs=50)
        assert set(laws) == {"product", "commutator"}
        for estimate in laws.values():
            assert set(estimate.constants) == {
                "n=512,eps=0.1",
                "n=1024,eps=0.1",
                "n=512,eps=0.05",
            }
            assert min(estimate.constants.values()) > 0
            assert estimate.spread < 2.0


class TestSuites:
    """Suites on the default configuration."""

    def setup_method(self):
        """Set up the default configuration."""
        self.config = load_config()

    def test_lp_suite(self):
        """Test the partition of unity, reconstruction, tiling, sequences and constants."""
        report = run_suite("lp", self.config, trials=2)
        assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
        assert report.details["partition"]["J"] == 0
        names = {c.name for c in report.checks}
        assert "bernstein_stability_a=2,b=inf" in names
        assert "embedding_stability_p=6" in names

    @pytest.mark.slow
    def test_bony_suite(self):
        """Test the identity, support, margins and law ratio stability."""
        report = run_suite("bony", self.config, trials=5)
        assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
        assert set(report.details["lemma_ratios"]) == {"product", "commutator"}

    def test_spectral_suite(self):
        """Test Vieta, the oracles, expm and the damped-mode rewrite."""
        report = run_suite("spectral", self.config, trials=2)
        assert report.passed, [c.to_dict() for c in report.checks if not c.passed]

    def test_unknown_suite(self):
        """Test that an unknown name is refused."""
        with pytest.raises(UnknownSuiteError):
            run_suite("physics", self.config)
