"""Tests for the frequency zones and SVG figures."""

import numpy as np
import pytest

from littlewood_paley import AdmissibleSequence, FrequencyPartition
from plots import (
    boundaries,
    frequency_map_figure,
    frequency_zones,
    loglog_figure,
    spectral_figure,
)
from spectral import spectral_curves


class TestFrequencyZones:
    """Zones from low to high frequency."""

    @pytest.mark.parametrize("n_medium", [0, 1, 3])
    def test_zone_count(self, n_medium):
        """Test R + 2 zones and R + 1 boundaries."""
        part = FrequencyPartition(0.1, k0=0, n0=2, n_medium=n_medium)
        seq = AdmissibleSequence(6.0, 1, (3.0, 4.0, 5.0)[:n_medium])
        zones = frequency_zones(part, seq)
        assert len(zones) == n_medium + 2
        assert len(boundaries(zones)) == n_medium + 1
        assert zones[0].name == "Low-f"
        assert zones[-1].exponent == "L^2"

    def test_boundaries_increase(self):
        """Test the boundaries for eps = 0.1, N0 = 2, R = 2."""
        part = FrequencyPartition(0.1, k0=0, n0=2, n_medium=2)
        seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))
        zones = frequency_zones(part, seq)
        assert boundaries(zones) == [-1, 1, 3]
        assert [z.name for z in zones] == ["Low-f", "Medium-f 2", "Medium-f 1", "High-f"]


class TestFigures:
    """SVG files on disk."""

    def setup_method(self):
        """Set up the default partition and sequence."""
        self.part = FrequencyPartition(0.1, k0=0, n0=2, n_medium=2)
        self.seq = AdmissibleSequence(6.0, 1, (3.0, 4.0))

    def test_frequency_map_is_deterministic(self, tmp_path):
        """Test that the same inputs give the same SVG text."""
        a = frequency_map_figure(self.part, self.seq, tmp_path / "a.svg")
        b = frequency_map_figure(self.part, self.seq, tmp_path / "b.svg")
        assert a.read_text().startswith("<?xml")
        assert a.read_text() == b.read_text()

    def test_spectral_figure(self, tmp_path):
        """Test the eigenvalue figure."""
        curves = spectral_curves(0.1, np.logspace(-2, 2, 30))
        path = spectral_figure(curves, 0.1, tmp_path / "sub" / "spectrum.svg")
        assert path.exists()
        assert "<svg" in path.read_text()

    def test_loglog_skips_empty_series(self, tmp_path):
        """Test that a series without positive values is left out."""
        path = loglog_figure(
            [0.2, 0.1],
            {"ok": [0.04, 0.01], "empty": [float("nan"), 0.0]},
            {"ok": 2.0},
            tmp_path / "fit.svg",
        )
        text = path.read_text()
        assert "slope 2.000" in text
        assert "empty" not in text
