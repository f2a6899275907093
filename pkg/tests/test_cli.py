"""Tests for the hybesov command line."""

import json
from pathlib import Path

import pytest

from cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from grid_field import Grid, cosine_mode, save_field
from results_io import read_csv

ROOT = Path(__file__).parent.parent

SMALL_TOML = """
[grid]
n = 128

[solver]
T = 0.1
mode = 8
snapshot_every = 5
"""


class TestParser:
    """Argument parsing."""

    def test_subcommand_is_required(self):
        """Test that a bare invocation is a usage error."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_suite(self):
        """Test that verify only accepts known suites."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify", "physics"])


class TestModuleScripts:
    """Every module runs as a uv script."""

    @pytest.mark.parametrize("path", sorted(ROOT.glob("*.py")), ids=lambda p: p.name)
    def test_script_header(self, path):
        """Test the shebang, the inline script metadata and a main entry point."""
        text = path.read_text()
        assert text.startswith("#!/usr/bin/env python3\n")
        assert f"# Run this script: uv run python {path.name}" in text
        assert "# /// script\n" in text
        assert "\ndef main(" in text
        assert 'if __name__ == "__main__":' in text


class TestCommands:
    """Subcommands writing into a temporary output directory."""

    def setup_method(self):
        """Set up the small configuration text."""
        self.toml = SMALL_TOML

    def _small(self, tmp_path):
        path = tmp_path / "small.toml"
        path.write_text(self.toml)
        return ["--config", str(path), "--output", str(tmp_path / "out")]

    def test_sequence(self, tmp_path, capsys):
        """Test the p = 6, d = 3 family (3, 4) and its JSON file."""
        code = main(["sequence", "--p", "6", "--d", "3", "--output", str(tmp_path)])
        assert code == EXIT_OK
        report = json.loads((tmp_path / "sequence.json").read_text())
        assert report["example"]["ps"] == [3.0, 4.0]
        assert report["example"]["verdict"]["valid"] is True
        assert '"minimal"' in capsys.readouterr().out

    def test_sequence_not_increasing(self, tmp_path, capsys):
        """Test that a decreasing explicit family exits with 1."""
        code = main(["sequence", "--p", "6", "--ps", "4,3", "--output", str(tmp_path)])
        assert code == EXIT_FAILED
        assert "✗" in capsys.readouterr().err

    def test_rejected_configuration(self, tmp_path, capsys):
        """Test that a0 = 0.2 exits with the usage code."""
        path = tmp_path / "bad.toml"
        path.write_text("[constants]\na0 = 0.2\n")
        assert main(["frequency-map", "--config", str(path)]) == EXIT_USAGE
        assert "constants.a0" in capsys.readouterr().err

    def test_frequency_map(self, tmp_path):
        """Test three boundaries for R = 2 and the SVG diagram."""
        assert main(["frequency-map", "--output", str(tmp_path)]) == EXIT_OK
        summary = json.loads((tmp_path / "frequency_map.json").read_text())
        assert len(summary["boundaries"]) == 3
        assert summary["J"] == 0
        assert (tmp_path / "frequency_map.svg").exists()

    def test_spectrum(self, tmp_path):
        """Test one CSV row per wavenumber plus JSON and SVG."""
        code = main(["spectrum", "--points", "20", "--output", str(tmp_path)])
        assert code == EXIT_OK
        assert len(read_csv(tmp_path / "spectrum.csv")) == 20
        summary = json.loads((tmp_path / "spectrum.json").read_text())
        assert summary["scaling"] == "relax"
        assert (tmp_path / "spectrum.svg").exists()

    def test_decompose_field(self, tmp_path):
        """Test the shell table and regime pieces of a binary field."""
        field = cosine_mode(Grid(1, 128), 8, 0.1)
        path = save_field(field, tmp_path / "c.bin")
        code = main(["decompose", "--field", str(path), "--output", str(tmp_path)])
        assert code == EXIT_OK
        rows = read_csv(tmp_path / "decompose.csv")
        assert list(rows[0]) == ["j", "regime", "p_j", "s", "block_norm", "weighted"]
        summary = json.loads((tmp_path / "decompose.json").read_text())
        assert set(summary["seminorms"]) == {"l", "m1", "m2", "h"}
        for label in ("l", "m1", "m2", "h"):
            assert (tmp_path / f"decompose_{label}.bin").exists()

    def test_verify_lp(self, tmp_path):
        """Test the lp suite from the command line."""
        assert main(["verify", "lp", "--trials", "2", "--output", str(tmp_path)]) == EXIT_OK
        assert json.loads((tmp_path / "verify_lp.json").read_text())["passed"] is True

    def test_simulate(self, tmp_path):
        """Test the norm table, summary and snapshots of a short run."""
        assert main(["simulate", *self._small(tmp_path)]) == EXIT_OK
        out = tmp_path / "out"
        rows = read_csv(out / "simulate.csv")
        assert float(rows[0]["t"]) == 0.0
        summary = json.loads((out / "simulate.json").read_text())
        assert summary["mass_drift"] < 1e-6
        assert summary["T"] == pytest.approx(0.1)
        assert (out / "snapshots" / "c_00000.bin").exists()
        assert (out / "snapshots" / "v0_00000.bin").exists()

    def test_simulate_pme(self, tmp_path):
        """Test the porous-medium run from the well-prepared limit density."""
        assert main(["simulate-pme", *self._small(tmp_path)]) == EXIT_OK
        out = tmp_path / "out"
        rows = read_csv(out / "simulate_pme.csv")
        assert len(rows) == 11
        summary = json.loads((out / "simulate_pme.json").read_text())
        assert summary["mass_drift"] < 1e-10
        assert (out / "snapshots" / "N_00000.bin").exists()
