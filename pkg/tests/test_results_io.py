"""Tests for CSV/JSON emission and the sweep progress file."""

import json
import math

import numpy as np

from results_io import (
    PROGRESS_FILE,
    SweepProgress,
    columns_to_rows,
    load_progress,
    read_csv,
    save_progress,
    wants,
    write_csv,
    write_json,
)


class TestTables:
    """CSV headers, cell formatting and JSON conversion."""

    def test_header_is_union_of_keys(self, tmp_path):
        """Test first-seen key order and empty cells for missing keys."""
        path = write_csv([{"a": 1, "b": 2.5}, {"a": 2, "c": "x"}], tmp_path / "t.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "a,b,c"
        assert lines[1] == "1,2.5,"
        assert lines[2] == "2,,x"

    def test_floats_keep_full_precision(self, tmp_path):
        """Test repr formatting and nan cells."""
        value = 1.0 / 3.0
        path = write_csv([{"v": value}, {"v": float("nan")}, {"v": np.float64(0.1)}], tmp_path / "f.csv")
        rows = read_csv(path)
        assert float(rows[0]["v"]) == value
        assert rows[1]["v"] == "nan"
        assert rows[2]["v"] == "0.1"

    def test_json_of_numpy_values(self, tmp_path):
        """Test arrays, numpy scalars and non-finite floats."""
        data = {
            "array": np.array([1.0, 2.0]),
            "count": np.int64(3),
            "flag": np.bool_(True),
            "ratio": math.inf,
        }
        path = write_json(data, tmp_path / "out" / "d.json")
        loaded = json.loads(path.read_text())
        assert loaded == {"array": [1.0, 2.0], "count": 3, "flag": True, "ratio": "inf"}

    def test_columns_to_rows(self):
        """Test the column-to-row transpose."""
        assert columns_to_rows({"t": [0, 1], "x": [5, 6]}) == [
            {"t": 0, "x": 5},
            {"t": 1, "x": 6},
        ]
        assert columns_to_rows({}) == []

    def test_wants(self):
        """Test format selection with and without a list."""
        assert wants(None, "svg")
        assert wants(("csv", "json"), "csv")
        assert not wants(("csv", "json"), "svg")


class TestProgress:
    """Resumable sweep progress keyed by configuration hash."""

    def test_resume_same_hash(self, tmp_path):
        """Test that finished points survive a reload with the same hash."""
        progress = SweepProgress("abc")
        progress.record("eps=0.1", {"X": np.float64(1.5)})
        save_progress(progress, tmp_path)
        again = load_progress(tmp_path, "abc")
        assert again.done("eps=0.1")
        assert again.points["eps=0.1"] == {"X": 1.5}

    def test_other_hash_starts_fresh(self, tmp_path):
        """Test that a different configuration ignores old progress."""
        progress = SweepProgress("abc")
        progress.record("eps=0.1", {"X": 1.0})
        save_progress(progress, tmp_path)
        assert load_progress(tmp_path, "def").points == {}

    def test_corrupt_file(self, tmp_path):
        """Test that unreadable progress starts fresh."""
        (tmp_path / PROGRESS_FILE).write_text("{not json")
        assert load_progress(tmp_path, "abc").points == {}
