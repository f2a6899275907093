#!/usr/bin/env python3
"""
Result emission: RFC 4180 CSV tables, JSON summaries and the resumable
sweep progress file.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python results_io.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
# ]
# ///

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

PROGRESS_FILE = "sweep_progress.json"


def _plain(value: Any) -> Any:
    """numpy scalars and arrays to JSON-ready Python values; non-finite floats to strings."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(rows: Sequence[Dict[str, Any]], path: Union[str, Path]) -> Path:
    """One header row from the union of keys (first-seen order), then the rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header: List[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row[k]) if k in row else "" for k in header])
    logger.debug("wrote %s (%d rows)", path, len(rows))
    return path


def read_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def write_json(data: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as handle:
        json.dump(_plain(data), handle, indent=2)
    return path


def columns_to_rows(columns: Dict[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """{"t": [...], "x": [...]} -> [{"t": .., "x": ..}, ...]."""
    names = list(columns)
    if not names:
        return []
    length = len(columns[names[0]])
    return [{name: columns[name][k] for name in names} for k in range(length)]


@dataclass
class SweepProgress:
    """Finished sweep points keyed by name, valid for one configuration hash."""

    config_hash: str
    points: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def done(self, key: str) -> bool:
        return key in self.points

    def record(self, key: str, result: Dict[str, Any]) -> None:
        self.points[key] = _plain(result)


def save_progress(progress: SweepProgress, directory: Union[str, Path]) -> Path:
    data = {"config_hash": progress.config_hash, "points": progress.points}
    return write_json(data, Path(directory) / PROGRESS_FILE)


def load_progress(directory: Union[str, Path], config_hash: str) -> SweepProgress:
    """Previous progress for the same configuration, else a fresh record."""
    path = Path(directory) / PROGRESS_FILE
    if path.exists():
        try:
            with open(path) as handle:
                data = json.load(handle)
            if data.get("config_hash") == config_hash:
                progress = SweepProgress(config_hash, dict(data.get("points", {})))
                print(f"Resuming sweep with {len(progress.points)} finished points")
                return progress
            logger.info("progress file %s belongs to another configuration", path)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"Could not load progress: {exc}")
    return SweepProgress(config_hash)


def output_path(directory: Union[str, Path], name: str, suffix: str) -> Path:
    return Path(directory) / f"{name}.{suffix}"


def wants(formats: Optional[Sequence[str]], kind: str) -> bool:
    return formats is None or kind in formats


def main():
    """Show how one sweep row is written to CSV cells and JSON."""
    row = {"eps": 0.1, "X": np.float64(2.5), "slope": math.nan, "n_points": np.int64(4)}
    print(",".join(row))
    print(",".join(_cell(v) for v in row.values()))
    print(json.dumps(_plain(row)))


if __name__ == "__main__":
    main()
