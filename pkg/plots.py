#!/usr/bin/env python3
"""
Static SVG figures: spectral curves of the linear symbol, the frequency
regime diagram and log-log rate fits.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python plots.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
#     "matplotlib>=3.8.0",
# ]
# ///

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Union

import matplotlib

matplotlib.use("Agg")  # files only
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from littlewood_paley import AdmissibleSequence, FrequencyPartition  # noqa: E402

logger = logging.getLogger(__name__)

# fixed so identical inputs give identical SVG text
plt.rcParams["svg.hashsalt"] = "hybesov"
plt.rcParams["svg.fonttype"] = "none"


@dataclass
class Zone:
    """A band of dyadic indices measured in one Lebesgue exponent; stop None is unbounded."""

    name: str
    exponent: str
    start: Union[int, None]
    stop: Union[int, None]


def frequency_zones(part: FrequencyPartition, seq: AdmissibleSequence) -> List[Zone]:
    """Low, medium R..1, high in increasing frequency."""
    zones = [Zone("Low-f", f"L^{seq.p:g}", None, part.low_upper)]
    for i in range(part.n_medium, 0, -1):
        lo, hi = part.medium_window(i)
        zones.append(Zone(f"Medium-f {i}", f"L^{seq.ps[i - 1]:g}", lo, hi))
    zones.append(Zone("High-f", "L^2", part.jeps, None))
    return zones


def boundaries(zones: Sequence[Zone]) -> List[int]:
    return [z.stop for z in zones if z.stop is not None]


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("wrote %s", path)
    return path


def spectral_figure(curves: Dict[str, np.ndarray], eps: float, path) -> Path:
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(10, 4))
    xi = curves["xi"]
    ax_re.loglog(xi, curves["re_plus"], label="Re lambda+")
    ax_re.loglog(xi, np.maximum(curves["re_minus"], 1e-300), label="Re lambda-")
    ax_re.set_xlabel("|xi|")
    ax_re.set_title(f"decay rates, eps = {eps:g}")
    ax_re.legend()
    ax_im.semilogx(xi, curves["im_plus"], label="Im lambda+")
    ax_im.semilogx(xi, curves["im_minus"], label="Im lambda-")
    ax_im.set_xlabel("|xi|")
    ax_im.set_title("oscillation")
    ax_im.legend()
    fig.tight_layout()
    return _save(fig, path)


def frequency_map_figure(
    part: FrequencyPartition, seq: AdmissibleSequence, path
) -> Path:
    zones = frequency_zones(part, seq)
    marks = boundaries(zones)
    left = (marks[0] if marks else part.jeps) - 2 * max(part.n0, 1)
    right = (marks[-1] if marks else part.jeps) + 2 * max(part.n0, 1)
    fig, ax = plt.subplots(figsize=(10, 2.2))
    ax.annotate(
        "", xy=(right, 0), xytext=(left, 0), arrowprops={"arrowstyle": "->", "lw": 1.5}
    )
    for j in marks:
        ax.axvline(j, ymin=0.3, ymax=0.7, color="black", lw=1.2)
        ax.text(j, -0.35, f"j = {j}", ha="center", va="top", fontsize=8)
    for zone in zones:
        start = left if zone.start is None else zone.start
        stop = right if zone.stop is None else zone.stop
        middle = 0.5 * (start + stop)
        ax.text(middle, 0.3, zone.name, ha="center", va="bottom", fontsize=9)
        ax.text(middle, 0.12, zone.exponent, ha="center", va="bottom", fontsize=9)
    ax.text(left, -0.35, "0", ha="left", va="top", fontsize=8)
    ax.text(right, -0.35, "inf", ha="right", va="top", fontsize=8)
    ax.set_xlim(left, right)
    ax.set_ylim(-0.8, 0.8)
    ax.axis("off")
    ax.set_title(f"frequency regimes: p = {seq.p:g}, R = {part.n_medium}, J = {part.jeps}")
    return _save(fig, path)


def loglog_figure(
    eps: Sequence[float],
    series: Dict[str, Sequence[float]],
    slopes: Dict[str, float],
    path,
    ylabel: str = "error",
) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    x = np.asarray(eps, dtype=float)
    for label, values in series.items():
        y = np.asarray(values, dtype=float)
        keep = np.isfinite(y) & (y > 0)
        if not keep.any():
            continue
        slope = slopes.get(label)
        legend = label if slope is None else f"{label} (slope {slope:.3f})"
        ax.loglog(x[keep], y[keep], "o-", label=legend)
    ax.set_xlabel("eps")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def main():
    """Draw the regime diagram of the default configuration."""
    from experiment_config import load_config

    config = load_config()
    path = frequency_map_figure(
        config.frequency_partition(), config.admissible_sequence(), "frequency_map.svg"
    )
    print(f"Wrote {path}")


if __name__ == "__main__":
    main()
