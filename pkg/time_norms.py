#!/usr/bin/env python3
"""
Mixed time norms of semi-norm series: L^inf_T by running max, L^q_T by the
composite trapezoid rule on the q-th power.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python time_norms.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
# ]
# ///

import math
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid


def _as_series(times: Sequence[float], values: Sequence[float]):
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError(f"times {t.shape} and values {y.shape} must be matching 1-D series")
    if t.size == 0:
        raise ValueError("empty time series")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    return t, y


def lq_time_norm(times: Sequence[float], values: Sequence[float], q: float) -> float:
    """||values||_{L^q(t_0, t_end)}; a single sample has zero L^q mass for finite q."""
    t, y = _as_series(times, values)
    if math.isinf(q):
        return float(np.max(np.abs(y)))
    if not q >= 1:
        raise ValueError(f"time exponent must be >= 1, got {q}")
    if t.size == 1:
        return 0.0
    integral = float(trapezoid(np.abs(y) ** q, t))
    return integral ** (1.0 / q)


def cumulative_lq(times: Sequence[float], values: Sequence[float], q: float) -> np.ndarray:
    """||values||_{L^q(t_0, t_k)} for every k; non-decreasing."""
    t, y = _as_series(times, values)
    if math.isinf(q):
        return running_max(y)
    if not q >= 1:
        raise ValueError(f"time exponent must be >= 1, got {q}")
    running = cumulative_trapezoid(np.abs(y) ** q, t, initial=0.0)
    return running ** (1.0 / q)


def running_max(values: Sequence[float]) -> np.ndarray:
    return np.maximum.accumulate(np.abs(np.asarray(values, dtype=float)))


def main():
    """Trapezoid norms of exp(-t) on [0, 1] next to the closed forms."""
    times = np.linspace(0.0, 1.0, 101)
    values = np.exp(-times)
    exact = {
        1.0: 1.0 - math.exp(-1.0),
        2.0: math.sqrt((1.0 - math.exp(-2.0)) / 2.0),
        math.inf: 1.0,
    }
    for q, value in exact.items():
        print(f"q = {q:g}: trapezoid {lq_time_norm(times, values, q):.6f}, exact {value:.6f}")


if __name__ == "__main__":
    main()
