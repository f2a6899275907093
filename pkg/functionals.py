#!/usr/bin/env python3
"""
Time-integrated hybrid functionals accumulated from Euler solution traces.

X = X^l + sum_i X^{m_i} + X^h with every summand itemized, the initial size
X_0, the two-solution distance dX with its Gronwall weight, and the
relaxation errors between an Euler trace and a porous-medium trace.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python functionals.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
# ]
# ///

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from euler import (
    EulerParams,
    EulerState,
    damped_mode,
    density,
    initial_size,
    mass,
)
from grid_field import GridField, divergence, heat_propagator, scale_vector
from littlewood_paley import (
    AdmissibleSequence,
    BesovSpec,
    DyadicCutoff,
    FrequencyPartition,
    PartitionError,
    Regime,
    ShellTable,
    besov_norm,
    build_cutoff,
    hybrid_shell_table,
)
from porous_medium import PMEState
from time_norms import cumulative_lq, lq_time_norm

logger = logging.getLogger(__name__)

HORIZON_DROP = 1e-3
HORIZON_CAP = 2.0
HORIZON_FLOOR = 1e-10
TIME_ALIGNMENT = 1e-9


class TraceError(ValueError):
    """Empty, non-increasing or misaligned solution traces."""


@dataclass
class ShellRecord:
    """Hybrid shell tables of c, v and the damped mode at one time."""

    t: float
    c: ShellTable
    v: ShellTable
    w: ShellTable


@dataclass
class SolutionTrace:
    """Euler states on a strictly increasing time grid with one partition and sequence."""

    states: List[EulerState]
    params: EulerParams
    part: FrequencyPartition
    seq: AdmissibleSequence
    cut: DyadicCutoff = field(default_factory=build_cutoff)

    def __post_init__(self):
        if not self.states:
            raise TraceError("empty trace")
        times = self.times
        if np.any(np.diff(times) <= 0):
            raise TraceError("trace times must be strictly increasing")
        if self.part.n_medium != self.seq.n_medium:
            raise PartitionError(
                f"partition has {self.part.n_medium} medium regimes, "
                f"sequence has {self.seq.n_medium}"
            )

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states], dtype=float)

    @property
    def d(self) -> int:
        return self.states[0].grid.d

    @cached_property
    def records(self) -> List[ShellRecord]:
        out = []
        for state in self.states:
            w = damped_mode(state, self.params)
            out.append(
                ShellRecord(
                    state.t,
                    hybrid_shell_table(state.c, self.part, self.seq, self.cut),
                    hybrid_shell_table(state.v, self.part, self.seq, self.cut),
                    hybrid_shell_table(w, self.part, self.seq, self.cut),
                )
            )
        return out

    def seminorm_series(self, name: str, regime: Regime, s: float) -> np.ndarray:
        return np.array([getattr(r, name).seminorm(regime, s) for r in self.records])

    def truncated(self, t_end: float) -> "SolutionTrace":
        keep = [s for s in self.states if s.t <= t_end * (1 + 1e-12)]
        return SolutionTrace(keep, self.params, self.part, self.seq, self.cut)


# (label, field, time exponent, regularity shift, weight power of eps)
_LOWER_ITEMS: Tuple[Tuple[str, str, float, float, int], ...] = (
    ("c.Linf", "c", math.inf, 0.0, 0),
    ("c.L1", "c", 1.0, 2.0, 0),
    ("eps_v.Linf", "v", math.inf, 0.0, 1),
    ("v.L2", "v", 2.0, 0.0, 0),
    ("v.L1", "v", 1.0, 1.0, 0),
    ("W.L1_over_eps", "w", 1.0, 0.0, -1),
)
_HIGH_ITEMS: Tuple[Tuple[str, str, float, float, int], ...] = (
    ("eps_c.Linf", "c", math.inf, 0.0, 1),
    ("c.L1_over_eps", "c", 1.0, 0.0, -1),
    ("eps2_v.Linf", "v", math.inf, 0.0, 2),
    ("v.L1", "v", 1.0, 0.0, 0),
)


@dataclass
class HybridFunctional:
    """X itemized per regime; totals are plain sums of the items."""

    low: Dict[str, float]
    medium: List[Dict[str, float]]
    high: Dict[str, float]

    @property
    def x_low(self) -> float:
        return sum(self.low.values())

    @property
    def x_medium(self) -> List[float]:
        return [sum(items.values()) for items in self.medium]

    @property
    def x_high(self) -> float:
        return sum(self.high.values())

    @property
    def total(self) -> float:
        return self.x_low + sum(self.x_medium) + self.x_high

    def itemized(self) -> Dict[str, float]:
        out = {f"l.{k}": v for k, v in self.low.items()}
        for i, items in enumerate(self.medium, 1):
            out.update({f"m{i}.{k}": v for k, v in items.items()})
        out.update({f"h.{k}": v for k, v in self.high.items()})
        return out

    def to_dict(self) -> Dict:
        return {
            "X_low": self.x_low,
            "X_medium": self.x_medium,
            "X_high": self.x_high,
            "X_total": self.total,
            "items": self.itemized(),
        }


def _regime_plan(trace: SolutionTrace) -> List[Tuple[str, Regime, float, tuple]]:
    """(prefix, regime, base regularity, items) for low, medium_i, high."""
    d, seq = trace.d, trace.seq
    plan = [("l", Regime.low(), d / seq.p, _LOWER_ITEMS)]
    for i, p_i in enumerate(seq.ps, 1):
        plan.append((f"m{i}", Regime.medium(i), d / p_i, _LOWER_ITEMS))
    plan.append(("h", Regime.high(), d / 2 + 1, _HIGH_ITEMS))
    return plan


def accumulate_X_series(trace: SolutionTrace) -> Dict[str, np.ndarray]:
    """Every summand of X as a function of the horizon T = t_k."""
    times, eps = trace.times, trace.params.eps
    series: Dict[str, np.ndarray] = {}
    for prefix, regime, s, items in _regime_plan(trace):
        for label, name, q, shift, power in items:
            values = trace.seminorm_series(name, regime, s + shift)
            series[f"{prefix}.{label}"] = eps**power * cumulative_lq(times, values, q)
    return series


def accumulate_X(trace: SolutionTrace) -> HybridFunctional:
    """L^inf_T by running max, L^1_T and L^2_T by the trapezoid rule, eps weights as printed."""
    final = {k: float(v[-1]) for k, v in accumulate_X_series(trace).items()}
    low = {k[2:]: v for k, v in final.items() if k.startswith("l.")}
    high = {k[2:]: v for k, v in final.items() if k.startswith("h.")}
    medium = []
    for i in range(1, trace.seq.n_medium + 1):
        prefix = f"m{i}."
        medium.append({k[len(prefix) :]: v for k, v in final.items() if k.startswith(prefix)})
    return HybridFunctional(low, medium, high)


def accumulate_X0(
    state0: EulerState,
    params: EulerParams,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    cut: Optional[DyadicCutoff] = None,
) -> float:
    return initial_size(state0, params, part, seq, cut).total


@dataclass
class DistanceReport:
    """dX(t) with the Gronwall weight of the two solutions and the Gronwall ratio."""

    times: np.ndarray
    delta_x: np.ndarray
    weight: np.ndarray

    @property
    def delta_x0(self) -> float:
        return float(self.delta_x[0])

    @property
    def gronwall_ratio(self) -> np.ndarray:
        """dX(t) / (dX_0 exp(int_0^t weight))."""
        growth = np.exp(cumulative_lq(self.times, self.weight, 1.0))
        bound = self.delta_x0 * growth
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(bound > 0, self.delta_x / np.where(bound > 0, bound, 1.0), 0.0)
        return np.where((bound == 0) & (self.delta_x > 0), np.inf, ratio)

    def to_dict(self) -> Dict:
        return {
            "delta_X0": self.delta_x0,
            "delta_X_max": float(np.max(self.delta_x)),
            "gronwall_ratio_max": float(np.max(self.gronwall_ratio)),
        }


def _distance_levels(trace: SolutionTrace) -> List[Tuple[Regime, float]]:
    d, seq = trace.d, trace.seq
    levels = [(Regime.high(), d / 2), (Regime.low(), d / seq.p)]
    levels += [(Regime.medium(i), d / p_i) for i, p_i in enumerate(seq.ps, 1)]
    return levels


def _weight_levels(trace: SolutionTrace) -> List[Tuple[Regime, float]]:
    d, seq = trace.d, trace.seq
    levels = [(Regime.high(), d / 2 + 1), (Regime.low(), d / seq.p)]
    levels += [(Regime.medium(i), d / p_i) for i, p_i in enumerate(seq.ps, 1)]
    return levels


def _pair_size(c, v, trace: SolutionTrace, levels) -> float:
    table_c = hybrid_shell_table(c, trace.part, trace.seq, trace.cut)
    table_v = hybrid_shell_table(v, trace.part, trace.seq, trace.cut)
    return sum(table_c.seminorm(r, s) + table_v.seminorm(r, s) for r, s in levels)


def check_aligned(times_a: Sequence[float], times_b: Sequence[float]) -> None:
    a, b = np.asarray(times_a, float), np.asarray(times_b, float)
    if a.shape != b.shape or not np.allclose(a, b, rtol=0.0, atol=TIME_ALIGNMENT):
        raise TraceError("traces are not aligned in time")


def two_solution_distance(trace_a: SolutionTrace, trace_b: SolutionTrace) -> DistanceReport:
    """dX with exponents d/2 (high), d/p_i (medium i), d/p (low)."""
    check_aligned(trace_a.times, trace_b.times)
    if trace_a.states[0].grid != trace_b.states[0].grid or trace_a.part != trace_b.part:
        raise TraceError("traces use different grids or partitions")
    distance_levels = _distance_levels(trace_a)
    weight_levels = _weight_levels(trace_a)
    delta, weight = [], []
    for sa, sb in zip(trace_a.states, trace_b.states):
        delta.append(_pair_size(sa.c - sb.c, sa.v - sb.v, trace_a, distance_levels))
        weight.append(
            _pair_size(sa.c, sa.v, trace_a, weight_levels)
            + _pair_size(sb.c, sb.v, trace_a, weight_levels)
        )
    return DistanceReport(trace_a.times, np.array(delta), np.array(weight))


def _sound_size(trace: SolutionTrace, regime: Regime) -> np.ndarray:
    """eps ||c|| + eps^2 ||v|| in B^{d/2+1} over the regime, per state."""
    s, eps = trace.d / 2 + 1, trace.params.eps
    c = trace.seminorm_series("c", regime, s)
    return eps * c + eps**2 * trace.seminorm_series("v", regime, s)


def decay_horizon(trace: SolutionTrace, cap: float = HORIZON_CAP) -> float:
    """First time after the initial layer that the high-frequency size falls
    below HORIZON_DROP of its post-layer peak, capped by cap and the last time.

    The layer ends at t = eps^2. High content that never rises above
    HORIZON_FLOOR of the full size is round-off and keeps the whole run.
    """
    high = _sound_size(trace, Regime.high())
    scale = float(np.max(_sound_size(trace, Regime.full())))
    times = trace.times
    end = float(min(cap, times[-1]))
    after_layer = np.nonzero(times >= times[0] + trace.params.eps**2)[0]
    if after_layer.size == 0:
        return end
    start = int(after_layer[0])
    peak_at = start + int(np.argmax(high[start:]))
    peak = high[peak_at]
    if peak <= HORIZON_FLOOR * scale:
        return end
    below = np.nonzero(high[peak_at:] < HORIZON_DROP * peak)[0]
    if below.size == 0:
        return end
    return float(min(end, times[peak_at + below[0]]))


def darcy_source(state: EulerState, params: EulerParams) -> GridField:
    """S = -div(rho W)."""
    rho = density(state, params)
    return -divergence(scale_vector(rho, damped_mode(state, params)))


@dataclass
class RelaxationErrors:
    delta: float
    r: float
    times: np.ndarray
    sup_series: np.ndarray
    mixed_series: np.ndarray
    w_series: np.ndarray
    source_series: np.ndarray
    gap_series: Optional[np.ndarray] = None

    @property
    def sup_err(self) -> float:
        return lq_time_norm(self.times, self.sup_series, math.inf)

    @property
    def sup_err_evolved(self) -> float:
        """Sup over t >= the first step, leaving out the initial gap itself."""
        if self.times.size < 2:
            return math.nan
        return lq_time_norm(self.times[1:], self.sup_series[1:], math.inf)

    @property
    def gap_err(self) -> float:
        """Sup of the error minus the heat-propagated initial error."""
        if self.gap_series is None:
            return math.nan
        return lq_time_norm(self.times, self.gap_series, math.inf)

    @property
    def mixed_err(self) -> float:
        return lq_time_norm(self.times, self.mixed_series, 2.0 / (1.0 + self.delta))

    @property
    def w_lr(self) -> float:
        return lq_time_norm(self.times, self.w_series, self.r)

    @property
    def tail(self) -> Dict[str, float]:
        """Integrands at the horizon, bounding what a longer run could add."""
        return {
            "sup": float(self.sup_series[-1]),
            "mixed": float(self.mixed_series[-1]),
            "W": float(self.w_series[-1]),
        }

    def to_dict(self) -> Dict:
        return {
            "delta": self.delta,
            "r": self.r,
            "T": float(self.times[-1]),
            "sup_err": self.sup_err,
            "sup_err_evolved": self.sup_err_evolved,
            "gap_err": self.gap_err,
            "mixed_err": self.mixed_err,
            "W_Lr": self.w_lr,
            "source_max": float(np.max(self.source_series)),
            "tail": self.tail,
        }


def relaxation_errors(
    euler_trace: SolutionTrace,
    pme_states: Sequence[PMEState],
    delta: float,
    r: float,
    mu: Optional[float] = None,
) -> RelaxationErrors:
    """rho^eps - N in B^{d/p-delta} (sup) and B^{d/p+1} (L^{2/(1+delta)}), W in L^r_T(B^{d/p}).

    With the limit diffusivity mu, the gap series measures the error minus
    exp(t mu lap) applied to the initial error, which is what the dynamics add.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if not 1 <= r < 2:
        raise ValueError(f"r must lie in [1, 2), got {r}")
    check_aligned(euler_trace.times, [s.t for s in pme_states])
    params, cut, p, d = euler_trace.params, euler_trace.cut, euler_trace.seq.p, euler_trace.d
    sup_spec = BesovSpec(d / p - delta, p)
    sup, mixed, w, source, gap = [], [], [], [], []
    initial = None
    for state, limit in zip(euler_trace.states, pme_states):
        error = density(state, params) - limit.density
        if initial is None:
            initial = error
        sup.append(besov_norm(error, sup_spec, None, cut))
        if mu is not None:
            evolved = heat_propagator(initial, state.t - euler_trace.times[0], mu)
            gap.append(besov_norm(error - evolved, sup_spec, None, cut))
        mixed.append(besov_norm(error, BesovSpec(d / p + 1, p), None, cut))
        w.append(besov_norm(damped_mode(state, params), BesovSpec(d / p, p), None, cut))
        source.append(
            besov_norm(darcy_source(state, params), BesovSpec(d / p - 1, p), None, cut)
        )
    return RelaxationErrors(
        delta,
        r,
        euler_trace.times,
        np.array(sup),
        np.array(mixed),
        np.array(w),
        np.array(source),
        np.array(gap) if mu is not None else None,
    )


def norm_rows(trace: SolutionTrace) -> List[Dict[str, float]]:
    """Per-step regime semi-norms, damped-mode norms and mass for the simulate CSV."""
    rows = []
    levels = _weight_levels(trace)
    for state, record in zip(trace.states, trace.records):
        row = {"t": state.t}
        for regime, s in levels:
            row[f"c.{regime.label}"] = record.c.seminorm(regime, s)
            row[f"v.{regime.label}"] = record.v.seminorm(regime, s)
            row[f"W.{regime.label}"] = record.w.seminorm(regime, s)
        row["mass"] = mass(state, trace.params)
        rows.append(row)
    return rows


def main():
    """Accumulate X on a short well-prepared run."""
    from euler import run
    from initial_data import well_prepared
    from grid_field import Grid
    from littlewood_paley import example_sequence

    params = EulerParams(eps=0.1)
    grid = Grid(d=1, n=256)
    seq = example_sequence(6, 1)
    part = FrequencyPartition(params.eps, k0=-3, n_medium=seq.n_medium)
    data = well_prepared(grid, params)
    states = run(data.state, params, dt=0.01, t_end=0.5)
    trace = SolutionTrace(states, params, part, seq)
    functional = accumulate_X(trace)
    print(f"X_0 = {accumulate_X0(data.state, params, part, seq):.4e}")
    for key, value in functional.itemized().items():
        print(f"  {key:22s} {value:.4e}")
    print(f"X = {functional.total:.4e}")


if __name__ == "__main__":
    main()
