#!/usr/bin/env python3
"""
Epsilon sweeps for the relaxation limit.

Each sweep point is one damped Euler run (plus, for the relaxation error,
the porous-medium run on the same time grid). Points run in a process pool
capped by HYBESOV_THREADS, finished points are kept in a progress file so an
interrupted sweep resumes, and the surviving points are fitted in log-log
coordinates with scipy.stats.linregress.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python sweeps.py
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
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from euler import CFLViolation, Integrator, VacuumError, damped_mode, run
from experiment_config import ExperimentConfig, eps_list
from functionals import (
    HORIZON_CAP,
    SolutionTrace,
    accumulate_X,
    accumulate_X0,
    decay_horizon,
    relaxation_errors,
)
from grid_field import fft_workers
from initial_data import DataFamily, InitialData, build_initial_data
from littlewood_paley import BesovSpec, besov_norm, build_cutoff
from porous_medium import (
    PMEState,
    PositivityError,
    StabilityError,
    diffusivity,
    run_pme,
)
from results_io import (
    SweepProgress,
    load_progress,
    output_path,
    save_progress,
    wants,
    write_csv,
    write_json,
)
from time_norms import lq_time_norm

logger = logging.getLogger(__name__)

# solver breakdowns that abort one sweep point, not the sweep
POINT_FAILURES = (CFLViolation, VacuumError, PositivityError, StabilityError)
# fitted exponents within this distance of both targets are reported as "both"
TARGET_TIE = 0.05
# error figures of a relaxation point that are fitted against eps
RELAX_FIGURES = ("sup_err", "sup_err_evolved", "gap_err", "mixed_err")


def worker_count(n_tasks: int) -> int:
    return max(1, min(fft_workers(), n_tasks))


@dataclass
class EulerRun:
    data: InitialData
    trace: SolutionTrace
    horizon: float


def euler_run(
    config: ExperimentConfig,
    eps: float,
    family: Union[str, DataFamily, None] = None,
    delta: float = 1.0,
) -> EulerRun:
    """Initial data, Euler trace and decay horizon for one epsilon.

    With solver.horizon = "decay" the run stops at min(solver.T, HORIZON_CAP)
    and the trace is cut at the decay horizon, else it covers [0, solver.T].
    """
    params = config.euler_params(eps)
    part = config.frequency_partition(eps)
    seq = config.admissible_sequence()
    cut = build_cutoff()
    solver = config.solver
    end = min(solver.T, HORIZON_CAP) if solver.horizon == "decay" else solver.T
    data = build_initial_data(
        DataFamily(family or solver.family),
        config.build_grid(),
        params,
        part,
        seq,
        amplitude=solver.amplitude,
        mode=solver.mode,
        seed=solver.seed,
        delta=delta,
        cut=cut,
    )
    states = run(
        data.state,
        params,
        solver.dt,
        end,
        Integrator(solver.integrator),
        solver.resolve_layer,
    )
    trace = SolutionTrace(states, params, part, seq, cut)
    horizon = decay_horizon(trace, cap=end)
    if solver.horizon == "decay":
        trace = trace.truncated(horizon)
    return EulerRun(data, trace, horizon)


def pme_companion(run_: EulerRun, config: ExperimentConfig) -> List[PMEState]:
    """Porous-medium trace from the limit density on the Euler time grid."""
    steps = np.diff(run_.trace.times)
    start = PMEState(run_.data.limit_density)
    return run_pme(start, config.porous_params(), steps=steps)


def damped_mode_series(run_: EulerRun) -> np.ndarray:
    """||W(t)|| in the homogeneous B^{d/p}_{p,1} norm."""
    trace = run_.trace
    spec = BesovSpec(trace.d / trace.seq.p, trace.seq.p)
    return np.array(
        [
            besov_norm(damped_mode(s, trace.params), spec, None, trace.cut)
            for s in trace.states
        ]
    )


def damped_point(config: ExperimentConfig, eps: float) -> Dict[str, Any]:
    run_ = euler_run(config, eps, config.sweep.damped_family)
    series = damped_mode_series(run_)
    times = run_.trace.times
    result: Dict[str, Any] = {
        "eps": eps,
        "T": float(times[-1]),
        "steps": len(times) - 1,
        "decay_horizon": run_.horizon,
        "X0": accumulate_X0(
            run_.trace.states[0], run_.trace.params, run_.trace.part, run_.trace.seq
        ),
        "X": accumulate_X(run_.trace).total,
        "W_tail": float(series[-1]),
    }
    for r in config.sweep.r:
        result[f"W_L{r:g}"] = lq_time_norm(times, series, r)
    return result


def relax_point(config: ExperimentConfig, eps: float, delta: float) -> Dict[str, Any]:
    run_ = euler_run(config, eps, DataFamily.DELTA_PERTURBED, delta)
    limit = pme_companion(run_, config)
    mu = diffusivity(limit[0], config.porous_params())
    errors = relaxation_errors(run_.trace, limit, delta, 1.0, mu)
    result = {"eps": eps, "steps": len(limit) - 1, "decay_horizon": run_.horizon}
    result.update(errors.to_dict())
    return result


@dataclass(frozen=True)
class SweepTask:
    kind: str
    config: ExperimentConfig
    eps: float
    delta: float = 1.0

    @property
    def key(self) -> str:
        if self.kind == "relax":
            return f"relax:delta={self.delta!r}:eps={self.eps!r}"
        return f"{self.kind}:eps={self.eps!r}"


def evaluate(task: SweepTask) -> Tuple[str, Dict[str, Any]]:
    """Run one point; solver breakdowns come back as an aborted record."""
    try:
        if task.kind == "relax":
            result = relax_point(task.config, task.eps, task.delta)
        else:
            result = damped_point(task.config, task.eps)
        result["status"] = "ok"
    except POINT_FAILURES as exc:
        logger.warning("sweep point %s aborted: %s", task.key, exc)
        error = f"{type(exc).__name__}: {exc}"
        result = {"eps": task.eps, "status": "aborted", "error": error}
        if task.kind == "relax":
            result["delta"] = task.delta
    return task.key, result


def run_tasks(
    tasks: Sequence[SweepTask],
    progress: Optional[SweepProgress] = None,
    directory: Optional[Union[str, Path]] = None,
    processes: Optional[int] = None,
) -> Dict[str, Dict[str, Any]]:
    """Results by task key; finished points already in progress are not recomputed."""
    results: Dict[str, Dict[str, Any]] = {}
    pending = []
    for task in tasks:
        if progress is not None and progress.done(task.key):
            results[task.key] = progress.points[task.key]
        else:
            pending.append(task)
    if not pending:
        return results

    def record(key: str, result: Dict[str, Any]) -> None:
        results[key] = result
        mark = "✓" if result["status"] == "ok" else "✗"
        print(f"  {mark} {key}")
        if progress is not None:
            progress.record(key, result)
            if directory is not None:
                save_progress(progress, directory)

    processes = worker_count(len(pending)) if processes is None else processes
    if processes <= 1:
        for task in pending:
            record(*evaluate(task))
    else:
        with Pool(processes=processes) as pool:
            for key, result in pool.imap(evaluate, pending):
                record(key, result)
    return results


@dataclass
class RateFit:
    """Least-squares line through (log eps, log value)."""

    slope: float = math.nan
    intercept: float = math.nan
    r_squared: float = math.nan
    n_points: int = 0
    refused: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.refused is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "refused": self.refused,
        }


def fit_rate(eps: Sequence[float], values: Sequence[float]) -> RateFit:
    """log(value) = slope log(eps) + b over finite positive points; needs 2 of them."""
    x = np.asarray(eps, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = np.isfinite(y) & (y > 0) & np.isfinite(x) & (x > 0)
    n = int(keep.sum())
    if n < 2:
        return RateFit(n_points=n, refused=f"{n} usable point(s), a fit needs 2")
    if np.unique(x[keep]).size < 2:
        return RateFit(n_points=n, refused="all usable points share one eps")
    fit = linregress(np.log(x[keep]), np.log(y[keep]))
    return RateFit(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), n)


def nearest_target(slope: float, power: float, linear: float = 1.0) -> str:
    """Which predicted exponent the fitted slope is closer to."""
    if not math.isfinite(slope):
        return "none"
    a, b = abs(slope - power), abs(slope - linear)
    if abs(a - b) <= TARGET_TIE:
        return "both"
    return "power" if a < b else "linear"


def _column(rows: Sequence[Dict[str, Any]], key: str) -> List[float]:
    return [
        float(row.get(key, math.nan)) if row.get("status") == "ok" else math.nan
        for row in rows
    ]


@dataclass
class DampedModeReport:
    rows: List[Dict[str, Any]]
    fits: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"points": self.rows, "fits": self.fits}


def damped_mode_sweep(
    config: ExperimentConfig,
    directory: Optional[Union[str, Path]] = None,
    processes: Optional[int] = None,
) -> DampedModeReport:
    """||W||_{L^r_T(B^{d/p})} over the eps list, fitted against eps^{2/r-1} and eps."""
    eps_values = eps_list(config)
    progress = load_progress(directory, config.config_hash()) if directory else None
    tasks = [SweepTask("damped", config, eps) for eps in eps_values]
    print(f"Damped-mode sweep over eps = {eps_values}")
    results = run_tasks(tasks, progress, directory, processes)
    rows = [results[t.key] for t in tasks]

    report = DampedModeReport(rows)
    for r in config.sweep.r:
        fit = fit_rate(eps_values, _column(rows, f"W_L{r:g}"))
        power = 2.0 / r - 1.0
        report.fits[f"r={r:g}"] = {
            **fit.to_dict(),
            "r": r,
            "target_power": power,
            "target_linear": 1.0,
            "observed": nearest_target(fit.slope, power) if fit.ok else "none",
        }
    return report


@dataclass
class RelaxLimitReport:
    rows: List[Dict[str, Any]]
    fits: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"points": self.rows, "fits": self.fits}


def relax_limit_sweep(
    config: ExperimentConfig,
    directory: Optional[Union[str, Path]] = None,
    processes: Optional[int] = None,
) -> RelaxLimitReport:
    """rho^eps - N error norms over the eps list for every delta, with fitted slopes."""
    eps_values = eps_list(config)
    progress = load_progress(directory, config.config_hash()) if directory else None
    tasks = [
        SweepTask("relax", config, eps, delta)
        for delta in config.sweep.delta
        for eps in eps_values
    ]
    deltas = list(config.sweep.delta)
    print(f"Relaxation sweep over eps = {eps_values}, delta = {deltas}")
    results = run_tasks(tasks, progress, directory, processes)

    report = RelaxLimitReport([results[t.key] for t in tasks])
    for delta in config.sweep.delta:
        rows = [results[t.key] for t in tasks if t.delta == delta]
        entry: Dict[str, Any] = {"delta": delta, "target": delta}
        for key in RELAX_FIGURES:
            entry[key] = fit_rate(eps_values, _column(rows, key)).to_dict()
        report.fits[f"delta={delta:g}"] = entry
    return report


def _flat_rows(rows: Sequence[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Nested entries (the relaxation tail) spread into dotted columns."""
    out = []
    for row in rows:
        flat: Dict[str, Any] = {}
        for key, value in row.items():
            if isinstance(value, dict):
                for sub, inner in value.items():
                    flat[f"{key}.{sub}"] = inner
            else:
                flat[key] = value
        out.append(flat)
    return out


def emit_damped_mode(report: DampedModeReport, config: ExperimentConfig) -> List[Path]:
    from plots import loglog_figure

    directory, formats = config.output.directory, config.output.formats
    written = []
    if wants(formats, "csv"):
        path = output_path(directory, "damped_mode", "csv")
        written.append(write_csv(_flat_rows(report.rows), path))
    if wants(formats, "json"):
        path = output_path(directory, "damped_mode", "json")
        written.append(write_json(report.to_dict(), path))
    if wants(formats, "svg"):
        eps_values = eps_list(config)
        series = {f"r={r:g}": _column(report.rows, f"W_L{r:g}") for r in config.sweep.r}
        slopes = {k: v["slope"] for k, v in report.fits.items() if v["refused"] is None}
        written.append(
            loglog_figure(
                eps_values,
                series,
                slopes,
                output_path(directory, "damped_mode", "svg"),
                ylabel="||W||_{L^r_T B^{d/p}}",
            )
        )
    return written


def emit_relax_limit(report: RelaxLimitReport, config: ExperimentConfig) -> List[Path]:
    from plots import loglog_figure

    directory, formats = config.output.directory, config.output.formats
    written = []
    if wants(formats, "csv"):
        path = output_path(directory, "relax_limit", "csv")
        written.append(write_csv(_flat_rows(report.rows), path))
    if wants(formats, "json"):
        path = output_path(directory, "relax_limit", "json")
        written.append(write_json(report.to_dict(), path))
    if wants(formats, "svg"):
        eps_values = eps_list(config)
        series, slopes = {}, {}
        for delta in config.sweep.delta:
            rows = [row for row in report.rows if row.get("delta") == delta]
            label = f"delta={delta:g}"
            series[label] = _column(rows, "sup_err")
            fit = report.fits[label]["sup_err"]
            if fit["refused"] is None:
                slopes[label] = fit["slope"]
        written.append(
            loglog_figure(
                eps_values,
                series,
                slopes,
                output_path(directory, "relax_limit", "svg"),
                ylabel="sup_t ||rho - N||_{B^{d/p-delta}}",
            )
        )
    return written


def print_fits(fits: Dict[str, Dict[str, Any]]) -> None:
    for label, fit in fits.items():
        figures = [key for key in RELAX_FIGURES if key in fit]
        if figures:
            for key in figures:
                _print_fit(f"{label} {key}", fit[key], fit)
        else:
            _print_fit(label, fit, fit)


def _print_fit(name: str, inner: Dict[str, Any], fit: Dict[str, Any]) -> None:
    if inner["refused"] is not None:
        print(f"  {name}: fit refused ({inner['refused']})")
        return
    line = f"  {name}: slope {inner['slope']:.3f} (R^2 {inner['r_squared']:.3f})"
    if "observed" in fit:
        line += f", target {fit['target_power']:g} or 1, nearer: {fit['observed']}"
    print(line)


def main():
    """Short damped-mode sweep on a coarse grid."""
    from experiment_config import load_config, with_overrides

    config = with_overrides(
        load_config(),
        grid={"n": 128},
        solver={"T": 0.2},
        sweep={"eps": [0.2, 0.1], "r": [1.0]},
    )
    report = damped_mode_sweep(config, processes=1)
    print_fits(report.fits)


if __name__ == "__main__":
    main()
