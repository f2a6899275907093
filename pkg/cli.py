#!/usr/bin/env python3
"""
hybesov command line.

Subcommands: verify, decompose, spectrum, simulate, simulate-pme,
relax-limit, damped-mode, sequence, frequency-map. Every subcommand reads an
optional TOML experiment file (--config) and writes CSV / JSON / SVG / binary
results into the configured output directory.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python cli.py verify lp
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
#     "matplotlib>=3.8.0",
# ]
# ///

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from experiment_config import ConfigError, ExperimentConfig, load_config, with_overrides
from grid_field import load_field, lp_norm, save_field
from initial_data import InitialData, build_initial_data
from littlewood_paley import (
    AdmissibleSequence,
    BesovSpec,
    Regime,
    SequenceError,
    besov_norm,
    build_cutoff,
    dyadic_block,
    example_sequence,
    hybrid_shell_table,
    minimal_sequence,
    project_regime,
    shell_indices,
    validate_sequence,
)
from results_io import output_path, wants, write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
SUITE_CHOICES = ("all", "lp", "bony", "spectral", "solvers")


def _config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config)
    if getattr(args, "output", None):
        config = with_overrides(config, output={"directory": args.output})
    if getattr(args, "eps", None) is not None:
        config = with_overrides(config, physics={"eps": args.eps})
    return config


def _emit(
    config: ExperimentConfig,
    name: str,
    rows: Optional[List[Dict[str, Any]]] = None,
    summary: Optional[Dict[str, Any]] = None,
) -> None:
    directory, formats = config.output.directory, config.output.formats
    if rows is not None and wants(formats, "csv"):
        print(f"  wrote {write_csv(rows, output_path(directory, name, 'csv'))}")
    if summary is not None and wants(formats, "json"):
        print(f"  wrote {write_json(summary, output_path(directory, name, 'json'))}")


def _initial_data(config: ExperimentConfig) -> InitialData:
    eps = config.physics.eps
    return build_initial_data(
        config.solver.family,
        config.build_grid(),
        config.euler_params(eps),
        config.frequency_partition(eps),
        config.admissible_sequence(),
        amplitude=config.solver.amplitude,
        mode=config.solver.mode,
        seed=config.solver.seed,
    )


def _regularity(regime: Regime, d: int, seq: AdmissibleSequence) -> float:
    """d/2 + 1 on the high regime, d/p_i elsewhere (as in X_0)."""
    if regime == Regime.high():
        return d / 2.0 + 1.0
    return d / seq.exponent(regime)


def cmd_verify(args: argparse.Namespace) -> int:
    from verification import SUITES, print_report, run_suite

    config = _config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    passed = True
    for name in names:
        report = run_suite(name, config, args.trials)
        print_report(report)
        _emit(config, f"verify_{name}", summary=report.to_dict())
        passed = passed and report.passed
    print("✓ all hard checks passed" if passed else "✗ some hard checks failed")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_decompose(args: argparse.Namespace) -> int:
    config = _config(args)
    f = load_field(args.field) if args.field else _initial_data(config).state.c
    cut = build_cutoff()
    part = config.frequency_partition()
    seq = config.admissible_sequence()
    d = f.grid.d

    rows = []
    for j in shell_indices(f.grid, cut):
        regime = part.regime_of(j)
        p_j = seq.exponent(regime)
        s = _regularity(regime, d, seq)
        norm = lp_norm(dyadic_block(f, j, cut), p_j)
        rows.append(
            {
                "j": j,
                "regime": regime.label,
                "p_j": p_j,
                "s": s,
                "block_norm": norm,
                "weighted": 2.0 ** (j * s) * norm,
            }
        )
    table = hybrid_shell_table(f, part, seq, cut)
    seminorms = {
        regime.label: table.seminorm(regime, _regularity(regime, d, seq))
        for regime in part.regimes()
    }
    print(f"Decomposed field on n={f.grid.n}, d={d}: J={part.jeps}, R={part.n_medium}")
    for label, value in seminorms.items():
        print(f"  {label}: {value:.6e}")

    summary = {
        "partition": {"eps": part.eps, "J": part.jeps, "R": part.n_medium},
        "sequence": seq.to_dict(),
        "seminorms": seminorms,
        "besov_d_over_p": besov_norm(f, BesovSpec(d / seq.p, seq.p), None, cut),
    }
    _emit(config, "decompose", rows, summary)
    if wants(config.output.formats, "bin"):
        directory = config.output.directory
        for regime in part.regimes():
            piece = project_regime(f, part, regime, cut)
            save_field(piece, output_path(directory, f"decompose_{regime.label}", "bin"))
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    from plots import spectral_figure
    from spectral import Scaling, asymptotics_report, spectral_curves, trend_summary

    config = _config(args)
    eps = config.physics.eps
    scaling = Scaling(args.scaling)
    xi = np.logspace(math.log10(args.xi_min), math.log10(args.xi_max), args.points)
    curves = spectral_curves(eps, xi, scaling)
    columns = ("xi", "re_plus", "im_plus", "re_minus", "im_minus")
    rows = [{key: float(curves[key][k]) for key in columns} for k in range(xi.size)]
    report = asymptotics_report(eps, xi, scaling)
    summary = {
        "eps": eps,
        "scaling": scaling.value,
        "trends": trend_summary(report),
        "asymptotics": [row.to_dict() for row in report],
    }
    print(f"Spectrum at eps={eps:g} ({scaling.value}), {xi.size} wavenumbers")
    _emit(config, "spectrum", rows, summary)
    if wants(config.output.formats, "svg"):
        path = output_path(config.output.directory, "spectrum", "svg")
        print(f"  wrote {spectral_figure(curves, eps, path)}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    from euler import mass, smallness_gate, snapshots
    from functionals import accumulate_X, norm_rows
    from sweeps import euler_run

    config = _config(args)
    eps = config.physics.eps
    print(
        f"Simulating damped Euler: eps={eps:g}, T={config.solver.T:g}, "
        f"family={config.solver.family}"
    )
    run_ = euler_run(config, eps)
    trace = run_.trace
    gate = smallness_gate(
        trace.states[0], trace.params, trace.part, trace.seq, config.constants.eta
    )
    functional = accumulate_X(trace)
    m0 = mass(trace.states[0], trace.params)
    drift = max(abs(mass(s, trace.params) / m0 - 1.0) for s in trace.states)
    mark = "✓" if gate.passed else "✗"
    print(f"  {mark} smallness gate: X0 = {gate.x0:.4e} (eta = {gate.eta:g})")
    print(f"  X = {functional.total:.4e}, mass drift {drift:.2e}")

    summary = {
        "eps": eps,
        "steps": len(trace.states) - 1,
        "T": float(trace.times[-1]),
        "decay_horizon": run_.horizon,
        "gate": gate.to_dict(),
        "X": functional.to_dict(),
        "mass_drift": drift,
    }
    _emit(config, "simulate", norm_rows(trace), summary)
    if wants(config.output.formats, "bin"):
        directory = config.output.directory
        for k, state in enumerate(snapshots(trace.states, config.solver.snapshot_every)):
            save_field(state.c, output_path(directory, f"snapshots/c_{k:05d}", "bin"))
            for i, comp in enumerate(state.v):
                save_field(comp, output_path(directory, f"snapshots/v{i}_{k:05d}", "bin"))
    return EXIT_OK


def cmd_simulate_pme(args: argparse.Namespace) -> int:
    from porous_medium import PMEState, pme_functional_Y, run_pme

    config = _config(args)
    data = _initial_data(config)
    states = run_pme(
        PMEState(data.limit_density),
        config.porous_params(),
        config.solver.dt,
        config.solver.T,
    )
    cut = build_cutoff()
    p = config.admissible_sequence().p
    d = states[0].grid.d
    sup_spec, smooth_spec = BesovSpec(d / p, p), BesovSpec(d / p + 2.0, p)
    rows = [
        {
            "t": state.t,
            "N.sup": besov_norm(state.density, sup_spec, None, cut),
            "N.smooth": besov_norm(state.density, smooth_spec, None, cut),
            "mean": state.mean_density,
        }
        for state in states
    ]
    y = pme_functional_Y(states, p, cut)
    drift = abs(states[-1].mean_density / states[0].mean_density - 1.0)
    print(
        f"Simulated porous medium to T={states[-1].t:g}: Y = {y.total:.4e}, "
        f"mass drift {drift:.2e}"
    )
    _emit(config, "simulate_pme", rows, {"Y": y.to_dict(), "mass_drift": drift})
    if wants(config.output.formats, "bin"):
        directory = config.output.directory
        for k, state in enumerate(states[:: config.solver.snapshot_every]):
            save_field(state.density, output_path(directory, f"snapshots/N_{k:05d}", "bin"))
    return EXIT_OK


def cmd_relax_limit(args: argparse.Namespace) -> int:
    from sweeps import emit_relax_limit, print_fits, relax_limit_sweep

    config = _config(args)
    report = relax_limit_sweep(config, config.output.directory, args.processes)
    print_fits(report.fits)
    for path in emit_relax_limit(report, config):
        print(f"  wrote {path}")
    return EXIT_OK


def cmd_damped_mode(args: argparse.Namespace) -> int:
    from sweeps import damped_mode_sweep, emit_damped_mode, print_fits

    config = _config(args)
    report = damped_mode_sweep(config, config.output.directory, args.processes)
    print_fits(report.fits)
    for path in emit_damped_mode(report, config):
        print(f"  wrote {path}")
    return EXIT_OK


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def sequence_report(
    p: float, d: int, ps: Optional[Sequence[float]] = None
) -> Dict[str, Any]:
    """Verdict for an explicit sequence, else for the explicit family and the minimal one."""
    report: Dict[str, Any] = {"p": p, "d": d}
    if ps is not None:
        seq = AdmissibleSequence(p, d, tuple(ps))
        report["sequence"] = seq.to_dict()
        report["verdict"] = validate_sequence(seq).to_dict()
        return report
    try:
        seq = example_sequence(p, d)
        report["example"] = {**seq.to_dict(), "verdict": validate_sequence(seq).to_dict()}
    except SequenceError as exc:
        report["example"] = {"error": str(exc)}
    minimal = minimal_sequence(p, d)
    report["minimal"] = {
        **minimal.to_dict(),
        "verdict": validate_sequence(minimal).to_dict(),
    }
    return report


def cmd_sequence(args: argparse.Namespace) -> int:
    config = _config(args)
    d = args.d if args.d is not None else config.grid.d
    try:
        report = sequence_report(args.p, d, _floats(args.ps) if args.ps else None)
    except SequenceError as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_FAILED
    print(json.dumps(report, indent=2))
    _emit(config, "sequence", summary=report)
    return EXIT_OK


def cmd_frequency_map(args: argparse.Namespace) -> int:
    from plots import boundaries, frequency_map_figure, frequency_zones

    config = _config(args)
    part = config.frequency_partition()
    seq = config.admissible_sequence()
    zones = frequency_zones(part, seq)
    marks = boundaries(zones)
    print(
        f"Frequency map: p={seq.p:g}, R={part.n_medium}, J={part.jeps}, "
        f"{len(marks)} boundaries, {len(zones)} zones"
    )
    summary = {
        "J": part.jeps,
        "boundaries": marks,
        "zones": [
            {"name": z.name, "exponent": z.exponent, "start": z.start, "stop": z.stop}
            for z in zones
        ],
    }
    _emit(config, "frequency_map", summary=summary)
    if wants(config.output.formats, "svg"):
        path = output_path(config.output.directory, "frequency_map", "svg")
        print(f"  wrote {frequency_map_figure(part, seq, path)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybesov",
        description="Hybrid Besov toolkit for damped Euler and its porous-medium limit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment file")
    common.add_argument("--output", help="override output.directory")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="run invariant suites")
    verify.add_argument("suite", nargs="?", default="all", choices=SUITE_CHOICES)
    verify.add_argument("--trials", type=int, default=None, help="random trials per check")
    verify.set_defaults(func=cmd_verify)

    decompose = sub.add_parser("decompose", parents=[common], help="shell decomposition")
    decompose.add_argument("--field", type=Path, help="binary field dump")
    decompose.add_argument("--eps", type=float)
    decompose.set_defaults(func=cmd_decompose)

    spectrum = sub.add_parser("spectrum", parents=[common], help="eigenvalue curves")
    spectrum.add_argument("--eps", type=float)
    spectrum.add_argument("--scaling", choices=["relax", "diffusive"], default="relax")
    spectrum.add_argument("--xi-min", type=float, default=1e-2)
    spectrum.add_argument("--xi-max", type=float, default=1e3)
    spectrum.add_argument("--points", type=int, default=200)
    spectrum.set_defaults(func=cmd_spectrum)

    for name, func, text in (
        ("simulate", cmd_simulate, "damped Euler run"),
        ("simulate-pme", cmd_simulate_pme, "porous medium run"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--eps", type=float)
        cmd.set_defaults(func=func)

    for name, func, text in (
        ("relax-limit", cmd_relax_limit, "relaxation error sweep"),
        ("damped-mode", cmd_damped_mode, "damped-mode decay sweep"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--processes", type=int, default=None, help="pool size")
        cmd.set_defaults(func=func)

    sequence = sub.add_parser("sequence", parents=[common], help="admissible sequences")
    sequence.add_argument("--p", type=float, required=True)
    sequence.add_argument("--d", type=int, default=None)
    sequence.add_argument("--ps", help="comma separated medium exponents")
    sequence.set_defaults(func=cmd_sequence)

    fmap = sub.add_parser("frequency-map", parents=[common], help="regime diagram")
    fmap.add_argument("--eps", type=float)
    fmap.set_defaults(func=cmd_frequency_map)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"✗ configuration rejected: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
