#!/usr/bin/env python3
"""
Invariant suites behind the `verify` subcommand.

Suites: lp (partition of unity, regime tiling, sequence validation), bony
(Bony identity, support vanishing, shell margins, law ratios), spectral
(Vieta, asymptotics, exact propagator, damped-mode rewrite) and solvers
(fixed points, conservation, linear consistency, Darcy law). Every check
records its measured value; hard checks decide the exit status, soft ones
are reported only.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python verification.py
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
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import expm

from bony import (
    bony_decompose,
    commutator_law_ratio,
    measure_margins,
    product_law_ratio,
    support_vanish_residual,
)
from euler import EulerState, Integrator, mass, run, step
from experiment_config import ExperimentConfig
from grid_field import (
    Grid,
    VecField,
    band_limited_random,
    cosine_mode,
    gradient,
    lp_norm,
    product,
    random_coefficients,
    trig_polynomial,
    vector_lp_norm,
)
from initial_data import well_prepared
from littlewood_paley import (
    AdmissibleSequence,
    PartitionError,
    SequenceError,
    bernstein_ratio,
    build_cutoff,
    dyadic_block,
    embedding_ratio,
    example_sequence,
    shell_indices,
    subgrid_remainder,
    validate_sequence,
)
from porous_medium import PMEState, PorousParams, darcy_velocity, diffusivity, run_pme
from spectral import (
    LinearSymbol,
    Scaling,
    damped_mode_residual,
    eigenvalues,
    linear_propagate,
    propagator_matrix,
)

logger = logging.getLogger(__name__)

SUITES = ("lp", "bony", "spectral", "solvers")
DEFAULT_TRIALS = 20
VERIFY_GRID = Grid(d=1, n=1024)
STABILITY_FACTOR = 2.0
INVARIANT_TRIALS = 100
LAW_PAIRS = 50
RESOLUTIONS = (512, 1024)
# box of the resolution and eps comparisons; xi_k = k / 8
INVARIANT_BOX = 2.0 * math.pi * 8
BERNSTEIN_EXPONENTS = ((1.0, 2.0), (2.0, math.inf), (1.0, math.inf))
EMBEDDING_EXPONENTS = (4.0, 6.0, math.inf)
LAW_EPS = (0.1, 0.05)
LAW_MODES = 40


class UnknownSuiteError(ValueError):
    """Suite name outside SUITES."""


@dataclass
class Check:
    """Measured value against a threshold; passes below it (above it when above)."""

    name: str
    value: float
    threshold: float
    hard: bool = True
    above: bool = False

    @property
    def passed(self) -> bool:
        if self.above:
            return bool(self.value > self.threshold)
        return bool(self.value < self.threshold)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "hard": self.hard,
            "above": self.above,
            "passed": self.passed,
        }


@dataclass
class SuiteReport:
    suite: str
    checks: List[Check] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.hard)

    def add(
        self,
        name: str,
        value: float,
        threshold: float,
        hard: bool = True,
        above: bool = False,
    ) -> Check:
        check = Check(name, float(value), threshold, hard, above)
        self.checks.append(check)
        logger.debug("%s/%s: %.3e (threshold %.1e)", self.suite, name, value, threshold)
        return check

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "details": self.details,
        }


def _flag(ok: bool) -> float:
    """0 for a satisfied yes/no check, 1 otherwise (threshold 0.5)."""
    return 0.0 if ok else 1.0


@dataclass
class ConstantEstimate:
    """Largest observed ratio per configuration; spread compares the configurations."""

    name: str
    constants: Dict[str, float] = field(default_factory=dict)

    def observe(self, label: str, ratio: float) -> None:
        self.constants[label] = max(self.constants.get(label, 0.0), float(ratio))

    @property
    def spread(self) -> float:
        values = list(self.constants.values())
        if not values or min(values) <= 0:
            return math.inf
        return max(values) / min(values)

    def to_dict(self) -> Dict[str, Any]:
        return {"C": dict(self.constants), "spread": self.spread}


def _resolution_grids() -> Dict[str, Grid]:
    return {f"n={n}": Grid(d=1, n=n, length=INVARIANT_BOX) for n in RESOLUTIONS}


def _occupied_shells(grid: Grid, cut, count: int) -> List[int]:
    xi = grid.xi_min * np.arange(1, count + 1)
    return [
        j
        for j in shell_indices(grid, cut)
        if np.any(np.asarray(cut.phi(xi / 2.0**j)) > 0)
    ]


def bernstein_constants(
    seed: int = 0, trials: int = INVARIANT_TRIALS
) -> Dict[str, ConstantEstimate]:
    """Single-shell Bernstein ratios of random trigonometric data at two resolutions."""
    cut = build_cutoff()
    grids = _resolution_grids()
    count = min(RESOLUTIONS) // 6
    js = _occupied_shells(next(iter(grids.values())), cut, count)
    rng = np.random.default_rng(seed)
    estimates = {
        f"a={a:g},b={b:g}": ConstantEstimate(f"bernstein a={a:g} b={b:g}")
        for a, b in BERNSTEIN_EXPONENTS
    }
    for _ in range(trials):
        j = int(rng.choice(js))
        coeffs = random_coefficients(rng, count)
        for label, grid in grids.items():
            f = trig_polynomial(grid, coeffs)
            for a, b in BERNSTEIN_EXPONENTS:
                ratio = bernstein_ratio(f, j, a, b, cut)
                estimates[f"a={a:g},b={b:g}"].observe(label, ratio)
    return estimates


def embedding_constants(
    seed: int = 0, trials: int = INVARIANT_TRIALS
) -> Dict[str, ConstantEstimate]:
    """B^{d/2}_{2,1} -> B^{d/p}_{p,1} ratios of random trigonometric data."""
    cut = build_cutoff()
    grids = _resolution_grids()
    count = min(RESOLUTIONS) // 6
    rng = np.random.default_rng(seed)
    estimates = {
        f"p={p:g}": ConstantEstimate(f"embedding p={p:g}") for p in EMBEDDING_EXPONENTS
    }
    for _ in range(trials):
        coeffs = random_coefficients(rng, count, decay=1.0)
        for label, grid in grids.items():
            f = trig_polynomial(grid, coeffs)
            for p in EMBEDDING_EXPONENTS:
                estimates[f"p={p:g}"].observe(label, embedding_ratio(f, p, cut))
    return estimates


def law_ratio_constants(
    config: ExperimentConfig, pairs: int = LAW_PAIRS
) -> Dict[str, ConstantEstimate]:
    """Product and commutator law ratios at two resolutions and two eps.

    Pairs are drawn in units of the threshold frequency 2^J: halving eps moves
    J up by one shell, so the pair is stretched by 2^(J - J_ref).
    """
    cut = build_cutoff()
    seq = config.admissible_sequence()
    grids = _resolution_grids()
    base = config.frequency_partition(LAW_EPS[0])
    coarse = f"n={min(RESOLUTIONS)}"
    cases = [
        (f"{label},eps={LAW_EPS[0]:g}", grid, base, 1) for label, grid in grids.items()
    ]
    for eps in LAW_EPS[1:]:
        part = config.frequency_partition(eps)
        stretch = 2 ** (part.jeps - base.jeps)
        cases.append((f"{coarse},eps={eps:g}", grids[coarse], part, stretch))

    rng = np.random.default_rng(config.solver.seed)
    product_c = ConstantEstimate("product law")
    commutator_c = ConstantEstimate("commutator law")
    for _ in range(pairs):
        a = random_coefficients(rng, LAW_MODES, decay=1.0)
        b = random_coefficients(rng, LAW_MODES, decay=1.0)
        for label, grid, part, stretch in cases:
            f = trig_polynomial(grid, a, stretch)
            g = trig_polynomial(grid, b, stretch)
            product_c.observe(label, product_law_ratio(f, g, part, seq, cut).ratio)
            commutator_c.observe(label, commutator_law_ratio(f, g, part, seq, cut).ratio)
    return {"product": product_c, "commutator": commutator_c}


def lp_suite(config: ExperimentConfig, trials: int = DEFAULT_TRIALS) -> SuiteReport:
    report = SuiteReport("lp")
    cut = build_cutoff()
    grid = VERIFY_GRID

    radii = grid.magnitude[grid.magnitude > 0]
    total = sum(np.asarray(cut.phi(radii / 2.0**j)) for j in shell_indices(grid, cut))
    report.add("partition_of_unity", np.max(np.abs(total - 1.0)), 1e-12)

    rng = np.random.default_rng(config.solver.seed)
    worst = 0.0
    for _ in range(trials):
        f = band_limited_random(grid, rng)
        rebuilt = subgrid_remainder(f, cut)
        for j in shell_indices(grid, cut):
            rebuilt = rebuilt + dyadic_block(f, j, cut)
        worst = max(worst, lp_norm(rebuilt - f, math.inf) / lp_norm(f, math.inf))
    report.add("block_reconstruction", worst, 1e-12)

    part = config.frequency_partition()
    regimes = part.regimes()
    span = range(part.low_upper - 2 * part.n0, part.jeps + 2 * part.n0)
    overlaps = sum(1 for j in span if sum(part.contains(r, j) for r in regimes) != 1)
    report.add("regime_tiling", overlaps, 0.5)

    three = validate_sequence(AdmissibleSequence(6.0, 3, (3.0,)))
    report.add("sequence_p6_p1_3", _flag(three.valid), 0.5)
    configured = validate_sequence(config.admissible_sequence())
    report.add("configured_sequence", _flag(configured.valid), 0.5)

    family = {}
    for p in (6.0, 8.0, 10.0):
        try:
            seq = example_sequence(p, 3)
            verdict = validate_sequence(seq)
        except SequenceError as exc:
            family[f"p={p:g}"] = {"valid": False, "error": str(exc)}
            report.add(f"example_family_p{p:g}", 1.0, 0.5, hard=False)
            continue
        family[f"p={p:g}"] = {"ps": list(seq.ps), **verdict.to_dict()}
        report.add(f"example_family_p{p:g}", _flag(verdict.valid), 0.5, hard=False)
    report.details["example_family_d3"] = family

    seed = config.solver.seed
    for name, estimates in (
        ("bernstein", bernstein_constants(seed)),
        ("embedding", embedding_constants(seed)),
    ):
        report.details[name] = {key: e.to_dict() for key, e in estimates.items()}
        for key, estimate in estimates.items():
            report.add(f"{name}_stability_{key}", estimate.spread, STABILITY_FACTOR)
    report.details["partition"] = {
        "eps": part.eps,
        "J": part.jeps,
        "low_upper": part.low_upper,
        "R": part.n_medium,
    }
    return report


def bony_suite(config: ExperimentConfig, trials: int = DEFAULT_TRIALS) -> SuiteReport:
    report = SuiteReport("bony")
    cut = build_cutoff()
    grid = VERIFY_GRID
    rng = np.random.default_rng(config.solver.seed)

    worst = 0.0
    for _ in range(trials):
        f = band_limited_random(grid, rng)
        g = band_limited_random(grid, rng)
        parts = bony_decompose(f, g, cut)
        residual = lp_norm(product(f, g) - parts.total, math.inf)
        worst = max(worst, residual / (lp_norm(f, math.inf) * lp_norm(g, math.inf)))
    report.add("identity_residual", worst, 1e-10)

    a0 = config.constants.a0
    part = config.frequency_partition()
    limit = a0 * 2.0**part.jeps
    worst = 0.0
    for _ in range(trials):
        f = band_limited_random(grid, rng, xi_high=limit)
        g = band_limited_random(grid, rng, xi_high=limit)
        worst = max(worst, support_vanish_residual(f, g, part, a0, cut))
    report.add("support_residual", worst, 1e-12)

    k = int(0.7 * 2.0**part.jeps * grid.length / (2.0 * math.pi))
    witness = cosine_mode(grid, k)
    counter = support_vanish_residual(witness, witness, part, a0, cut)
    report.add("support_counterexample", counter, 1e-3, above=True)

    margins = measure_margins(cut)
    report.details["margins"] = margins.to_dict()
    report.add("N1_diagonal", margins.n1_diagonal, 2.5)
    report.add("N1", margins.n1, 3.5, hard=False)
    report.add("N2_up", margins.n2_up, 2.5)
    report.add("N2", margins.n2, 4.5, hard=False)

    try:
        laws = law_ratio_constants(config)
    except PartitionError as exc:
        report.details["lemma_ratios"] = {"skipped": str(exc)}
        return report
    report.details["lemma_ratios"] = {key: e.to_dict() for key, e in laws.items()}
    for key, estimate in laws.items():
        report.add(f"lemma_ratio_stability_{key}", estimate.spread, STABILITY_FACTOR)
    return report


def spectral_suite(
    config: ExperimentConfig, trials: int = DEFAULT_TRIALS
) -> SuiteReport:
    report = SuiteReport("spectral")
    worst = 0.0
    for scaling in Scaling:
        for eps in (0.2, 0.1, 0.05):
            for xi in np.logspace(-3, 3, 61):
                symbol = LinearSymbol(eps, float(xi), scaling)
                pair = eigenvalues(eps, float(xi), scaling)
                total = pair.lambda_plus + pair.lambda_minus
                prod = pair.lambda_plus * pair.lambda_minus
                worst = max(
                    worst,
                    abs(total - symbol.trace) / symbol.trace,
                    abs(prod - symbol.determinant) / symbol.determinant,
                )
    report.add("vieta", worst, 1e-12)

    pair = eigenvalues(0.1, 1.0)
    oracle = float(np.min(np.roots([1.0, -10.0, 1.0]).real))
    lam = pair.lambda_minus.real
    report.details["lambda_minus_eps0.1_xi1"] = lam
    report.add("lambda_minus_oracle", abs(lam - oracle) / oracle, 1e-12)
    report.add("lambda_minus_asymptotic", abs(lam / 0.1 - 1.0), 2e-2)
    high = eigenvalues(0.1, 100.0)
    report.add("high_real_part", abs(high.lambda_plus.real * 0.1 - 0.5), 1e-12)

    worst = 0.0
    for xi in (0.0, 0.5, 1.0, 5.0, 20.0):
        symbol = LinearSymbol(0.1, xi)
        exact = expm(-0.3 * symbol.matrix)
        ours = propagator_matrix(symbol, 0.3)
        worst = max(worst, np.max(np.abs(ours - exact)) / np.max(np.abs(exact)))
    report.add("propagator_vs_expm", worst, 1e-10)

    grid = Grid(d=1, n=256, length=2.0 * math.pi * 4)
    rng = np.random.default_rng(config.solver.seed)
    res_c = res_w = semigroup = 0.0
    for _ in range(trials):
        c0 = band_limited_random(grid, rng)
        v0 = VecField((band_limited_random(grid, rng),))
        rc, rw = damped_mode_residual(c0, v0, 0.05, 0.3)
        res_c, res_w = max(res_c, rc), max(res_w, rw)
        c1, v1 = linear_propagate(c0, v0, 0.1, 0.5)
        c2, v2 = linear_propagate(*linear_propagate(c0, v0, 0.1, 0.2), 0.1, 0.3)
        scale = lp_norm(c1, 2) + vector_lp_norm(v1, 2)
        semigroup = max(
            semigroup, (lp_norm(c1 - c2, 2) + vector_lp_norm(v1 - v2, 2)) / scale
        )
    report.add("damped_mode_rewrite_c", res_c, 1e-10)
    report.add("damped_mode_rewrite_w", res_w, 1e-10)
    report.add("semigroup", semigroup, 1e-11)
    return report


def solvers_suite(
    config: ExperimentConfig, trials: int = DEFAULT_TRIALS
) -> SuiteReport:
    report = SuiteReport("solvers")
    params = config.euler_params()
    grid = config.build_grid()
    integrator = Integrator(config.solver.integrator)

    rest = step(EulerState.equilibrium(grid), params, config.solver.dt, integrator)
    report.add("euler_equilibrium", lp_norm(rest.c, math.inf) + rest.v.max_abs(), 1e-14)

    data = well_prepared(grid, params, config.solver.amplitude, config.solver.mode)
    states = run(data.state, params, config.solver.dt, 1.0, integrator)
    m0 = mass(states[0], params)
    drift = max(abs(mass(s, params) / m0 - 1.0) for s in states)
    report.add("euler_mass", drift, 1e-8)

    small = Grid(d=1, n=256, length=2.0 * math.pi * 4)
    c0 = cosine_mode(small, 3, 1e-8)
    v0 = VecField((cosine_mode(small, 2, 1e-8),))
    one = step(EulerState(c0, v0), params, 0.01)
    c_lin, v_lin = linear_propagate(
        c0, v0, params.eps, 0.01, Scaling.DIFFUSIVE, params.sound_speed
    )
    scale = lp_norm(c_lin, 2) + vector_lp_norm(v_lin, 2)
    gap = lp_norm(one.c - c_lin, 2) + vector_lp_norm(one.v - v_lin, 2)
    report.add("euler_linear_step", gap / scale, 1e-6)

    porous = PorousParams.from_euler(params)
    n0 = cosine_mode(small, 2, 1e-8) + 1.0
    pme = run_pme(PMEState(n0), porous, dt=1e-2, t_end=1.0)
    mu = diffusivity(pme[0], porous)
    xi = 2.0 * math.pi * 2 / small.length
    observed = pme[-1].density.spectrum[2].real * 2 / 1e-8
    report.add("pme_heat_kernel", abs(observed / math.exp(-mu * xi**2) - 1.0), 1e-6)

    rng = np.random.default_rng(config.solver.seed)
    band = small.xi_max / 3
    n_rand = band_limited_random(small, rng, xi_high=band, amplitude=0.02) + 1.0
    pme = run_pme(PMEState(n_rand), porous, dt=1e-2, t_end=1.0)
    means = [s.mean_density for s in pme]
    report.add("pme_mass", max(abs(m / means[0] - 1.0) for m in means), 1e-10)

    darcy_params = PorousParams(2.0, 0.5)
    velocity = darcy_velocity(PMEState(n_rand), darcy_params)
    report.add(
        "darcy_law",
        vector_lp_norm(velocity + gradient(n_rand), math.inf)
        / vector_lp_norm(gradient(n_rand), math.inf),
        1e-10,
    )
    return report


_RUNNERS: Dict[str, Callable[[ExperimentConfig, int], SuiteReport]] = {
    "lp": lp_suite,
    "bony": bony_suite,
    "spectral": spectral_suite,
    "solvers": solvers_suite,
}


def run_suite(
    name: str, config: ExperimentConfig, trials: Optional[int] = None
) -> SuiteReport:
    if name not in _RUNNERS:
        choices = ", ".join(SUITES)
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from {choices}")
    report = _RUNNERS[name](config, DEFAULT_TRIALS if trials is None else trials)
    logger.info("suite %s: %s", name, "passed" if report.passed else "FAILED")
    return report


def print_report(report: SuiteReport) -> None:
    print(f"Suite {report.suite}:")
    for check in report.checks:
        mark = "✓" if check.passed else "✗"
        soft = "" if check.hard else " (reported)"
        relation = ">" if check.above else "<"
        print(
            f"  {mark} {check.name}: {check.value:.3e} {relation} "
            f"{check.threshold:.1e}{soft}"
        )


def main():
    from experiment_config import load_config

    config = load_config()
    for name in SUITES:
        print_report(run_suite(name, config, trials=5))


if __name__ == "__main__":
    main()
