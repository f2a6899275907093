#!/usr/bin/env python3
"""
Initial data families for the Euler runs, each paired with the matching
porous-medium initial density.

- well_prepared: single cosine in c, v0 = -gc (c0 + c_bar) grad c0 so W_0 = 0
- random: band-limited random c0 with prescribed regime semi-norms, v0 = 0
- delta_perturbed: rho0 = N0 + kappa eps^delta psi with ||psi||_{B^{d/p-delta}_{p,1}} = 1
- initial_layer: well-prepared plus V0/eps in the velocity, so W_0 = V0/eps

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python initial_data.py
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
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

import numpy as np

from euler import EulerParams, EulerState, density, to_sound_vars
from grid_field import (
    Grid,
    GridField,
    VecField,
    band_limited_random,
    cosine_mode,
    gradient,
    scale_vector,
)
from littlewood_paley import (
    AdmissibleSequence,
    BesovSpec,
    DyadicCutoff,
    FrequencyPartition,
    Regime,
    besov_norm,
    build_cutoff,
    project_regime,
)

logger = logging.getLogger(__name__)

DEFAULT_MODE = 32
DEFAULT_AMPLITUDE = 1e-2
PERTURBATION_MODE_FACTOR = 4


class DataFamily(str, Enum):
    WELL_PREPARED = "well_prepared"
    RANDOM = "random"
    DELTA_PERTURBED = "delta_perturbed"
    INITIAL_LAYER = "initial_layer"


@dataclass
class InitialData:
    state: EulerState
    limit_density: GridField
    family: DataFamily


def darcy_prepared_velocity(c0: GridField, params: EulerParams) -> VecField:
    """-gc (c0 + c_bar) grad c0, the velocity with vanishing damped mode."""
    return scale_vector(c0 + params.c_bar, gradient(c0)) * (-params.gamma_check)


def _from_sound(c0: GridField, v0: VecField, params: EulerParams, family: DataFamily):
    state = EulerState(c0, v0)
    return InitialData(state, density(state, params), family)


def well_prepared(
    grid: Grid,
    params: EulerParams,
    amplitude: float = DEFAULT_AMPLITUDE,
    mode: int = DEFAULT_MODE,
) -> InitialData:
    c0 = cosine_mode(grid, mode, amplitude)
    return _from_sound(c0, darcy_prepared_velocity(c0, params), params, DataFamily.WELL_PREPARED)


def initial_layer(
    grid: Grid,
    params: EulerParams,
    amplitude: float = DEFAULT_AMPLITUDE,
    mode: int = DEFAULT_MODE,
    layer_amplitude: Optional[float] = None,
) -> InitialData:
    """Well-prepared data plus V0/eps with V0 fixed, so X_0 stays bounded in eps."""
    layer_amplitude = amplitude if layer_amplitude is None else layer_amplitude
    c0 = cosine_mode(grid, mode, amplitude)
    layer = VecField(
        tuple(cosine_mode(grid, mode, layer_amplitude, axis=i) for i in range(grid.d))
    )
    v0 = darcy_prepared_velocity(c0, params) + layer / params.eps
    return _from_sound(c0, v0, params, DataFamily.INITIAL_LAYER)


def random_data(
    grid: Grid,
    params: EulerParams,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    targets: Dict[str, float],
    seed: int = 0,
    cut: Optional[DyadicCutoff] = None,
) -> InitialData:
    """Band-limited random c0 whose regime pieces are scaled to targets[label].

    Each piece is normalized by its own regime semi-norm (d/p low, d/p_i medium,
    d/2 + 1 high); overlap at regime borders makes the assembled semi-norms
    approximate.
    """
    cut = cut or build_cutoff()
    rng = np.random.default_rng(seed)
    raw = band_limited_random(grid, rng)
    d = grid.d
    c0 = grid.zeros()
    for regime in part.regimes():
        target = targets.get(regime.label, 0.0)
        if target == 0:
            continue
        piece = project_regime(raw, part, regime, cut)
        s = d / 2 + 1 if regime == Regime.high() else d / seq.exponent(regime)
        size = besov_norm(piece, BesovSpec(s, seq.exponent(regime), 1.0, regime), part, cut)
        if size > 0:
            c0 = c0 + piece * (target / size)
    return _from_sound(c0, VecField.zeros(grid), params, DataFamily.RANDOM)


def delta_perturbed(
    grid: Grid,
    params: EulerParams,
    delta: float,
    p: float,
    amplitude: float = DEFAULT_AMPLITUDE,
    mode: int = DEFAULT_MODE,
    kappa: Optional[float] = None,
    cut: Optional[DyadicCutoff] = None,
) -> InitialData:
    """rho0 = N0 + kappa eps^delta psi, psi a single-shell cosine normalized in B^{d/p-delta}_{p,1}."""
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    cut = cut or build_cutoff()
    kappa = amplitude if kappa is None else kappa
    base = well_prepared(grid, params, amplitude, mode)
    n0 = base.limit_density
    psi = cosine_mode(grid, PERTURBATION_MODE_FACTOR * mode)
    psi = psi / besov_norm(psi, BesovSpec(grid.d / p - delta, p), None, cut)
    rho0 = n0 + psi * (kappa * params.eps**delta)
    c0 = to_sound_vars(rho0, VecField.zeros(grid), params).c
    logger.debug("delta-perturbed data: delta=%g, eps=%g", delta, params.eps)
    state = EulerState(c0, darcy_prepared_velocity(c0, params))
    return InitialData(state, n0, DataFamily.DELTA_PERTURBED)


def build_initial_data(
    family: DataFamily,
    grid: Grid,
    params: EulerParams,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    amplitude: float = DEFAULT_AMPLITUDE,
    mode: int = DEFAULT_MODE,
    seed: int = 0,
    delta: float = 1.0,
    cut: Optional[DyadicCutoff] = None,
) -> InitialData:
    family = DataFamily(family)
    if family is DataFamily.WELL_PREPARED:
        return well_prepared(grid, params, amplitude, mode)
    if family is DataFamily.INITIAL_LAYER:
        return initial_layer(grid, params, amplitude, mode)
    if family is DataFamily.DELTA_PERTURBED:
        return delta_perturbed(grid, params, delta, seq.p, amplitude, mode, cut=cut)
    targets = {regime.label: amplitude for regime in part.regimes()}
    return random_data(grid, params, part, seq, targets, seed, cut)


def main():
    """Build every family from the default configuration and print its sizes."""
    from euler import damped_mode
    from experiment_config import load_config
    from grid_field import lp_norm, vector_lp_norm

    config = load_config()
    params = config.euler_params()
    grid = config.build_grid()
    part, seq = config.frequency_partition(), config.admissible_sequence()
    for family in DataFamily:
        data = build_initial_data(family, grid, params, part, seq)
        c_size = lp_norm(data.state.c, math.inf)
        w_size = vector_lp_norm(damped_mode(data.state, params), math.inf)
        print(f"{family.value:16s} max|c0| = {c_size:.3e}, max|W0| = {w_size:.3e}")


if __name__ == "__main__":
    main()
