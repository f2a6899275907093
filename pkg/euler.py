#!/usr/bin/env python3
"""
Pseudo-spectral solver for the damped compressible Euler system in
sound-speed variables (diffusive scaling):

    d_t c + v . grad c + gc (c + c_bar) div v = 0
    eps^2 (d_t v + v . grad v) + gc (c + c_bar) grad c + v = 0

with gc = (gamma - 1)/2. The linearization about (0, 0) is propagated exactly
per mode (spectral module, diffusive scaling, sound speed gc c_bar); the
remaining nonlinear terms go through either a Strang splitting around an RK4
step or a second-order exponential time-differencing step.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python euler.py
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
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional

import numpy as np

from grid_field import (
    Grid,
    GridField,
    VecField,
    check_same_grid,
    dealias,
    dealias_vector,
    divergence,
    dot,
    gradient,
    inner_product,
    laplacian,
    lp_norm,
    product,
    scale_vector,
    vector_lp_norm,
)
from littlewood_paley import (
    AdmissibleSequence,
    BesovSpec,
    DyadicCutoff,
    FrequencyPartition,
    Regime,
    besov_norm,
    build_cutoff,
    dyadic_block,
    hybrid_shell_table,
)
from spectral import Scaling, apply_mode_operator, etd_operators, linear_propagate

logger = logging.getLogger(__name__)

VACUUM_FRACTION = 0.1
CFL_LIMIT = 0.5
LYAPUNOV_ETA = 0.25
LAYER_GROWTH = 1.05
LAYER_FIRST_STEP = 1.0 / 8.0  # times eps^2


class CFLViolation(RuntimeError):
    """Time step too large for the explicit nonlinear stage."""


class VacuumError(RuntimeError):
    """c + c_bar dropped below the vacuum guard."""


class DensityError(ValueError):
    """Nonpositive density handed to a variable conversion."""


class Integrator(str, Enum):
    STRANG = "strang"
    ETD2 = "etd2"


@dataclass(frozen=True)
class EulerParams:
    gamma: float = 2.0
    pressure_constant: float = 0.5
    eps: float = 0.1

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"adiabatic exponent must exceed 1, got {self.gamma}")
        if not self.pressure_constant > 0:
            raise ValueError(f"pressure constant must be positive, got {self.pressure_constant}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @property
    def gamma_check(self) -> float:
        return 0.5 * (self.gamma - 1.0)

    @property
    def c_bar(self) -> float:
        return math.sqrt(4.0 * self.gamma * self.pressure_constant) / (self.gamma - 1.0)

    @property
    def sound_speed(self) -> float:
        """gc * c_bar = sqrt(gamma A) = sqrt(P'(1))."""
        return self.gamma_check * self.c_bar

    def pressure(self, rho: np.ndarray) -> np.ndarray:
        return self.pressure_constant * rho**self.gamma

    def with_eps(self, eps: float) -> "EulerParams":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class EulerState:
    c: GridField
    v: VecField
    t: float = 0.0

    def __post_init__(self):
        check_same_grid(self.c, self.v)

    @property
    def grid(self) -> Grid:
        return self.c.grid

    @classmethod
    def equilibrium(cls, grid: Grid) -> "EulerState":
        return cls(grid.zeros(), VecField.zeros(grid))


def to_sound_vars(
    rho: GridField, u: VecField, params: EulerParams, t: float = 0.0
) -> EulerState:
    """(rho, u) -> (c, v) with c = sqrt(gamma A)/gc rho^gc - c_bar and v = u / eps."""
    if np.any(rho.samples <= 0):
        raise DensityError(f"density must be positive, min is {rho.samples.min():.3e}")
    factor = math.sqrt(params.gamma * params.pressure_constant) / params.gamma_check
    c = GridField.from_samples(
        rho.grid, factor * rho.samples**params.gamma_check - params.c_bar
    )
    return EulerState(c, u / params.eps, t)


def density(state: EulerState, params: EulerParams) -> GridField:
    """rho = ((c + c_bar)/c_bar)^(1/gc), pointwise."""
    ratio = (state.c.samples + params.c_bar) / params.c_bar
    if np.any(ratio <= 0):
        raise VacuumError("c + c_bar is not positive; density undefined")
    return GridField.from_samples(state.grid, ratio ** (1.0 / params.gamma_check))


def velocity(state: EulerState, params: EulerParams) -> VecField:
    return state.v * params.eps


def mass(state: EulerState, params: EulerParams) -> float:
    """Mean density."""
    return float(np.mean(density(state, params).samples))


def check_vacuum(c: GridField, params: EulerParams) -> None:
    floor = VACUUM_FRACTION * params.c_bar
    lowest = float(np.min(c.samples)) + params.c_bar
    if lowest < floor:
        raise VacuumError(f"min(c + c_bar) = {lowest:.4e} below guard {floor:.4e}")


def check_cfl(state: EulerState, params: EulerParams, dt: float) -> None:
    xi_max = state.grid.xi_max
    advective = dt * state.v.max_abs() * xi_max
    acoustic = dt * (params.c_bar + float(np.max(np.abs(state.c.samples)))) * xi_max
    acoustic *= params.gamma_check
    if advective > CFL_LIMIT:
        raise CFLViolation(f"advective CFL number {advective:.3f} > {CFL_LIMIT}")
    if acoustic > CFL_LIMIT:
        raise CFLViolation(f"acoustic CFL number {acoustic:.3f} > {CFL_LIMIT}")


def _advection(v: VecField) -> VecField:
    """(v . grad) v, componentwise."""
    return VecField(tuple(dot(v, gradient(comp)) for comp in v))


def rhs(state: EulerState, params: EulerParams):
    """(d_t c, non-stiff part of d_t v); the -v/eps^2 damping is left out."""
    c, v = state.c, state.v
    check_vacuum(c, params)
    gc = params.gamma_check
    grad_c = gradient(c)
    shifted = c + params.c_bar
    dc = -dot(v, grad_c) - gc * product(shifted, divergence(v))
    dv = -_advection(v) - scale_vector(shifted, grad_c) * (gc / params.eps**2)
    return dc, dv


def nonlinear_residual(state: EulerState, params: EulerParams):
    """rhs minus its linearization about (0, 0)."""
    c, v = state.c, state.v
    check_vacuum(c, params)
    gc = params.gamma_check
    grad_c = gradient(c)
    dc = -dot(v, grad_c) - gc * product(c, divergence(v))
    dv = -_advection(v) - scale_vector(c, grad_c) * (gc / params.eps**2)
    return dc, dv


def _linear(c: GridField, v: VecField, params: EulerParams, t: float):
    return linear_propagate(c, v, params.eps, t, Scaling.DIFFUSIVE, params.sound_speed)


def _rk4(c: GridField, v: VecField, params: EulerParams, dt: float):
    def stage(cc, vv):
        return nonlinear_residual(EulerState(cc, vv), params)

    k1c, k1v = stage(c, v)
    k2c, k2v = stage(c + k1c * (dt / 2), v + k1v * (dt / 2))
    k3c, k3v = stage(c + k2c * (dt / 2), v + k2v * (dt / 2))
    k4c, k4v = stage(c + k3c * dt, v + k3v * dt)
    c_new = c + (k1c + k2c * 2.0 + k3c * 2.0 + k4c) * (dt / 6)
    v_new = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6)
    return c_new, v_new


def _strang(c: GridField, v: VecField, params: EulerParams, dt: float):
    c, v = _linear(c, v, params, dt / 2)
    c, v = _rk4(c, v, params, dt)
    return _linear(c, v, params, dt / 2)


def _etd2(c: GridField, v: VecField, params: EulerParams, dt: float):
    """Cox-Matthews ETD2RK."""
    ops = etd_operators(c.grid, params.eps, dt, Scaling.DIFFUSIVE, params.sound_speed)
    nc, nv = nonlinear_residual(EulerState(c, v), params)
    ec, ev = apply_mode_operator(c, v, ops.exp)
    pc, pv = apply_mode_operator(nc, nv, ops.phi1)
    ac, av = ec + pc * dt, ev + pv * dt
    mc, mv = nonlinear_residual(EulerState(ac, av), params)
    qc, qv = apply_mode_operator(mc - nc, mv - nv, ops.phi2)
    return ac + qc * dt, av + qv * dt


def step(
    state: EulerState,
    params: EulerParams,
    dt: float,
    integrator: Integrator = Integrator.STRANG,
) -> EulerState:
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    c, v = dealias(state.c), dealias_vector(state.v)
    check_vacuum(c, params)
    check_cfl(EulerState(c, v), params, dt)
    if Integrator(integrator) is Integrator.ETD2:
        c, v = _etd2(c, v, params, dt)
    else:
        c, v = _strang(c, v, params, dt)
    check_vacuum(c, params)
    return EulerState(c, v, state.t + dt)


def layer_time_grid(
    t_end: float, dt: float, eps: Optional[float] = None
) -> List[float]:
    """Step sizes reaching t_end; with eps the first step is eps^2/8, growing 5% per step."""
    if not (t_end > 0 and dt > 0):
        raise ValueError("t_end and dt must be positive")
    steps: List[float] = []
    h = dt if eps is None else min(dt, LAYER_FIRST_STEP * eps**2)
    t = 0.0
    while t < t_end * (1 - 1e-12):
        h = min(h, t_end - t)
        steps.append(h)
        t += h
        h = min(dt, h * LAYER_GROWTH) if eps is not None else dt
    return steps


def run(
    state: EulerState,
    params: EulerParams,
    dt: float,
    t_end: float,
    integrator: Integrator = Integrator.STRANG,
    resolve_layer: bool = False,
) -> List[EulerState]:
    """States at every step, the initial one included."""
    steps = layer_time_grid(t_end, dt, params.eps if resolve_layer else None)
    states = [state]
    for h in steps:
        state = step(state, params, h, integrator)
        states.append(state)
    logger.info(
        "euler run eps=%g: %d steps to t=%.4g (%s)",
        params.eps,
        len(steps),
        state.t,
        Integrator(integrator).value,
    )
    return states


def damped_mode(state: EulerState, params: EulerParams, scaled: bool = False) -> VecField:
    """W = v + gc (c + c_bar) grad c; scaled gives w = eps W."""
    shifted = state.c + params.c_bar
    mode = state.v + scale_vector(shifted, gradient(state.c)) * params.gamma_check
    return mode * params.eps if scaled else mode


def heat_form_residual(state: EulerState, params: EulerParams) -> float:
    """Relative residual of d_t c - (gc c_bar)^2 lap c = -(gc c_bar/eps) div w + Q4."""
    c, v = state.c, state.v
    gc, c_bar = params.gamma_check, params.c_bar
    dc, _ = rhs(state, params)
    w = damped_mode(state, params, scaled=True)
    grad_c = gradient(c)
    source = (
        -dot(v, grad_c)
        - gc * product(c, divergence(v))
        + divergence(scale_vector(c, grad_c)) * (gc**2 * c_bar)
    )
    lhs = dc - laplacian(c) * (gc * c_bar) ** 2
    forcing = divergence(w) * (-(gc * c_bar) / params.eps)
    scale = lp_norm(dc, 2) + lp_norm(forcing, 2) + lp_norm(source, 2)
    if scale == 0:
        return 0.0
    return lp_norm(lhs - forcing - source, 2) / scale


@dataclass
class InitialSize:
    """X_0 itemized: low, each medium regime, high."""

    low: float
    medium: List[float] = field(default_factory=list)
    high: float = 0.0

    @property
    def total(self) -> float:
        return self.low + sum(self.medium) + self.high

    def to_dict(self) -> Dict:
        return {"low": self.low, "medium": list(self.medium), "high": self.high, "total": self.total}


def initial_size(
    state: EulerState,
    params: EulerParams,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    cut: Optional[DyadicCutoff] = None,
) -> InitialSize:
    """||(c, eps v)||^l_{d/p} + sum_i ||(c, eps v)||^{m_i}_{d/p_i} + ||(eps c, eps^2 v)||^h_{d/2+1}."""
    cut = cut or build_cutoff()
    d, eps = state.grid.d, params.eps
    table_c = hybrid_shell_table(state.c, part, seq, cut)
    table_v = hybrid_shell_table(state.v, part, seq, cut)

    def pair(regime: Regime, s: float, wc: float, wv: float) -> float:
        return wc * table_c.seminorm(regime, s) + wv * table_v.seminorm(regime, s)

    low = pair(Regime.low(), d / seq.p, 1.0, eps)
    medium = [pair(Regime.medium(i), d / p_i, 1.0, eps) for i, p_i in enumerate(seq.ps, 1)]
    high = pair(Regime.high(), d / 2 + 1, eps, eps**2)
    return InitialSize(low, medium, high)


@dataclass
class GateVerdict:
    passed: bool
    x0: float
    eta: float
    breakdown: InitialSize

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "X0": self.x0, "eta": self.eta, **self.breakdown.to_dict()}


def smallness_gate(
    state0: EulerState,
    params: EulerParams,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    eta: float,
    cut: Optional[DyadicCutoff] = None,
) -> GateVerdict:
    """X_0 <= eta; the theory's constant is unquantified so eta is a free threshold."""
    size = initial_size(state0, params, part, seq, cut)
    return GateVerdict(size.total <= eta, size.total, eta, size)


@dataclass
class LyapunovValue:
    energy: float
    cross: float
    eta: float

    @property
    def value(self) -> float:
        return self.energy + self.eta * self.cross


def lyapunov_functional(
    state: EulerState,
    j: int,
    eps: float,
    cut: DyadicCutoff,
    eta: float = LYAPUNOV_ETA,
) -> LyapunovValue:
    """||(c_j, eps v_j)||^2 + eta 2^{-2j} <grad c_j, v_j> on shell j."""
    c_j = dyadic_block(state.c, j, cut)
    v_j = [dyadic_block(comp, j, cut) for comp in state.v]
    energy = lp_norm(c_j, 2) ** 2 + eps**2 * sum(lp_norm(b, 2) ** 2 for b in v_j)
    cross = sum(inner_product(g, b) for g, b in zip(gradient(c_j), v_j))
    return LyapunovValue(energy, 2.0 ** (-2 * j) * cross, eta)


def high_frequency_size(
    state: EulerState, eps: float, part: FrequencyPartition, cut: DyadicCutoff
) -> float:
    """eps ||c||^h + eps^2 ||v||^h at regularity d/2 + 1."""
    spec = BesovSpec(state.grid.d / 2 + 1, 2.0, 1.0, Regime.high())
    return eps * besov_norm(state.c, spec, part, cut) + eps**2 * besov_norm(
        state.v, spec, part, cut
    )


def snapshots(states: List[EulerState], every: int) -> Iterator[EulerState]:
    for k, state in enumerate(states):
        if k % max(every, 1) == 0 or k == len(states) - 1:
            yield state


def main():
    """Run a small-amplitude cosine and report mass drift and damped-mode size."""
    from grid_field import cosine_mode

    params = EulerParams(eps=0.1)
    grid = Grid(d=1, n=256)
    c0 = cosine_mode(grid, 8, amplitude=1e-2)
    shifted = c0 + params.c_bar
    v0 = scale_vector(shifted, gradient(c0)) * (-params.gamma_check)
    states = run(EulerState(c0, v0), params, dt=0.05, t_end=1.0)
    drift = abs(mass(states[-1], params) / mass(states[0], params) - 1.0)
    print(f"Steps: {len(states) - 1}, relative mass drift {drift:.2e}")
    w_end = vector_lp_norm(damped_mode(states[-1], params), 2)
    print(f"||W(T)||_2 = {w_end:.3e}")


if __name__ == "__main__":
    main()
