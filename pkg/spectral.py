#!/usr/bin/env python3
"""
Fourier symbol of the linearized damped system, its eigenvalues, the exact
per-mode propagator and the linear damped-mode rewrite.

Per mode the system acts on (c_hat, xi_hat . v_hat) through

    M(xi) = [[0,          i a |xi|],
             [kappa i a |xi|, tau  ]]

with d/dt Omega_hat + M Omega_hat = 0. The relax scaling (tau = 1/eps,
kappa = 1, a = 1) is the printed H(xi); the diffusive scaling (tau = kappa =
1/eps^2) is the linearization the Euler solver splits off, with a = the sound
speed gamma_check * c_bar. The transverse part of v decays by exp(-tau t).

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python spectral.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
# ]
# ///

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from grid_field import (
    Grid,
    GridField,
    VecField,
    check_same_grid,
    divergence,
    gradient,
    laplacian,
    lp_norm,
    vector_lp_norm,
)

logger = logging.getLogger(__name__)

# below this |z| the divided difference (1 - e^-z)/z uses its Taylor series
SERIES_THRESHOLD = 1e-3
_TINY = 1e-300


class SymbolError(ValueError):
    """Invalid epsilon, wavenumber or time for the linear symbol."""


class Scaling(str, Enum):
    RELAX = "relax"
    DIFFUSIVE = "diffusive"


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise SymbolError(f"eps must be positive, got {eps}")


def _coefficients(eps: float, scaling: Scaling) -> Tuple[float, float]:
    """(tau, kappa) of the symbol."""
    _check_eps(eps)
    if Scaling(scaling) is Scaling.RELAX:
        return 1.0 / eps, 1.0
    return 1.0 / eps**2, 1.0 / eps**2


@dataclass(frozen=True)
class LinearSymbol:
    eps: float
    xi: float
    scaling: Scaling = Scaling.RELAX
    sound: float = 1.0

    def __post_init__(self):
        _check_eps(self.eps)
        if not self.xi >= 0:
            raise SymbolError(f"|xi| must be nonnegative, got {self.xi}")

    @property
    def damping(self) -> float:
        return _coefficients(self.eps, self.scaling)[0]

    @property
    def coupling(self) -> float:
        return _coefficients(self.eps, self.scaling)[1]

    @property
    def matrix(self) -> np.ndarray:
        off = 1j * self.sound * self.xi
        return np.array([[0.0, off], [self.coupling * off, self.damping]], dtype=complex)

    @property
    def trace(self) -> float:
        return self.damping

    @property
    def determinant(self) -> float:
        return self.coupling * (self.sound * self.xi) ** 2


@dataclass(frozen=True)
class EigenPair:
    lambda_plus: complex
    lambda_minus: complex

    @property
    def is_real(self) -> bool:
        return self.lambda_plus.imag == 0 and self.lambda_minus.imag == 0


def _roots(tau: float, det: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Roots of l^2 - tau l + det = 0, larger root first, smaller by Vieta."""
    det = np.asarray(det, dtype=float)
    disc = 0.25 * tau**2 - det
    real = disc >= 0
    root = np.sqrt(np.abs(disc))
    plus = np.where(real, 0.5 * tau + root, 0.5 * tau + 1j * root).astype(complex)
    minus = np.where(real, det / np.where(real, plus.real, 1.0), 0.5 * tau - 1j * root)
    return plus, minus.astype(complex)


def eigenvalues(
    eps: float,
    xi: float,
    scaling: Scaling = Scaling.RELAX,
    sound: float = 1.0,
) -> EigenPair:
    symbol = LinearSymbol(eps, xi, scaling, sound)
    plus, minus = _roots(symbol.trace, symbol.determinant)
    return EigenPair(complex(plus), complex(minus))


@dataclass
class AsymptoticsRow:
    """One wavenumber: lambda_- over det/tau, and the rates over tau."""

    xi: float
    slow_ratio: float
    fast_ratio: float
    re_plus_ratio: float
    re_minus_ratio: float
    real_roots: bool

    def to_dict(self) -> Dict:
        return {
            "xi": self.xi,
            "slow_ratio": self.slow_ratio,
            "fast_ratio": self.fast_ratio,
            "re_plus_ratio": self.re_plus_ratio,
            "re_minus_ratio": self.re_minus_ratio,
            "real_roots": self.real_roots,
        }


def asymptotics_report(
    eps: float,
    xi_grid: Sequence[float],
    scaling: Scaling = Scaling.RELAX,
    sound: float = 1.0,
) -> List[AsymptoticsRow]:
    """Eigenvalue ratios against their low/high frequency asymptotics.

    For the relax scaling slow_ratio = lambda_-/(eps |xi|^2) and the rate ratios
    are lambda * eps.
    """
    tau, kappa = _coefficients(eps, scaling)
    xs = np.asarray(xi_grid, dtype=float)
    if xs.size == 0:
        return []
    if np.any(xs <= 0) or np.any(np.diff(xs) < 0):
        raise SymbolError("xi_grid must be positive and sorted")
    det = kappa * (sound * xs) ** 2
    plus, minus = _roots(tau, det)
    rows = []
    for x, d, lp, lm in zip(xs, det, plus, minus):
        rows.append(
            AsymptoticsRow(
                xi=float(x),
                slow_ratio=float(lm.real / (d / tau)),
                fast_ratio=float(lp.real / tau),
                re_plus_ratio=float(lp.real / tau),
                re_minus_ratio=float(lm.real / tau),
                real_roots=bool(lp.imag == 0),
            )
        )
    return rows


def trend_summary(rows: Sequence[AsymptoticsRow]) -> Dict[str, bool]:
    """Monotone trends of the report along increasing |xi|."""
    if len(rows) < 2:
        return {"slow_ratio_increasing": True, "fast_ratio_decreasing": True}
    slow = np.array([r.slow_ratio for r in rows if r.real_roots])
    fast = np.array([r.fast_ratio for r in rows])
    return {
        "slow_ratio_increasing": bool(np.all(np.diff(slow) >= -1e-12)),
        "fast_ratio_decreasing": bool(np.all(np.diff(fast) <= 1e-12)),
    }


def spectral_curves(
    eps: float,
    xi_grid: Sequence[float],
    scaling: Scaling = Scaling.RELAX,
    sound: float = 1.0,
) -> Dict[str, np.ndarray]:
    tau, kappa = _coefficients(eps, scaling)
    xs = np.asarray(xi_grid, dtype=float)
    plus, minus = _roots(tau, kappa * (sound * xs) ** 2)
    return {
        "xi": xs,
        "re_plus": plus.real,
        "im_plus": plus.imag,
        "re_minus": minus.real,
        "im_minus": minus.imag,
    }


def _divided_difference(z: np.ndarray) -> np.ndarray:
    """(1 - exp(-z)) / z, continuous at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, z)
    direct = -np.expm1(-safe) / safe
    series = 1 - z / 2 + z**2 / 6 - z**3 / 24 + z**4 / 120 - z**5 / 720
    return np.where(small, series, direct)


@dataclass
class ModeOperator:
    """Per-mode 2x2 entries acting on (c_hat, xi_hat . v_hat) plus the transverse factor."""

    cc: np.ndarray
    cv: np.ndarray
    vc: np.ndarray
    vv: np.ndarray
    transverse: float | np.ndarray


def _sylvester(
    tau: float, kappa: float, off: np.ndarray, t: float, derivative: bool = False
) -> ModeOperator:
    """exp(-tM) = e^{-l_- t} I + D (M - l_- I), D = (e^{-l_+ t} - e^{-l_- t})/(l_+ - l_-)."""
    det = kappa * np.abs(off) ** 2
    plus, minus = _roots(tau, det)
    decay = np.exp(-minus * t)
    split = -t * decay * _divided_difference((plus - minus) * t)
    if derivative:
        split = -minus * split - np.exp(-plus * t)
        decay = -minus * decay
        transverse = -tau * np.exp(-tau * t)
    else:
        transverse = np.exp(-tau * t)
    return ModeOperator(
        cc=decay - split * minus,
        cv=split * off,
        vc=split * kappa * off,
        vv=decay + split * (tau - minus),
        transverse=transverse,
    )


def propagator_matrix(symbol: LinearSymbol, t: float) -> np.ndarray:
    """exp(-t M(xi)) for a single wavenumber."""
    if t < 0:
        raise SymbolError(f"t must be nonnegative, got {t}")
    off = np.array(1j * symbol.sound * symbol.xi)
    prop = _sylvester(symbol.damping, symbol.coupling, off, t)
    return np.array([[prop.cc, prop.cv], [prop.vc, prop.vv]], dtype=complex)


def _unit_directions(grid) -> Tuple[np.ndarray, ...]:
    magnitude = grid.magnitude
    safe = np.where(magnitude > 0, magnitude, 1.0)
    return tuple(
        np.where(magnitude > 0, xi / safe, 0.0) for xi in grid.odd_wavenumbers
    )


def apply_mode_operator(
    c: GridField, v: VecField, prop: ModeOperator
) -> Tuple[GridField, VecField]:
    grid = check_same_grid(c, v)
    directions = _unit_directions(grid)
    longitudinal = sum(e * comp.spectrum for e, comp in zip(directions, v))
    c_hat = prop.cc * c.spectrum + prop.cv * longitudinal
    long_hat = prop.vc * c.spectrum + prop.vv * longitudinal
    components = []
    for e, comp in zip(directions, v):
        transverse = comp.spectrum - e * longitudinal
        components.append(
            GridField.from_spectrum(grid, e * long_hat + prop.transverse * transverse)
        )
    return GridField.from_spectrum(grid, c_hat), VecField(tuple(components))


def _grid_propagator(
    c: GridField,
    eps: float,
    t: float,
    scaling: Scaling,
    sound: float,
    derivative: bool,
) -> ModeOperator:
    if t < 0:
        raise SymbolError(f"t must be nonnegative, got {t}")
    tau, kappa = _coefficients(eps, scaling)
    off = 1j * sound * c.grid.magnitude
    return _sylvester(tau, kappa, off, t, derivative)


def linear_propagate(
    c0: GridField,
    v0: VecField,
    eps: float,
    t: float,
    scaling: Scaling = Scaling.RELAX,
    sound: float = 1.0,
) -> Tuple[GridField, VecField]:
    """Exact solution of the linear system at time t, mode by mode."""
    if t == 0:
        check_same_grid(c0, v0)
        return c0, v0
    prop = _grid_propagator(c0, eps, t, scaling, sound, derivative=False)
    return apply_mode_operator(c0, v0, prop)


def linear_time_derivative(
    c0: GridField,
    v0: VecField,
    eps: float,
    t: float,
    scaling: Scaling = Scaling.RELAX,
    sound: float = 1.0,
) -> Tuple[GridField, VecField]:
    """d/dt of linear_propagate at time t, from the differentiated Sylvester form."""
    prop = _grid_propagator(c0, eps, t, scaling, sound, derivative=True)
    return apply_mode_operator(c0, v0, prop)


@dataclass
class EtdOperators:
    """exp(-hM), phi1(-hM), phi2(-hM) on every mode of a grid."""

    h: float
    exp: ModeOperator
    phi1: ModeOperator
    phi2: ModeOperator


def _phi_blocks(matrices: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """exp(A), phi1(A), phi2(A) for a stack of k x k matrices.

    One exponential of [[A, I, 0], [0, 0, I], [0, 0, 0]] holds all three in its
    top block row.
    """
    m, k, _ = matrices.shape
    big = np.zeros((m, 3 * k, 3 * k), dtype=complex)
    big[:, :k, :k] = matrices
    big[:, :k, k : 2 * k] = np.eye(k)
    big[:, k : 2 * k, 2 * k :] = np.eye(k)
    top = expm(big)[:, :k, :]
    return top[:, :, :k], top[:, :, k : 2 * k], top[:, :, 2 * k :]


@lru_cache(maxsize=512)
def etd_operators(
    grid: Grid,
    eps: float,
    h: float,
    scaling: Scaling = Scaling.DIFFUSIVE,
    sound: float = 1.0,
) -> EtdOperators:
    """Exponential-integrator operators at step h, computed once per distinct |xi|."""
    if not h > 0:
        raise SymbolError(f"step must be positive, got {h}")
    tau, kappa = _coefficients(eps, scaling)
    radii, inverse = np.unique(grid.magnitude, return_inverse=True)
    off = 1j * sound * radii
    stack = np.zeros((radii.size, 2, 2), dtype=complex)
    stack[:, 0, 1] = off
    stack[:, 1, 0] = kappa * off
    stack[:, 1, 1] = tau
    blocks = _phi_blocks(-h * stack)
    scalar = _phi_blocks(np.array([[[-h * tau]]], dtype=complex))

    def spread(block: np.ndarray, transverse: complex) -> ModeOperator:
        entries = block[inverse.ravel()].reshape(grid.shape + (2, 2))
        return ModeOperator(
            cc=entries[..., 0, 0],
            cv=entries[..., 0, 1],
            vc=entries[..., 1, 0],
            vv=entries[..., 1, 1],
            transverse=float(np.real(transverse)),
        )

    logger.debug("ETD operators for h=%.3g on %d distinct radii", h, radii.size)
    return EtdOperators(
        h=h,
        exp=spread(blocks[0], scalar[0][0, 0, 0]),
        phi1=spread(blocks[1], scalar[1][0, 0, 0]),
        phi2=spread(blocks[2], scalar[2][0, 0, 0]),
    )


def _relative(terms: Sequence, residual) -> float:
    norm = vector_lp_norm if isinstance(residual, VecField) else lp_norm
    scale = sum(norm(term, 2) for term in terms)
    if scale == 0:
        return 0.0
    return norm(residual, 2) / (scale + _TINY)


def damped_mode_residual(
    c0: GridField, v0: VecField, eps: float, t: float
) -> Tuple[float, float]:
    """Relative residuals of the damped-mode rewrite on the exact linear trajectory.

    With the diffusive linearization (unit sound speed) and w = v + grad c:
        d_t c - lap c = -div w
        eps d_t w + w / eps = eps grad lap c - eps grad div w
    """
    c, v = linear_propagate(c0, v0, eps, t, Scaling.DIFFUSIVE)
    dc, dv = linear_time_derivative(c0, v0, eps, t, Scaling.DIFFUSIVE)
    w = v + gradient(c)
    dw = dv + gradient(dc)

    div_w = divergence(w)
    lap_c = laplacian(c)
    heat_terms = [dc, lap_c, div_w]
    res_c = _relative(heat_terms, dc - lap_c + div_w)

    grad_lap = gradient(lap_c) * eps
    grad_div = gradient(div_w) * eps
    mode_terms = [dw * eps, w / eps, grad_lap, grad_div]
    res_w = _relative(mode_terms, dw * eps + w / eps - grad_lap + grad_div)
    return res_c, res_w


def main():
    """Print eigenvalues and asymptotic ratios at eps = 0.1."""
    pair = eigenvalues(0.1, 1.0)
    print(f"eps=0.1, |xi|=1: lambda+ = {pair.lambda_plus.real:.8f}")
    print(f"                 lambda- = {pair.lambda_minus.real:.10f}")
    for row in asymptotics_report(0.1, [1e-2, 1.0, 5.0, 100.0]):
        print(
            f"  |xi|={row.xi:8.3g}  slow={row.slow_ratio:.6f}  "
            f"fast={row.fast_ratio:.6f}  Re+={row.re_plus_ratio:.3f}"
        )


if __name__ == "__main__":
    main()
