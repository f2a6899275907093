#!/usr/bin/env python3
"""
Periodic grid fields: spectral transforms, L^p quadrature, Fourier multipliers
and the basic calculus (gradient, divergence, Laplacian, heat flow) used by
every other module.

The Fourier convention is fixed once here: f(x) = sum_k f_hat(k) exp(i xi_k . x)
with xi_k = 2 pi k / L, so the forward transform carries the 1/n^d factor.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python grid_field.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
# ]
# ///

import csv
import logging
import math
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sp_fft

logger = logging.getLogger(__name__)

DEFAULT_LENGTH = 2.0 * math.pi * 2**6
MIN_POINTS = 16
REALITY_TOLERANCE = 1e-12
THREADS_ENV = "HYBESOV_THREADS"

# little-endian header: d and n as int32, L as float64
_HEADER_INTS = np.dtype("<i4")
_HEADER_FLOAT = np.dtype("<f8")
_PAYLOAD = np.dtype("<f8")

Symbol = Union[np.ndarray, Callable[[Tuple[np.ndarray, ...]], np.ndarray]]


class GridError(ValueError):
    """Invalid grid or field construction."""


class GridMismatchError(ValueError):
    """Fields combined across different grids."""


def fft_workers() -> int:
    """Number of FFT workers allowed by HYBESOV_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as e:
        raise GridError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    return max(1, workers)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the torus [0, length)^d with n points per axis."""

    d: int
    n: int
    length: float = DEFAULT_LENGTH

    def __post_init__(self):
        if self.d < 1:
            raise GridError(f"dimension must be >= 1, got {self.d}")
        if self.n < MIN_POINTS or self.n & (self.n - 1):
            raise GridError(f"n must be a power of two >= {MIN_POINTS}, got {self.n}")
        if not self.length > 0:
            raise GridError(f"box length must be positive, got {self.length}")

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @cached_property
    def mode_numbers(self) -> Tuple[np.ndarray, ...]:
        """Integer wavenumbers k in [-n/2, n/2) per axis, in FFT order."""
        k = np.rint(sp_fft.fftfreq(self.n, d=1.0 / self.n)).astype(np.int64)
        return tuple(np.meshgrid(*([k] * self.d), indexing="ij"))

    @cached_property
    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        scale = 2.0 * math.pi / self.length
        return tuple(scale * k.astype(float) for k in self.mode_numbers)

    @cached_property
    def odd_wavenumbers(self) -> Tuple[np.ndarray, ...]:
        """Wavenumbers with the unpaired mode k = -n/2 zeroed on its axis.

        Odd symbols such as i xi must vanish there to map real fields to real
        fields.
        """
        nyquist = -(self.n // 2)
        return tuple(
            np.where(k == nyquist, 0.0, xi)
            for k, xi in zip(self.mode_numbers, self.wavenumbers)
        )

    @cached_property
    def magnitude(self) -> np.ndarray:
        return np.sqrt(sum(xi**2 for xi in self.wavenumbers))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keeps |k_i| <= n/3 on every axis."""
        cutoff = self.n // 3
        mask = np.ones(self.shape, dtype=bool)
        for k in self.mode_numbers:
            mask &= np.abs(k) <= cutoff
        return mask

    @property
    def xi_min(self) -> float:
        return 2.0 * math.pi / self.length

    @cached_property
    def xi_max(self) -> float:
        return float(self.magnitude.max())

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, ...]:
        x = self.length * np.arange(self.n) / self.n
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))

    def zeros(self) -> "GridField":
        return GridField.from_samples(self, np.zeros(self.shape))

    def constant(self, value: float) -> "GridField":
        return GridField.from_samples(self, np.full(self.shape, float(value)))


def _forward(samples: np.ndarray) -> np.ndarray:
    return sp_fft.fftn(samples, norm="forward", workers=fft_workers())


def _inverse(spectrum: np.ndarray) -> np.ndarray:
    return sp_fft.ifftn(spectrum, norm="forward", workers=fft_workers())


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GridField:
    """A field sampled on a Grid together with its Fourier coefficients."""

    grid: Grid
    samples: np.ndarray
    spectrum: np.ndarray

    @classmethod
    def from_samples(cls, grid: Grid, samples: np.ndarray) -> "GridField":
        samples = np.asarray(samples)
        if samples.shape != grid.shape:
            raise GridMismatchError(
                f"sample shape {samples.shape} does not match grid {grid.shape}"
            )
        if not np.iscomplexobj(samples):
            samples = samples.astype(float)
        return cls(grid, _frozen(samples), _frozen(_forward(samples)))

    @classmethod
    def from_spectrum(
        cls, grid: Grid, spectrum: np.ndarray, real: Optional[bool] = None
    ) -> "GridField":
        """Build a field from coefficients.

        With real=None the samples are kept real when the imaginary residue of
        the inverse transform is below REALITY_TOLERANCE times the field scale.
        """
        spectrum = np.asarray(spectrum, dtype=complex)
        if spectrum.shape != grid.shape:
            raise GridMismatchError(
                f"spectrum shape {spectrum.shape} does not match grid {grid.shape}"
            )
        samples = _inverse(spectrum)
        if real is None:
            scale = float(np.max(np.abs(samples))) if samples.size else 0.0
            residue = float(np.max(np.abs(samples.imag))) if samples.size else 0.0
            real = residue <= REALITY_TOLERANCE * max(scale, np.finfo(float).tiny)
        if real:
            samples = samples.real
        return cls(grid, _frozen(samples), _frozen(spectrum))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    @property
    def mean(self) -> complex | float:
        value = self.spectrum[(0,) * self.grid.d]
        return float(value.real) if self.is_real else complex(value)

    def _check(self, other: "GridField") -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, GridField):
            self._check(other)
            return GridField(
                self.grid,
                _frozen(self.samples + other.samples),
                _frozen(self.spectrum + other.spectrum),
            )
        if np.isscalar(other):
            spectrum = np.array(self.spectrum)
            spectrum[(0,) * self.grid.d] += other
            return GridField(self.grid, _frozen(self.samples + other), _frozen(spectrum))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GridField(self.grid, _frozen(-self.samples), _frozen(-self.spectrum))

    def __sub__(self, other):
        if isinstance(other, GridField) or np.isscalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        # pointwise field products go through product() so they stay dealiased
        if np.isscalar(other):
            return GridField(
                self.grid,
                _frozen(self.samples * other),
                _frozen(self.spectrum * other),
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return NotImplemented


@dataclass(frozen=True, eq=False)
class VecField:
    """d GridField components on a shared grid."""

    components: Tuple[GridField, ...]

    def __post_init__(self):
        if not self.components:
            raise GridError("a vector field needs at least one component")
        grid = self.components[0].grid
        for comp in self.components[1:]:
            if comp.grid != grid:
                raise GridMismatchError("vector components live on different grids")
        if len(self.components) != grid.d:
            raise GridError(
                f"expected {grid.d} components for d={grid.d}, "
                f"got {len(self.components)}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> "VecField":
        return cls(tuple(grid.zeros() for _ in range(grid.d)))

    @classmethod
    def from_samples(cls, grid: Grid, samples: Sequence[np.ndarray]) -> "VecField":
        return cls(tuple(GridField.from_samples(grid, s) for s in samples))

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    def __iter__(self) -> Iterator[GridField]:
        return iter(self.components)

    def __getitem__(self, i: int) -> GridField:
        return self.components[i]

    def __len__(self) -> int:
        return len(self.components)

    def __add__(self, other):
        if isinstance(other, VecField):
            return VecField(tuple(a + b for a, b in zip(self, other)))
        return NotImplemented

    def __neg__(self):
        return VecField(tuple(-a for a in self))

    def __sub__(self, other):
        if isinstance(other, VecField):
            return VecField(tuple(a - b for a, b in zip(self, other)))
        return NotImplemented

    def __mul__(self, other):
        if np.isscalar(other):
            return VecField(tuple(a * other for a in self))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return NotImplemented

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(c.samples)) for c in self))


def check_same_grid(*fields: Union[GridField, VecField]) -> Grid:
    """Return the shared grid of the arguments or raise GridMismatchError."""
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grids differ: {grid} vs {f.grid}")
    return grid


def transform(samples: np.ndarray, grid: Grid) -> GridField:
    """Forward transform of raw samples; a flat array of n^d values is reshaped."""
    samples = np.asarray(samples)
    if samples.shape != grid.shape:
        if samples.size != grid.n**grid.d:
            raise GridMismatchError(
                f"got {samples.size} samples for a grid of {grid.n**grid.d} points"
            )
        samples = samples.reshape(grid.shape)
    return GridField.from_samples(grid, samples)


def lp_norm(f: GridField, p: float) -> float:
    """Rectangle-rule L^p norm on the torus; p = inf gives max |f|."""
    if not p >= 1:
        raise ValueError(f"L^p exponent must be >= 1, got {p}")
    values = np.abs(f.samples)
    if math.isinf(p):
        return float(values.max())
    if p == 2:
        return math.sqrt(f.grid.cell_volume * float(np.sum(values**2)))
    return float((f.grid.cell_volume * np.sum(values**p)) ** (1.0 / p))


def vector_lp_norm(v: VecField, p: float) -> float:
    return sum(lp_norm(c, p) for c in v)


def _evaluate_symbol(grid: Grid, symbol: Symbol) -> np.ndarray:
    values = symbol(grid.wavenumbers) if callable(symbol) else symbol
    values = np.broadcast_to(np.asarray(values), grid.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("Fourier symbol is not finite at every grid wavenumber")
    return values


def fourier_multiplier(f: GridField, symbol: Symbol) -> GridField:
    """Multiply the spectrum of f pointwise by symbol(xi).

    symbol is either an array over the grid or a callable receiving the tuple of
    wavenumber component arrays.
    """
    values = _evaluate_symbol(f.grid, symbol)
    return GridField.from_spectrum(
        f.grid, f.spectrum * values, real=None if f.is_real else False
    )


def gradient(f: GridField) -> VecField:
    return VecField(
        tuple(fourier_multiplier(f, 1j * xi) for xi in f.grid.odd_wavenumbers)
    )


def divergence(v: VecField) -> GridField:
    grid = v.grid
    spectrum = sum(1j * xi * c.spectrum for xi, c in zip(grid.odd_wavenumbers, v))
    real = all(c.is_real for c in v)
    return GridField.from_spectrum(grid, spectrum, real=None if real else False)


def laplacian(f: GridField) -> GridField:
    return fourier_multiplier(f, -f.grid.magnitude**2)


def heat_propagator(f: GridField, t: float, mu: float = 1.0) -> GridField:
    """exp(t mu Delta) f."""
    return fourier_multiplier(f, np.exp(-t * mu * f.grid.magnitude**2))


def is_dealiased(f: GridField) -> bool:
    return not np.any(f.spectrum[~f.grid.dealias_mask])


def dealias(f: GridField) -> GridField:
    if is_dealiased(f):
        return f
    return fourier_multiplier(f, f.grid.dealias_mask.astype(float))


def dealias_vector(v: VecField) -> VecField:
    return VecField(tuple(dealias(c) for c in v))


def truncate_above(f: GridField, radius: float) -> GridField:
    """Keep only the modes with |xi| < radius."""
    return fourier_multiplier(f, (f.grid.magnitude < radius).astype(float))


def product(f: GridField, g: GridField) -> GridField:
    """Pointwise product of 2/3-truncated factors, truncated again afterwards."""
    grid = check_same_grid(f, g)
    fd, gd = dealias(f), dealias(g)
    raw = GridField.from_samples(grid, fd.samples * gd.samples)
    return dealias(raw)


def apply_pointwise(f: GridField, func: Callable[[np.ndarray], np.ndarray]) -> GridField:
    """Evaluate func on the samples of the dealiased field, then truncate."""
    fd = dealias(f)
    return dealias(GridField.from_samples(f.grid, func(fd.samples)))


def quotient(f: GridField, g: GridField) -> GridField:
    grid = check_same_grid(f, g)
    fd, gd = dealias(f), dealias(g)
    if np.any(gd.samples == 0):
        raise ZeroDivisionError("denominator field vanishes on the grid")
    return dealias(GridField.from_samples(grid, fd.samples / gd.samples))


def dot(u: VecField, v: VecField) -> GridField:
    check_same_grid(u, v)
    terms = [product(a, b) for a, b in zip(u, v)]
    return sum(terms[1:], terms[0])


def scale_vector(f: GridField, v: VecField) -> VecField:
    """Componentwise dealiased product f * v."""
    return VecField(tuple(product(f, c) for c in v))


def inner_product(f: GridField, g: GridField) -> float:
    """Real L^2 pairing on the torus."""
    check_same_grid(f, g)
    return float(np.real(f.grid.cell_volume * np.sum(f.samples * np.conj(g.samples))))


def band_limited_random(
    grid: Grid,
    rng: np.random.Generator,
    xi_low: float = 0.0,
    xi_high: Optional[float] = None,
    amplitude: float = 1.0,
    decay: float = 0.0,
) -> GridField:
    """Real random field with modes xi_low <= |xi| < xi_high, dealiased.

    Coefficients are Gaussian with standard deviation |xi|^(-decay); the field is
    rescaled so max |f| equals amplitude.
    """
    magnitude = grid.magnitude
    if xi_high is None:
        xi_high = np.inf
    band = (magnitude >= xi_low) & (magnitude < xi_high) & (magnitude > 0)
    band &= grid.dealias_mask
    coeffs = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if decay:
        weights = np.where(magnitude > 0, magnitude, 1.0) ** (-decay)
        coeffs = coeffs * weights
    samples = _inverse(np.where(band, coeffs, 0.0)).real
    field = GridField.from_samples(grid, samples)
    peak = float(np.max(np.abs(field.samples)))
    if peak == 0.0:
        return field
    return field * (amplitude / peak)


def cosine_mode(grid: Grid, k: int, amplitude: float = 1.0, axis: int = 0) -> GridField:
    """amplitude * cos(xi_k x_axis) with xi_k = 2 pi k / L."""
    xi = 2.0 * math.pi * k / grid.length
    return GridField.from_samples(
        grid, amplitude * np.cos(xi * grid.coordinates[axis])
    )


def random_coefficients(
    rng: np.random.Generator, count: int, decay: float = 0.0
) -> np.ndarray:
    """Complex Gaussian coefficients for modes 1..count, scaled by k^(-decay)."""
    k = np.arange(1, count + 1, dtype=float)
    return (rng.standard_normal(count) + 1j * rng.standard_normal(count)) * k ** (-decay)


def trig_polynomial(grid: Grid, coeffs: np.ndarray, stretch: int = 1) -> GridField:
    """Real 1-D field sum_k Re(coeffs[k-1] exp(i xi_{stretch k} x)).

    The function depends only on the box, so every resolution of the same box
    samples the same field; stretch = 2 gives x -> f(2x).
    """
    if grid.d != 1:
        raise GridError("trigonometric polynomials are built on 1-D grids")
    coeffs = np.asarray(coeffs, dtype=complex)
    modes = stretch * np.arange(1, coeffs.size + 1)
    if modes.size and modes[-1] > grid.n // 3:
        raise GridError(f"mode {modes[-1]} is outside the dealiased range of n={grid.n}")
    spectrum = np.zeros(grid.shape, dtype=complex)
    spectrum[modes] = 0.5 * coeffs
    spectrum[-modes] = 0.5 * np.conj(coeffs)
    return GridField.from_spectrum(grid, spectrum, real=True)


def save_field(f: GridField, path: Union[str, Path]) -> Path:
    """Write a real field in the flat binary layout (d, n, L header; float64 payload)."""
    if not f.is_real:
        raise GridError("only real fields can be written in the binary layout")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([f.grid.d, f.grid.n], dtype=_HEADER_INTS).tobytes()
    header += np.array([f.grid.length], dtype=_HEADER_FLOAT).tobytes()
    payload = np.ascontiguousarray(f.samples, dtype=_PAYLOAD).tobytes(order="C")
    path.write_bytes(header + payload)
    logger.debug("wrote %s (%d bytes)", path, len(header) + len(payload))
    return path


def load_field(path: Union[str, Path]) -> GridField:
    raw = Path(path).read_bytes()
    ints = _HEADER_INTS.itemsize * 2
    offset = ints + _HEADER_FLOAT.itemsize
    if len(raw) < offset:
        raise GridError(f"{path}: truncated header")
    d, n = (int(x) for x in np.frombuffer(raw[:ints], dtype=_HEADER_INTS))
    length = float(np.frombuffer(raw[ints:offset], dtype=_HEADER_FLOAT)[0])
    grid = Grid(d, n, length)
    payload = np.frombuffer(raw[offset:], dtype=_PAYLOAD)
    if payload.size != n**d:
        raise GridError(f"{path}: expected {n**d} samples, found {payload.size}")
    return transform(payload.copy(), grid)


def write_field_csv(f: GridField, path: Union[str, Path]) -> Path:
    """One row per grid point: coordinates followed by the sample value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    axes = [f"x{i}" for i in range(f.grid.d)]
    coords = [c.ravel() for c in f.grid.coordinates]
    values = f.samples.ravel()
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(axes + ["value"])
        for i in range(values.size):
            row = [repr(float(c[i])) for c in coords]
            row.append(repr(values[i].item()))
            writer.writerow(row)
    return path


def main():
    """Demonstrate transforms and norms on a cosine."""
    grid = Grid(d=1, n=64, length=2.0 * math.pi)
    f = cosine_mode(grid, 4)
    print(f"Grid: d={grid.d}, n={grid.n}, L={grid.length:.4f}")
    print(f"  f_hat(4) = {f.spectrum[4].real:.6f}")
    print(f"  ||f||_2 = {lp_norm(f, 2):.6f} (sqrt(pi) = {math.sqrt(math.pi):.6f})")
    df = gradient(f)[0]
    exact = -4.0 * np.sin(4.0 * grid.coordinates[0])
    print(f"  max |f' + 4 sin 4x| = {np.max(np.abs(df.samples - exact)):.2e}")


if __name__ == "__main__":
    main()
