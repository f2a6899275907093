#!/usr/bin/env python3
"""
Littlewood-Paley machinery for the hybrid Besov framework.

Provides the smooth dyadic cutoff (chi, phi), dyadic blocks and low-frequency
cutoffs, the epsilon-dependent frequency partition into low / medium_i / high
regimes (plus bracket regimes), regime projections and semi-norms, and the
construction and validation of admissible integrability sequences.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python littlewood_paley.py
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
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from grid_field import Grid, GridField, VecField, fourier_multiplier, lp_norm

logger = logging.getLogger(__name__)

INNER_RADIUS = 0.75
OUTER_RADIUS = 4.0 / 3.0
DEFAULT_N0 = 4
# relative slack when comparing exponents against constraint bounds
BOUND_TOLERANCE = 1e-12
MAX_MINIMAL_LENGTH = 64

Field = Union[GridField, VecField]


class PartitionError(ValueError):
    """Invalid frequency partition or regime request."""


class SequenceError(ValueError):
    """Invalid integrability sequence input."""


class NonIncreasingSequenceError(SequenceError):
    """The medium exponents are not strictly increasing."""


class InadmissibleSequenceError(SequenceError):
    """A generated sequence fails the admissibility constraints."""

    def __init__(self, message: str, sequence: "AdmissibleSequence", verdict):
        super().__init__(message)
        self.sequence = sequence
        self.verdict = verdict


def _bump(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    left = _bump(t)
    right = _bump(1.0 - np.asarray(t, dtype=float))
    return left / (left + right)


def _scalar_or_array(values: np.ndarray, like) -> Union[float, np.ndarray]:
    return float(values) if np.ndim(like) == 0 else values


@dataclass(frozen=True)
class DyadicCutoff:
    """Radial profiles chi (ball cutoff) and phi(r) = chi(r/2) - chi(r) (annulus)."""

    inner: float = INNER_RADIUS
    outer: float = OUTER_RADIUS

    def chi(self, r):
        r_arr = np.asarray(r, dtype=float)
        values = 1.0 - _smoothstep((r_arr - self.inner) / (self.outer - self.inner))
        return _scalar_or_array(values, r)

    def phi(self, r):
        r_arr = np.asarray(r, dtype=float)
        values = np.asarray(self.chi(r_arr / 2.0)) - np.asarray(self.chi(r_arr))
        return _scalar_or_array(values, r)

    @property
    def annulus(self) -> Tuple[float, float]:
        """Support of phi."""
        return self.inner, 2.0 * self.outer


def build_cutoff() -> DyadicCutoff:
    return DyadicCutoff()


def shell_range(grid: Grid, cut: DyadicCutoff) -> Tuple[int, int]:
    """Inclusive dyadic index range whose blocks sum to f - mean(f) on the grid.

    Below j_lo the low cutoff keeps only the mean; above j_hi every block is 0.
    """
    j_lo = math.floor(math.log2(grid.xi_min / cut.outer) + 1e-12)
    j_hi = math.ceil(math.log2(grid.xi_max / cut.inner) - 1e-12) - 1
    return j_lo, j_hi


def shell_indices(grid: Grid, cut: DyadicCutoff) -> List[int]:
    j_lo, j_hi = shell_range(grid, cut)
    return list(range(j_lo, j_hi + 1))


def shell_symbol(grid: Grid, j: int, cut: DyadicCutoff) -> np.ndarray:
    return np.asarray(cut.phi(grid.magnitude / 2.0**j))


def dyadic_block(f: GridField, j: int, cut: DyadicCutoff) -> GridField:
    return fourier_multiplier(f, shell_symbol(f.grid, j, cut))


def low_cutoff(f: GridField, j: int, cut: DyadicCutoff) -> GridField:
    return fourier_multiplier(f, np.asarray(cut.chi(f.grid.magnitude / 2.0**j)))


def subgrid_remainder(f: GridField, cut: DyadicCutoff) -> GridField:
    """Part of f below the grid's lowest shell (the mean on a torus)."""
    j_lo, _ = shell_range(f.grid, cut)
    return low_cutoff(f, j_lo, cut)


class RegimeKind(str, Enum):
    FULL = "full"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    LOW_MEDIUM = "low_medium"
    MEDIUM_MEDIUM = "medium_medium"
    MEDIUM_HIGH = "medium_high"


@dataclass(frozen=True)
class Regime:
    """A frequency regime: low, medium(i), high, full or a bracket.

    Brackets: LOW_MEDIUM(a) is [l, m_a], MEDIUM_MEDIUM(a, b) is [m_a, m_b] with
    a >= b, MEDIUM_HIGH(b) is [m_b, h].
    """

    kind: RegimeKind
    a: int = 0
    b: int = 0

    @classmethod
    def full(cls) -> "Regime":
        return cls(RegimeKind.FULL)

    @classmethod
    def low(cls) -> "Regime":
        return cls(RegimeKind.LOW)

    @classmethod
    def high(cls) -> "Regime":
        return cls(RegimeKind.HIGH)

    @classmethod
    def medium(cls, i: int) -> "Regime":
        return cls(RegimeKind.MEDIUM, a=i)

    @classmethod
    def low_medium(cls, a: int) -> "Regime":
        return cls(RegimeKind.LOW_MEDIUM, a=a)

    @classmethod
    def medium_medium(cls, a: int, b: int) -> "Regime":
        if a < b:
            raise PartitionError(f"bracket [m_{a}, m_{b}] needs a >= b")
        return cls(RegimeKind.MEDIUM_MEDIUM, a=a, b=b)

    @classmethod
    def medium_high(cls, b: int) -> "Regime":
        return cls(RegimeKind.MEDIUM_HIGH, b=b)

    @property
    def label(self) -> str:
        labels = {
            RegimeKind.FULL: "full",
            RegimeKind.LOW: "l",
            RegimeKind.HIGH: "h",
            RegimeKind.MEDIUM: f"m{self.a}",
            RegimeKind.LOW_MEDIUM: f"[l,m{self.a}]",
            RegimeKind.MEDIUM_MEDIUM: f"[m{self.a},m{self.b}]",
            RegimeKind.MEDIUM_HIGH: f"[m{self.b},h]",
        }
        return labels[self.kind]

    @property
    def is_bracket(self) -> bool:
        return self.kind in (
            RegimeKind.LOW_MEDIUM,
            RegimeKind.MEDIUM_MEDIUM,
            RegimeKind.MEDIUM_HIGH,
        )


@dataclass(frozen=True)
class FrequencyPartition:
    """Threshold J = floor(log2(1/eps)) + k0 and n_medium windows of width n0.

    high = {j >= J}, medium i = [J - n0 i, J - n0 (i - 1)), low = {j < J - n0 R}.
    """

    eps: float
    k0: int = 0
    n0: int = DEFAULT_N0
    n_medium: int = 0

    def __post_init__(self):
        if not self.eps > 0:
            raise PartitionError(f"eps must be positive, got {self.eps}")
        if self.n0 < 1:
            raise PartitionError(f"regime width N0 must be >= 1, got {self.n0}")
        if self.n_medium < 0:
            raise PartitionError("number of medium regimes must be >= 0")

    @property
    def jeps(self) -> int:
        return math.floor(-math.log2(self.eps) + 1e-12) + self.k0

    @property
    def low_upper(self) -> int:
        """Low regime is j < low_upper."""
        return self.jeps - self.n0 * self.n_medium

    def medium_window(self, i: int) -> Tuple[int, int]:
        """Half-open index window [lo, hi) of medium regime i."""
        self._check_medium(i)
        return self.jeps - self.n0 * i, self.jeps - self.n0 * (i - 1)

    def _check_medium(self, i: int) -> None:
        if not 1 <= i <= self.n_medium:
            raise PartitionError(
                f"medium regime {i} out of range 1..{self.n_medium}"
            )

    def check(self, regime: Regime) -> None:
        if regime.kind == RegimeKind.MEDIUM:
            self._check_medium(regime.a)
        elif regime.kind == RegimeKind.LOW_MEDIUM:
            self._check_medium(regime.a)
        elif regime.kind == RegimeKind.MEDIUM_MEDIUM:
            self._check_medium(regime.a)
            self._check_medium(regime.b)
        elif regime.kind == RegimeKind.MEDIUM_HIGH:
            self._check_medium(regime.b)

    def regime_of(self, j: int) -> Regime:
        if j >= self.jeps:
            return Regime.high()
        if j < self.low_upper:
            return Regime.low()
        i = (self.jeps - 1 - j) // self.n0 + 1
        return Regime.medium(i)

    def contains(self, regime: Regime, j: int) -> bool:
        kind = regime.kind
        if kind == RegimeKind.FULL:
            return True
        if kind == RegimeKind.HIGH:
            return j >= self.jeps
        if kind == RegimeKind.LOW:
            return j < self.low_upper
        if kind == RegimeKind.MEDIUM:
            lo, hi = self.medium_window(regime.a)
            return lo <= j < hi
        if kind == RegimeKind.LOW_MEDIUM:
            return j < self.jeps - self.n0 * (regime.a - 1)
        if kind == RegimeKind.MEDIUM_MEDIUM:
            return self.jeps - self.n0 * regime.a <= j < self.jeps - self.n0 * (
                regime.b - 1
            )
        if kind == RegimeKind.MEDIUM_HIGH:
            return j >= self.jeps - self.n0 * regime.b
        raise PartitionError(f"unknown regime {regime}")

    def indices(self, regime: Regime, js: Sequence[int]) -> List[int]:
        self.check(regime)
        return [j for j in js if self.contains(regime, j)]

    def regimes(self) -> List[Regime]:
        """The tiling family: low, medium 1..R, high."""
        return (
            [Regime.low()]
            + [Regime.medium(i) for i in range(1, self.n_medium + 1)]
            + [Regime.high()]
        )


@dataclass(frozen=True)
class AdmissibleSequence:
    """Low exponent p, dimension d and medium exponents p_1 < ... < p_R in (2, p)."""

    p: float
    d: int
    ps: Tuple[float, ...] = ()

    @property
    def n_medium(self) -> int:
        return len(self.ps)

    def exponent(self, regime: Regime) -> float:
        if regime.kind == RegimeKind.LOW:
            return self.p
        if regime.kind == RegimeKind.HIGH:
            return 2.0
        if regime.kind == RegimeKind.MEDIUM:
            return self.ps[regime.a - 1]
        raise PartitionError(f"no single exponent for regime {regime.label}")

    def to_dict(self) -> Dict:
        return {"p": self.p, "d": self.d, "R": self.n_medium, "ps": list(self.ps)}


@dataclass(frozen=True)
class BesovSpec:
    """Regularity s, integrability p, summation exponent r, frequency regime."""

    s: float
    p: float
    r: float = 1.0
    regime: Regime = field(default_factory=Regime.full)


def _shell_exponent(
    j: int,
    spec: BesovSpec,
    part: Optional[FrequencyPartition],
    seq: Optional[AdmissibleSequence],
) -> float:
    if seq is None or part is None or not spec.regime.is_bracket:
        return spec.p
    return seq.exponent(part.regime_of(j))


def regime_indices(
    grid: Grid,
    regime: Regime,
    part: Optional[FrequencyPartition],
    cut: DyadicCutoff,
) -> List[int]:
    js = shell_indices(grid, cut)
    if regime.kind == RegimeKind.FULL:
        return js
    if part is None:
        raise PartitionError(f"regime {regime.label} needs a frequency partition")
    return part.indices(regime, js)


def shell_contributions(
    f: GridField,
    spec: BesovSpec,
    part: Optional[FrequencyPartition],
    cut: DyadicCutoff,
    seq: Optional[AdmissibleSequence] = None,
) -> List[Tuple[int, float]]:
    """(j, 2^{js} ||Delta_j f||_{L^p_j}) for every shell of the regime."""
    out = []
    for j in regime_indices(f.grid, spec.regime, part, cut):
        p_j = _shell_exponent(j, spec, part, seq)
        out.append((j, 2.0 ** (j * spec.s) * lp_norm(dyadic_block(f, j, cut), p_j)))
    return out


def aggregate(values: Sequence[float], r: float) -> float:
    """l^r aggregate of nonnegative values."""
    if not r >= 1:
        raise ValueError(f"summation exponent must be >= 1, got {r}")
    if len(values) == 0:
        return 0.0
    arr = np.asarray(values, dtype=float)
    if r == 1:
        return float(arr.sum())
    if math.isinf(r):
        return float(arr.max())
    return float(np.sum(arr**r) ** (1.0 / r))


def besov_norm(
    f: Field,
    spec: BesovSpec,
    part: Optional[FrequencyPartition],
    cut: DyadicCutoff,
    seq: Optional[AdmissibleSequence] = None,
) -> float:
    """Regime-restricted homogeneous Besov semi-norm; vector fields sum components."""
    if isinstance(f, VecField):
        return sum(besov_norm(c, spec, part, cut, seq) for c in f)
    if part is not None:
        part.check(spec.regime)
    values = [v for _, v in shell_contributions(f, spec, part, cut, seq)]
    return aggregate(values, spec.r)


def bernstein_ratio(f: GridField, j: int, a: float, b: float, cut: DyadicCutoff) -> float:
    """||Delta_j f||_b / (2^{jd(1/a - 1/b)} ||Delta_j f||_a); 0 for an empty shell."""
    if not 1 <= a <= b:
        raise ValueError(f"Bernstein exponents need 1 <= a <= b, got a={a}, b={b}")
    block = dyadic_block(f, j, cut)
    base = lp_norm(block, a)
    if base == 0:
        return 0.0
    gain = 2.0 ** (j * f.grid.d * (1.0 / a - 1.0 / b))
    return lp_norm(block, b) / (gain * base)


def embedding_ratio(f: GridField, p: float, cut: DyadicCutoff) -> float:
    """||f||_{B^{d/p}_{p,1}} / ||f||_{B^{d/2}_{2,1}} over every shell of the grid."""
    if not p >= 2:
        raise ValueError(f"embedding exponent must be >= 2, got {p}")
    d = f.grid.d
    bottom = besov_norm(f, BesovSpec(d / 2.0, 2.0), None, cut)
    if bottom == 0:
        return 0.0
    return besov_norm(f, BesovSpec(d / p, p), None, cut) / bottom


def regime_symbol(
    grid: Grid,
    part: Optional[FrequencyPartition],
    regime: Regime,
    cut: DyadicCutoff,
) -> np.ndarray:
    symbol = np.zeros(grid.shape)
    for j in regime_indices(grid, regime, part, cut):
        symbol += shell_symbol(grid, j, cut)
    return symbol


def project_regime(
    f: Field,
    part: Optional[FrequencyPartition],
    regime: Regime,
    cut: DyadicCutoff,
) -> Field:
    """Sum of the dyadic blocks of f over the regime's shells."""
    if part is not None:
        part.check(regime)
    if isinstance(f, VecField):
        return VecField(tuple(project_regime(c, part, regime, cut) for c in f))
    return fourier_multiplier(f, regime_symbol(f.grid, part, regime, cut))


@dataclass
class ShellTable:
    """Per-shell L^p norms of one field with the hybrid exponent of each shell.

    Low shells use p, medium i shells use p_i and high shells use 2, so every
    regime semi-norm of the functionals is a weighted sum over this table.
    """

    js: np.ndarray
    norms: np.ndarray
    part: FrequencyPartition

    def seminorm(self, regime: Regime, s: float) -> float:
        mask = np.array([self.part.contains(regime, int(j)) for j in self.js], bool)
        if not mask.any():
            return 0.0
        return float(np.sum(2.0 ** (self.js[mask] * s) * self.norms[mask]))


def hybrid_shell_table(
    f: Field,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    cut: DyadicCutoff,
) -> ShellTable:
    if part.n_medium != seq.n_medium:
        raise PartitionError(
            f"partition has {part.n_medium} medium regimes, sequence has {seq.n_medium}"
        )
    components = f.components if isinstance(f, VecField) else (f,)
    js = np.array(shell_indices(components[0].grid, cut), dtype=int)
    norms = np.zeros(js.size)
    for k, j in enumerate(js):
        p_j = seq.exponent(part.regime_of(int(j)))
        norms[k] = sum(lp_norm(dyadic_block(c, int(j), cut), p_j) for c in components)
    return ShellTable(js, norms, part)


@dataclass
class ConstraintCheck:
    """One inequality of the admissibility definition."""

    name: str
    value: float
    bound: float
    holds: bool


@dataclass
class SequenceVerdict:
    """Membership verdict for an integrability sequence."""

    valid: bool
    violated: Optional[str]
    checks: List[ConstraintCheck]
    reasons: List[str]
    # whether p_1 > 2p/(p-2) holds strictly (the product and commutator law form)
    law_condition_strict: Optional[bool] = None

    def to_dict(self) -> Dict:
        return {
            "valid": self.valid,
            "violated": self.violated,
            "law_condition_strict": self.law_condition_strict,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "bound": None if math.isinf(c.bound) else c.bound,
                    "holds": c.holds,
                }
                for c in self.checks
            ],
            "reasons": self.reasons,
        }


def _ratio_bound(a: float, b: float, denominator: float) -> float:
    """a b / denominator, read as +inf when the denominator is <= 0."""
    if denominator <= 0:
        return math.inf
    return a * b / denominator


def _check_input(seq: AdmissibleSequence) -> None:
    if not seq.p > 2:
        raise SequenceError(f"p must exceed 2, got {seq.p}")
    if seq.d < 1:
        raise SequenceError(f"dimension must be >= 1, got {seq.d}")
    for a, b in zip(seq.ps, seq.ps[1:]):
        if not b > a:
            raise NonIncreasingSequenceError(
                f"medium exponents must increase strictly: {seq.ps}"
            )
    for q in seq.ps:
        if not 2 < q < seq.p:
            raise SequenceError(f"medium exponent {q} outside (2, {seq.p})")


def validate_sequence(seq: AdmissibleSequence) -> SequenceVerdict:
    """Check every admissibility inequality, starting the chain from p_0 = 2.

    For p <= 4 the p-dependent bounds are automatically vacuous, so a single
    chain covers both branches of the definition.
    """
    _check_input(seq)
    p, d = seq.p, seq.d
    chain = (2.0,) + tuple(seq.ps)
    checks: List[ConstraintCheck] = []

    for i in range(1, len(chain)):
        prev, cur = chain[i - 1], chain[i]
        below = "2" if i == 1 else f"p_{i - 1}"
        checks.append(
            ConstraintCheck(
                f"p_{i} <= {below} p/(p - {below})",
                cur,
                _ratio_bound(prev, p, p - prev),
                True,
            )
        )
        checks.append(
            ConstraintCheck(
                f"p_{i} <= {below} d/(d - {below})",
                cur,
                _ratio_bound(prev, d, d - prev),
                True,
            )
        )

    last = chain[-1]
    checks.append(ConstraintCheck("p <= 2 p_R", p, 2.0 * last, True))
    checks.append(
        ConstraintCheck("p <= p_R d/(d - p_R)", p, _ratio_bound(last, d, d - last), True)
    )

    reasons = []
    violated = None
    for check in checks:
        check.holds = check.value <= check.bound * (1.0 + BOUND_TOLERANCE)
        if not check.holds:
            reasons.append(f"{check.name}: {check.value:.6g} > {check.bound:.6g}")
            if violated is None:
                violated = check.name

    strict = None
    if seq.ps:
        strict = seq.ps[0] > 2.0 * p / (p - 2.0)
    return SequenceVerdict(violated is None, violated, checks, reasons, strict)


def minimal_sequence(p: float, d: int) -> AdmissibleSequence:
    """Shortest admissible sequence built greedily from the largest allowed steps."""
    if not p > 2:
        raise SequenceError(f"p must exceed 2, got {p}")
    ps: List[float] = []
    prev = 2.0
    for _ in range(MAX_MINIMAL_LENGTH + 1):
        candidate = AdmissibleSequence(p, d, tuple(ps))
        if validate_sequence(candidate).valid:
            return candidate
        step = min(_ratio_bound(prev, p, p - prev), _ratio_bound(prev, d, d - prev))
        if step >= p:
            step = 0.5 * (prev + p)
        ps.append(step)
        prev = step
    raise SequenceError(f"no admissible sequence of length <= {MAX_MINIMAL_LENGTH}")


def example_sequence(p: float, d: int) -> AdmissibleSequence:
    """Explicit family p_i = 2 + 4i/(p-2), R = floor((p-2)(p-4)/8) + 1.

    For p <= 4 the shortest admissible sequence is returned instead. Raises
    InadmissibleSequenceError (carrying the verdict) when the family fails.
    """
    if not p > 2:
        raise SequenceError(f"p must exceed 2, got {p}")
    if p <= 4:
        return minimal_sequence(p, d)
    n_medium = math.floor((p - 2.0) * (p - 4.0) / 8.0) + 1
    ps = tuple(2.0 + 4.0 * i / (p - 2.0) for i in range(1, n_medium + 1))
    seq = AdmissibleSequence(p, d, ps)
    verdict = validate_sequence(seq)
    if not verdict.valid:
        raise InadmissibleSequenceError(
            f"explicit family for p={p}, d={d} violates {verdict.violated}",
            seq,
            verdict,
        )
    return seq


def main():
    """Print the partition and sequence data for a few settings."""
    cut = build_cutoff()
    total = sum(cut.phi(2.0**-j * 1.37) for j in range(-20, 21))
    print(f"Partition of unity at r=1.37: {total:.15f}")

    for p in (6.0, 8.0, 10.0):
        seq = example_sequence(p, 3)
        verdict = validate_sequence(seq)
        mark = "✓" if verdict.valid else "✗"
        print(f"{mark} p={p:g}: R={seq.n_medium}, ps={[round(q, 4) for q in seq.ps]}")

    part = FrequencyPartition(eps=0.1, k0=0, n0=2, n_medium=2)
    print(f"eps=0.1: J={part.jeps}, low < {part.low_upper}")
    for i in range(1, part.n_medium + 1):
        print(f"  medium {i}: {part.medium_window(i)}")


if __name__ == "__main__":
    main()
