#!/usr/bin/env python3
"""
Bony calculus on the periodic grid: paraproducts, remainder, the commutator
r_j = S_{j-1} f Delta_j g - Delta_j(f g), the support-vanishing residual for
products of low-frequency fields, empirical support margins and the
high-frequency product/commutator law ratios.

All products are 2/3-dealiased, so every identity here holds on the dealiased
product.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python bony.py
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
from typing import Dict, List, Optional

import numpy as np

from grid_field import (
    Grid,
    GridField,
    band_limited_random,
    check_same_grid,
    gradient,
    lp_norm,
    product,
    vector_lp_norm,
)
from littlewood_paley import (
    AdmissibleSequence,
    BesovSpec,
    DyadicCutoff,
    FrequencyPartition,
    PartitionError,
    Regime,
    besov_norm,
    build_cutoff,
    dyadic_block,
    low_cutoff,
    project_regime,
    shell_indices,
)

logger = logging.getLogger(__name__)

DEFAULT_A0 = 1.0 / 8.0
# 16/3 * a0 < 3/4
MAX_A0 = 9.0 / 64.0
MARGIN_TOLERANCE = 1e-10
_TINY = 1e-300


class SupportPremiseError(ValueError):
    """a0 outside the range where the support argument forces vanishing."""


@dataclass
class BonyParts:
    """T_f g, T_g f, R(f, g) and the mean x mean term; they sum to f g."""

    para_fg: GridField
    para_gf: GridField
    remainder: GridField
    mean_product: float

    @property
    def total(self) -> GridField:
        return self.para_fg + self.para_gf + self.remainder + self.mean_product


@dataclass
class _Pieces:
    mean: float
    blocks: Dict[int, GridField]
    lows: Dict[int, GridField]  # S_{j-1}
    grid: Grid

    def block(self, j: int) -> GridField:
        block = self.blocks.get(j)
        return self.grid.zeros() if block is None else block

    def widened(self, j: int) -> GridField:
        """Delta~_j = Delta_{j-1} + Delta_j + Delta_{j+1}."""
        return self.block(j - 1) + self.block(j) + self.block(j + 1)


def _pieces(f: GridField, cut: DyadicCutoff) -> _Pieces:
    js = shell_indices(f.grid, cut)
    blocks = {j: dyadic_block(f, j, cut) for j in js}
    lows = {j: low_cutoff(f, j - 1, cut) for j in js}
    return _Pieces(float(np.real(f.mean)), blocks, lows, f.grid)


def _sum(fields: List[GridField], grid: Grid) -> GridField:
    if not fields:
        return grid.zeros()
    return sum(fields[1:], fields[0])


def _paraproduct(pf: _Pieces, pg: _Pieces) -> GridField:
    return _sum([product(pf.lows[j], pg.blocks[j]) for j in pg.blocks], pg.grid)


def _remainder(pf: _Pieces, pg: _Pieces) -> GridField:
    return _sum([product(pf.widened(j), pg.blocks[j]) for j in pg.blocks], pg.grid)


def paraproduct(f: GridField, g: GridField, cut: DyadicCutoff) -> GridField:
    """T_f g = sum_j S_{j-1} f Delta_j g."""
    check_same_grid(f, g)
    return _paraproduct(_pieces(f, cut), _pieces(g, cut))


def remainder(f: GridField, g: GridField, cut: DyadicCutoff) -> GridField:
    """R(f, g) = sum_j Delta~_j f Delta_j g."""
    check_same_grid(f, g)
    return _remainder(_pieces(f, cut), _pieces(g, cut))


def bony_decompose(f: GridField, g: GridField, cut: DyadicCutoff) -> BonyParts:
    check_same_grid(f, g)
    pf, pg = _pieces(f, cut), _pieces(g, cut)
    return BonyParts(
        para_fg=_paraproduct(pf, pg),
        para_gf=_paraproduct(pg, pf),
        remainder=_remainder(pf, pg),
        mean_product=pf.mean * pg.mean,
    )


def commutator(f: GridField, g: GridField, j: int, cut: DyadicCutoff) -> GridField:
    """r_j = S_{j-1} f Delta_j g - Delta_j(f g)."""
    check_same_grid(f, g)
    first = product(low_cutoff(f, j - 1, cut), dyadic_block(g, j, cut))
    return first - dyadic_block(product(f, g), j, cut)


@dataclass
class CommutatorSplit:
    """Pieces of -r_j through the Bony split of f g.

    remainder_part = Delta_j R(f, g), reverse_part = Delta_j T_g f,
    paraproduct_part = Delta_j T_f g - S_{j-1} f Delta_j g.
    """

    remainder_part: GridField
    reverse_part: GridField
    paraproduct_part: GridField

    def commutator(self) -> GridField:
        return -(self.remainder_part + self.reverse_part + self.paraproduct_part)


def commutator_split(
    f: GridField, g: GridField, j: int, cut: DyadicCutoff
) -> CommutatorSplit:
    check_same_grid(f, g)
    parts = bony_decompose(f, g, cut)
    local = product(low_cutoff(f, j - 1, cut), dyadic_block(g, j, cut))
    return CommutatorSplit(
        remainder_part=dyadic_block(parts.remainder, j, cut),
        reverse_part=dyadic_block(parts.para_gf, j, cut),
        paraproduct_part=dyadic_block(parts.para_fg, j, cut) - local,
    )


def support_vanish_residual(
    f: GridField,
    g: GridField,
    part: FrequencyPartition,
    a0: float = DEFAULT_A0,
    cut: Optional[DyadicCutoff] = None,
) -> float:
    """||(f g)^h||_2 / (||f||_2 ||g||_2) for fields truncated below a0 2^J.

    The premise on the spectra is not enforced so counterexamples can be measured.
    """
    if not 0 < a0 < MAX_A0:
        raise SupportPremiseError(f"a0 must lie in (0, 9/64), got {a0}")
    cut = cut or build_cutoff()
    check_same_grid(f, g)
    high = project_regime(product(f, g), part, Regime.high(), cut)
    return lp_norm(high, 2) / (lp_norm(f, 2) * lp_norm(g, 2) + _TINY)


def _touched(h: GridField, js: List[int], cut: DyadicCutoff, tol: float) -> List[int]:
    total = lp_norm(h, 2)
    if total == 0:
        return []
    return [j for j in js if lp_norm(dyadic_block(h, j, cut), 2) > tol * total]


@dataclass
class MarginReport:
    """Observed shell reach of Bony summands.

    n1: remainder summand reach above j'; n1_diagonal: same for Delta_j' f Delta_j' g;
    n2: paraproduct summand spread |j - j'| (n2_up above, n2_down below).
    """

    n1: int
    n1_diagonal: int
    n2: int
    n2_up: int
    n2_down: int

    @property
    def minimal_n0(self) -> int:
        return max(self.n1 + 1, self.n2)

    def to_dict(self) -> Dict:
        return {
            "N1": self.n1,
            "N1_diagonal": self.n1_diagonal,
            "N2": self.n2,
            "N2_up": self.n2_up,
            "N2_down": self.n2_down,
            "minimal_N0": self.minimal_n0,
        }


def measure_margins(
    cut: DyadicCutoff,
    grid: Optional[Grid] = None,
    seed: int = 0,
    tol: float = MARGIN_TOLERANCE,
) -> MarginReport:
    """Scan single-shell products of broadband random fields for their shell reach."""
    if grid is None:
        grid = Grid(d=1, n=2048)
    rng = np.random.default_rng(seed)
    f = band_limited_random(grid, rng)
    g = band_limited_random(grid, rng)
    js = shell_indices(grid, cut)
    pf, pg = _pieces(f, cut), _pieces(g, cut)
    # interior shells whose products stay inside the grid's range and below 2/3 Nyquist
    top = grid.n // 3 * 2.0 * math.pi / grid.length
    interior = [j for j in js[5:] if 8.0 * 2.0**j < top]

    n1 = n1_diag = up = down = 0
    for j in interior:
        for k in _touched(product(pf.widened(j), pg.blocks[j]), js, cut, tol):
            n1 = max(n1, k - j)
        for k in _touched(product(pf.blocks[j], pg.blocks[j]), js, cut, tol):
            n1_diag = max(n1_diag, k - j)
        for k in _touched(product(pf.lows[j], pg.blocks[j]), js, cut, tol):
            up = max(up, k - j)
            down = max(down, j - k)
    report = MarginReport(n1, n1_diag, max(up, down), up, down)
    logger.info("measured margins over shells %s: %s", interior, report.to_dict())
    return report


@dataclass
class LawRatio:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else 0.0


@dataclass(frozen=True)
class _LawExponents:
    p: float
    p1: float
    s: float
    s_low: float  # d/p - d/p1*
    s_split: float  # s1 = s2


def _law_exponents(
    grid: Grid, seq: AdmissibleSequence, s: Optional[float]
) -> _LawExponents:
    if seq.n_medium < 1:
        raise PartitionError("the hybrid product laws need at least one medium regime")
    d = grid.d
    s = d / 2.0 + 1.0 if s is None else s
    p, p1 = seq.p, seq.ps[0]
    p1_star = 2.0 * p1 / (p1 - 2.0)
    s_split = 0.5 * (s - d / 2.0 + 2.0 * d / p1)
    return _LawExponents(p, p1, s, d / p - d / p1_star, s_split)


def _bn(f, s, p, regime, part, cut, seq) -> float:
    return besov_norm(f, BesovSpec(s, p, 1.0, regime), part, cut, seq)


def product_law_ratio(
    f: GridField,
    g: GridField,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    cut: DyadicCutoff,
    s: Optional[float] = None,
) -> LawRatio:
    """High-frequency product law: sum_{j>=J} 2^{js}||Delta_j(fg)||_2 against its bound (C = 1)."""
    grid = check_same_grid(f, g)
    e = _law_exponents(grid, seq, s)
    low_med, med, med_high, high = (
        Regime.low_medium(1),
        Regime.medium(1),
        Regime.medium_high(1),
        Regime.high(),
    )
    lhs = _bn(product(f, g), e.s, 2.0, high, part, cut, seq)
    rhs = (
        _bn(f, e.s_low, e.p, low_med, part, cut, seq) * _bn(g, e.s, e.p1, med, part, cut, seq)
        + lp_norm(f, math.inf) * _bn(g, e.s, 2.0, high, part, cut, seq)
        + _bn(g, e.s_low, e.p, low_med, part, cut, seq) * _bn(f, e.s, e.p1, med, part, cut, seq)
        + lp_norm(g, math.inf) * _bn(f, e.s, 2.0, high, part, cut, seq)
        + _bn(f, e.s_split, e.p1, med_high, part, cut, seq)
        * _bn(g, e.s_split, e.p1, med_high, part, cut, seq)
    )
    return LawRatio(lhs, rhs)


def commutator_law_ratio(
    f: GridField,
    g: GridField,
    part: FrequencyPartition,
    seq: AdmissibleSequence,
    cut: DyadicCutoff,
    s: Optional[float] = None,
) -> LawRatio:
    """High-frequency commutator law: sum_{j>=J} 2^{js}||r_j||_2 against its bound (C = 1)."""
    grid = check_same_grid(f, g)
    e = _law_exponents(grid, seq, s)
    low_med, med, med_high, high = (
        Regime.low_medium(1),
        Regime.medium(1),
        Regime.medium_high(1),
        Regime.high(),
    )
    js = [j for j in shell_indices(grid, cut) if j >= part.jeps]
    lhs = sum(2.0 ** (j * e.s) * lp_norm(commutator(f, g, j, cut), 2) for j in js)
    grad_f = gradient(f)
    rhs = (
        _bn(grad_f, e.s_low, e.p, low_med, part, cut, seq)
        * _bn(g, e.s - 1.0, e.p1, med, part, cut, seq)
        + vector_lp_norm(grad_f, math.inf) * _bn(g, e.s - 1.0, 2.0, high, part, cut, seq)
        + _bn(g, e.s_low, e.p, low_med, part, cut, seq) * _bn(f, e.s, e.p1, med, part, cut, seq)
        + lp_norm(g, math.inf) * _bn(f, e.s, 2.0, high, part, cut, seq)
        + _bn(g, e.s_split, e.p1, med_high, part, cut, seq)
        * _bn(f, e.s_split, e.p1, med_high, part, cut, seq)
    )
    return LawRatio(float(lhs), rhs)


def main():
    """Check the Bony identity and the support margins on random data."""
    cut = build_cutoff()
    grid = Grid(d=1, n=1024)
    rng = np.random.default_rng(0)
    f = band_limited_random(grid, rng)
    g = band_limited_random(grid, rng)
    parts = bony_decompose(f, g, cut)
    residual = np.max(np.abs(product(f, g).samples - parts.total.samples))
    print(f"Bony identity residual: {residual:.2e}")

    margins = measure_margins(cut)
    print(f"Margins: {margins.to_dict()}")


if __name__ == "__main__":
    main()
