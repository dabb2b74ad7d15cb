"""From windows to 0-1 arrays and back.

x_W(g) = 1 if tau(g) lies in a FULL_IN cell, 0 if in a FULL_OUT cell, and
UNDECIDED when it falls into a FRONTIER cell of the truncated tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .odometer import OdometerSpec
from .window import (
    UNDECIDED,
    WindowTree,
    boundary_mass,
    residue_table,
    tree_from_table,
)

SYMBOLS = {0: "0", 1: "1", UNDECIDED: "?"}


@dataclass(frozen=True, eq=False)
class SymbolicArray:
    """Values of x on [g_lo, g_hi) as int8 codes 0, 1, or UNDECIDED (-1)."""

    spec: OdometerSpec
    g_lo: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int8)
        if not np.isin(values, (0, 1, UNDECIDED)).all():
            raise ValueError("symbols must be 0, 1 or UNDECIDED")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def g_hi(self) -> int:
        return self.g_lo + len(self.values)

    def __len__(self):
        return len(self.values)

    def at(self, g: int) -> int:
        if not self.g_lo <= g < self.g_hi:
            raise IndexError(f"{g} outside [{self.g_lo}, {self.g_hi})")
        return int(self.values[g - self.g_lo])

    def window(self, lo: int, hi: int) -> np.ndarray:
        if lo < self.g_lo or hi > self.g_hi:
            raise ValueError(f"range [{lo}, {hi}) not covered by [{self.g_lo}, {self.g_hi})")
        return self.values[lo - self.g_lo: hi - self.g_lo]

    def undecided_count(self) -> int:
        return int((self.values == UNDECIDED).sum())

    def to_text(self) -> str:
        return "".join(SYMBOLS[int(v)] for v in self.values)

    def to_csv(self) -> str:
        lines = ["g,symbol"]
        lines += [f"{self.g_lo + i},{SYMBOLS[int(v)]}" for i, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (
            isinstance(other, SymbolicArray)
            and self.spec == other.spec
            and self.g_lo == other.g_lo
            and np.array_equal(self.values, other.values)
        )


def generate_array(w: WindowTree, g_lo: int, g_hi: int) -> SymbolicArray:
    if g_hi < g_lo:
        raise ValueError(f"empty range [{g_lo}, {g_hi})")
    table = residue_table(w)
    gs = np.arange(g_lo, g_hi, dtype=np.int64)
    return SymbolicArray(w.spec, g_lo, table[gs % len(table)])


def array_from_oracle(spec: OdometerSpec, oracle, g_lo: int, g_hi: int) -> SymbolicArray:
    """Sample a callable g -> 0 / 1 / None on [g_lo, g_hi)."""
    vals = []
    for g in range(g_lo, g_hi):
        v = oracle(g)
        vals.append(UNDECIDED if v is None else int(v))
    return SymbolicArray(spec, g_lo, np.array(vals, dtype=np.int8))


@dataclass(frozen=True)
class PeriodReport:
    level: int
    residues_one: frozenset
    residues_zero: frozenset
    density: Fraction

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "residues_one": sorted(self.residues_one),
            "residues_zero": sorted(self.residues_zero),
            "density": {
                "num": str(self.density.numerator),
                "den": str(self.density.denominator),
                "decimal": float(self.density),
            },
        }


def _report(level: int, codes: np.ndarray) -> PeriodReport:
    ones = frozenset(int(r) for r in np.flatnonzero(codes == 1))
    zeros = frozenset(int(r) for r in np.flatnonzero(codes == 0))
    return PeriodReport(level, ones, zeros, Fraction(len(ones) + len(zeros), len(codes)))


def period_report(w: WindowTree, n: int) -> PeriodReport:
    """Per(x_W, Gamma_n, alpha) as residues of level-n cylinders entirely IN / OUT."""
    if not 1 <= n <= w.spec.max_depth:
        raise ValueError(f"level {n} outside [1, {w.spec.max_depth}]")
    return _report(n, residue_table(w, n))


def period_report_from_array(x: SymbolicArray, n: int) -> PeriodReport:
    """Per-sets read off a sample: residue r counts if x is constant on all sampled g = r mod M_n.

    Certified only up to the sampled range; UNDECIDED positions break periodicity.
    """
    modulus = x.spec.index(n)
    if len(x) < modulus:
        raise ValueError(f"sample of length {len(x)} does not cover one period {modulus}")
    return _report(n, _fold(x, modulus))


def _fold(x: SymbolicArray, modulus: int) -> np.ndarray:
    gs = np.arange(x.g_lo, x.g_hi, dtype=np.int64)
    res = gs % modulus
    vals = x.values.astype(np.int64)
    lo = np.full(modulus, 2, dtype=np.int64)
    hi = np.full(modulus, -2, dtype=np.int64)
    np.minimum.at(lo, res, vals)
    np.maximum.at(hi, res, vals)
    codes = np.full(modulus, UNDECIDED, dtype=np.int8)
    constant = lo == hi
    codes[constant] = lo[constant]
    return codes


@dataclass(frozen=True)
class RegularityReport:
    densities: tuple[Fraction, ...]
    limit_estimate: Fraction


def regularity_constant(w: WindowTree, max_n: int) -> RegularityReport:
    """D(x_W, Gamma_n) for n = 1..max_n, next to 1 - boundary_mass(W).hi."""
    if not 1 <= max_n <= max(1, w.depth) or max_n > w.spec.max_depth:
        raise ValueError(f"max_n must lie in [1, {max(1, w.depth)}]")
    dens = tuple(period_report(w, n).density for n in range(1, max_n + 1))
    return RegularityReport(dens, 1 - boundary_mass(w).hi)


def reconstruct_window(x, depth: int, spec: OdometerSpec | None = None,
                       g_range: tuple[int, int] | None = None) -> WindowTree:
    """Rebuild W from a Toeplitz array: U_n / V_n from the Per-sets, the rest FRONTIER.

    `x` is a SymbolicArray or a callable oracle (then `spec` and `g_range`
    are required). The sample must cover at least one period M_depth.
    """
    if not isinstance(x, SymbolicArray):
        if spec is None or g_range is None:
            raise ValueError("an oracle needs a spec and a sample range")
        x = array_from_oracle(spec, x, *g_range)
    modulus = x.spec.index(depth)
    if len(x) < modulus:
        raise ValueError(
            f"sample of length {len(x)} cannot decide Gamma_{depth}-periodicity (period {modulus})"
        )
    return tree_from_table(x.spec, _fold(x, modulus), depth)


def write_array(x: SymbolicArray, fmt: str = "text") -> str:
    if fmt == "text":
        return x.to_text() + "\n"
    if fmt == "csv":
        return x.to_csv()
    if fmt == "json":
        return json.dumps({"g_lo": x.g_lo, "symbols": x.to_text()}) + "\n"
    raise ValueError(f"unknown array format {fmt!r}")
