"""Besicovitch/Weyl estimates, d_W ball profiles, box-dimension slopes and word counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Callable, NamedTuple

import numpy as np

from .modelset import SymbolicArray, period_report
from .window import UNDECIDED, MeasureInterval, WindowTree, coset_distance, truncate


class BesicovitchEstimate(NamedTuple):
    lengths: tuple[int, ...]
    values: tuple[Fraction, ...]
    excluded: tuple[int, ...]


def _disagreement(x: SymbolicArray, y: SymbolicArray, lo: int, hi: int, undecided: str):
    a, b = x.window(lo, hi), y.window(lo, hi)
    decided = (a != UNDECIDED) & (b != UNDECIDED)
    if undecided == "fail" and not decided.all():
        raise ValueError(f"UNDECIDED symbols in [{lo}, {hi})")
    if undecided not in ("fail", "exclude"):
        raise ValueError(f"undecided policy must be 'exclude' or 'fail', got {undecided!r}")
    return (a != b) & decided, decided


def besicovitch_estimate(x: SymbolicArray, y: SymbolicArray, lengths,
                         undecided: str = "exclude") -> BesicovitchEstimate:
    """Disagreement density on F_n = [0, n) for each n, over positions decided in both arrays."""
    if x.spec != y.spec:
        raise ValueError("arrays over different odometers")
    lengths = tuple(int(n) for n in lengths)
    if not lengths or min(lengths) < 1:
        raise ValueError("lengths must be positive")
    top = max(lengths)
    diff, decided = _disagreement(x, y, 0, top, undecided)
    diff_sum = np.concatenate([[0], np.cumsum(diff, dtype=np.int64)])
    dec_sum = np.concatenate([[0], np.cumsum(decided, dtype=np.int64)])
    values, excluded = [], []
    for n in lengths:
        count = int(dec_sum[n])
        if count == 0:
            raise ValueError(f"no decided positions in [0, {n})")
        values.append(Fraction(int(diff_sum[n]), count))
        excluded.append(n - count)
    return BesicovitchEstimate(lengths, tuple(values), tuple(excluded))


def weyl_estimate(x: SymbolicArray, y: SymbolicArray, window_len: int,
                  g_range: tuple[int, int] | None = None,
                  undecided: str = "exclude") -> Fraction:
    """sup over offsets k of the disagreement density on [k, k + window_len); a lower bound."""
    lo, hi = g_range if g_range is not None else (max(x.g_lo, y.g_lo), min(x.g_hi, y.g_hi))
    if window_len < 1 or hi - lo < window_len:
        raise ValueError(f"range [{lo}, {hi}) shorter than the window {window_len}")
    diff, decided = _disagreement(x, y, lo, hi, undecided)
    d = np.concatenate([[0], np.cumsum(diff, dtype=np.int64)])
    c = np.concatenate([[0], np.cumsum(decided, dtype=np.int64)])
    starts = np.arange(hi - lo - window_len + 1)
    num = d[starts + window_len] - d[starts]
    den = c[starts + window_len] - c[starts]
    ok = den > 0
    if not ok.any():
        raise ValueError("no window with decided positions")
    # exact max of num/den via cross-multiplication on the candidates
    best = Fraction(0)
    for i in np.flatnonzero(ok & (num > 0)):
        f = Fraction(int(num[i]), int(den[i]))
        if f > best:
            best = f
    return best


@dataclass(frozen=True)
class BallProfile:
    """Ball measures nu(B_eps(0_H)) for eps strictly decreasing."""

    points: tuple[tuple[Fraction, MeasureInterval], ...]

    def to_csv(self) -> str:
        rows = ["level,epsilon_num,epsilon_den,ball_lo_num,ball_lo_den,ball_hi_num,ball_hi_den"]
        for i, (eps, m) in enumerate(self.points, start=1):
            rows.append(f"{i},{eps.numerator},{eps.denominator},{m.lo.numerator},"
                        f"{m.lo.denominator},{m.hi.numerator},{m.hi.denominator}")
        return "\n".join(rows) + "\n"


def d_W_coset_bounds(w: WindowTree) -> Callable[[int, int], MeasureInterval]:
    """distance(level, residue) -> bounds for d_W(xi, 0_H) over the whole coset."""
    cache = {}

    def coarse(level):
        if level not in cache:
            cache[level] = truncate(w, level)
        return cache[level]

    return lambda level, residue: coset_distance(w, level, residue, coarse)


def ball_measure(spec, eps: Fraction, distance, depth: int,
                 closed: bool = False) -> MeasureInterval:
    """nu{xi : d(xi, 0) < eps} (or <= eps when closed) by coset refinement.

    A coset whose whole distance interval lies inside the ball counts fully;
    one whose interval lies outside is dropped; the others are split until
    `depth`, where they enter only the upper bound.
    """
    lo = hi = Fraction(0)
    stack = [(1, r) for r in range(spec.scale(1))]
    while stack:
        level, r = stack.pop()
        d = distance(level, r)
        mass = spec.cylinder_measure(level)
        inside = d.hi <= eps if closed else d.hi < eps
        outside = d.lo > eps if closed else d.lo >= eps
        if inside:
            lo += mass
            hi += mass
        elif outside:
            continue
        elif level < depth:
            base = spec.index(level)
            stack.extend((level + 1, r + j * base) for j in range(spec.scale(level + 1)))
        else:
            hi += mass
    return MeasureInterval(lo, hi)


def ball_profile(w: WindowTree, depth: int | None = None, radii=None,
                 distance=None, closed: bool = False) -> BallProfile:
    """Open (or closed) d_W balls around 0_H on a radius grid.

    The default grid is the cylinder grid 1/M_n (n <= depth); `distance`
    may replace d_W by any invariant gauge given as coset bounds.
    """
    depth = w.depth if depth is None else depth
    if not 1 <= depth <= w.spec.max_depth:
        raise ValueError(f"depth must lie in [1, {w.spec.max_depth}]")
    if radii is None:
        radii = [w.spec.cylinder_measure(n) for n in range(1, depth + 1)]
    radii = [Fraction(e) for e in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    distance = d_W_coset_bounds(w) if distance is None else distance
    return BallProfile(tuple((e, ball_measure(w.spec, e, distance, depth, closed))
                             for e in radii))


@dataclass(frozen=True)
class SlopeEstimate:
    """ratios[i] = (lo, hi) bounds on log(ball measure) / log(eps)."""

    ratios: tuple[tuple[float, float], ...]
    upper: float
    lower: float


def ac_estimate(profile: BallProfile, tail: int | None = None) -> SlopeEstimate:
    ratios = []
    for eps, m in profile.points:
        if eps >= 1:
            continue
        le = log(eps)
        lo_r = log(m.hi) / le if m.hi > 0 else float("inf")
        hi_r = log(m.lo) / le if m.lo > 0 else float("inf")
        ratios.append((lo_r, hi_r))
    if not ratios or all(m.lo == 1 for _, m in profile.points):
        raise ValueError("degenerate profile: every ball is the whole group")
    tail = len(ratios) - len(ratios) // 2 if tail is None else tail
    window = ratios[-tail:]
    return SlopeEstimate(tuple(ratios), max(h for _, h in window), min(l for l, _ in window))


def ac_toeplitz_upper_bound(w: WindowTree, max_n: int) -> float:
    """max over n <= max_n of log M_{n+1} / -log(1 - D(x, Gamma_n)), skipping densities 0 and 1."""
    if not 1 <= max_n < w.spec.max_depth:
        raise ValueError(f"max_n must lie in [1, {w.spec.max_depth - 1}] so that M_(n+1) exists")
    best = None
    for n in range(1, max_n + 1):
        dens = period_report(w, n).density
        if dens in (0, 1):
            continue
        value = log(w.spec.index(n + 1)) / -log(1 - dens)
        best = value if best is None else max(best, value)
    if best is None:
        raise ValueError("every sampled density is 0 or 1")
    return best


def entropy_word_count(x: SymbolicArray, n: int, sample_len: int | None = None) -> tuple[int, float]:
    """Distinct length-n factors in the first `sample_len` symbols; returns (count, log(count)/n)."""
    sample_len = len(x) if sample_len is None else sample_len
    if not 1 <= n <= sample_len <= len(x):
        raise ValueError(f"need 1 <= n <= sample_len <= {len(x)}")
    vals = x.values[:sample_len]
    if (vals == UNDECIDED).any():
        raise ValueError("UNDECIDED symbols in the sample")
    windows = np.lib.stride_tricks.sliding_window_view(vals, n)
    count = len(np.unique(windows, axis=0))
    return count, log(count) / n


def count_patterns(x: SymbolicArray, offsets) -> int:
    """Distinct fully decided patterns x(g + o), o in offsets, over all anchors g in range."""
    rel = np.asarray(sorted(offsets), dtype=np.int64)
    rel -= rel[0]
    span = int(rel[-1])
    if span >= len(x):
        raise ValueError("pattern wider than the sample")
    block = x.values[np.arange(len(x) - span)[:, None] + rel[None, :]]
    block = block[(block != UNDECIDED).all(axis=1)]
    return len(np.unique(block, axis=0)) if len(block) else 0
