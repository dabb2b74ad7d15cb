"""Staged window W_gamma whose array carries every S_n-word, and its zero-entropy partner W_0.

Balls are cylinders: the radius chosen at stage n is a cylinder level
ell_n, and every set of the construction is a residue set mod M_{ell_n}.
F_k is the fundamental domain [0, M_k). Stages beyond two are refused,
since stage 3 would need 2^{#S_2} translates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from ..odometer import OdometerSpec
from ..window import WindowTree, tree_from_table

MAX_STAGES = 2


@dataclass
class Stage:
    n: int
    k: int
    r: int
    level: int
    g_star: int
    G: tuple[int, ...]
    word: dict
    S: tuple[int, ...]
    translates: tuple[int, ...] = ()
    cover: tuple[int, ...] = ()
    invariants: dict = field(default_factory=dict)

    @property
    def U(self) -> set:
        return {g for g, bit in self.word.items() if bit == 1}

    @property
    def V(self) -> set:
        return {g for g, bit in self.word.items() if bit == 0}

    def to_json(self) -> dict:
        return {
            "stage": self.n,
            "k": self.k,
            "r": self.r,
            "ball_level": self.level,
            "g_star": self.g_star,
            "G": list(self.G),
            "word": {str(g): b for g, b in sorted(self.word.items())},
            "S": list(self.S),
            "translates": list(self.translates),
            "cover_points": list(self.cover),
            "cover_count": len(self.cover),
            "invariants": dict(self.invariants),
        }


@dataclass
class EntropyResult:
    gamma: Fraction
    spec: OdometerSpec
    stages: list[Stage]
    w_gamma: WindowTree
    w_zero: WindowTree

    def log_json(self) -> dict:
        return {
            "gamma": {"num": str(self.gamma.numerator), "den": str(self.gamma.denominator)},
            "scales": list(self.spec.scales),
            "stages": [s.to_json() for s in self.stages],
        }


def _mask(spec: OdometerSpec, residues, level: int, target: int) -> np.ndarray:
    """Indicator mod M_target of the union of level-`level` classes."""
    m_lo, m_hi = spec.index(level), spec.index(target)
    small = np.zeros(m_lo, dtype=bool)
    small[[g % m_lo for g in residues]] = True
    return np.tile(small, m_hi // m_lo)


def _ball(spec, g, level, target):
    return _mask(spec, [g], level, target)


def _max_window_hits(mask: np.ndarray, width: int) -> int:
    """max over h of #{f in [h, h + width) : mask[f mod len]}, over one period."""
    period = len(mask)
    reps = -(-(width + period) // period)
    ext = np.concatenate([[0], np.cumsum(np.tile(mask, reps + 1), dtype=np.int64)])
    h = np.arange(period)
    return int((ext[h + width] - ext[h]).max())


def entropy_window(gamma=Fraction(1, 2), stages: int = 2, scales=None,
                   k_hint: int | None = None) -> EntropyResult:
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if not 1 <= stages <= MAX_STAGES:
        raise ValueError(f"stages must lie in [1, {MAX_STAGES}]; 2^#S_2 translates are out of reach")
    spec = OdometerSpec(tuple(scales) if scales is not None else (2,) * 24)
    depth = spec.max_depth

    def too_small(what):
        raise ValueError(f"scale sequence of depth {depth} too short: {what}")

    log: list[Stage] = []
    prev_level, prev_star = 0, 0
    prev_F = [0]
    H_all: list[tuple[set, int]] = []  # (classes, level) per stage
    pending = None  # (G, word, need) handed from stage n to stage n + 1

    for n in range(1, stages + 1):
        # choose k_n
        if n == 1:
            need, G_req = 4, 0
        else:
            need, G_req = pending[2], max(pending[0]) + 1
        divisor = 1 if n == 1 else 2 ** n
        k = k_hint if (n == 1 and k_hint is not None) else None
        if k is None:
            for cand in range(1, depth + 1):
                if (int((1 - gamma) * spec.index(cand) / divisor) >= need
                        and spec.index(cand) >= G_req):
                    k = cand
                    break
            else:
                too_small(f"no k_{n} with r_{n} >= {need}")
        size = spec.index(k)
        r = int((1 - gamma) * size / divisor)
        if r < need:
            raise ValueError(f"r_{n} = {r} violates r_{n} >= {need}")
        if n == 1:
            G = list(range(r - 1))
            word = {g: int(g == 0) for g in G}
        else:
            G, word = pending[0], pending[1]
            if max(G) >= size:
                raise ValueError(f"G_{n} not inside F_k{n} = [0, {size})")

        # ball level ell_n and the next centre g_n*
        level, g_star = None, None
        blocked_src = set(range(size)) | set(G)
        for cand in range(max(k, prev_level + 1), depth + 1):
            mod = spec.index(cand)
            blocked = {g % mod for g in blocked_src}
            step = spec.index(prev_level)
            for j in range(mod // step):
                g = prev_star + j * step
                if g % mod not in blocked:
                    level, g_star = cand, g
                    break
            if level is not None:
                break
        if level is None:
            too_small(f"no ball level for stage {n}")
        mod = spec.index(level)

        U = {g % mod for g, b in word.items() if b}
        V = {g % mod for g, b in word.items() if not b}
        H = U | V
        T_prev = list(H_all)

        def in_T(g):
            return any(g % spec.index(lv) in h for h, lv in T_prev + [(H, level)])

        S = [f for f in range(size) if not in_T(f)]

        # cover points for B(g*_{n-1}) minus the H_l, one per level-ell_n class
        union_H = np.zeros(mod, dtype=bool)
        for h, lv in T_prev + [(H, level)]:
            union_H |= _mask(spec, h, lv, level)
        prev_ball = _ball(spec, prev_star, prev_level, level)
        to_cover = np.flatnonzero(prev_ball & ~union_H)
        translates = ()
        if n < stages:
            translates = tuple(j * mod for j in range(2 ** len(S)))
        taken = {s + t for t in translates for s in S} | {g_star}
        cover = []
        for c in to_cover:
            g = int(c)
            while g in taken:
                g += mod
            cover.append(g)

        stage = Stage(n, k, r, level, g_star, tuple(sorted(G)), dict(word), tuple(S),
                      translates, tuple(cover))
        H_all.append((H, level))

        # invariants (1)-(6) and the covering property, as residue sets mod M_ell_n
        T_star = _mask(spec, H | {g_star % mod}, level, level)
        earlier = np.zeros(mod, dtype=bool)
        for h, lv in H_all[:-1]:
            earlier |= _mask(spec, h, lv, level)
        stage.invariants["1"] = _max_window_hits(T_star, size) <= r
        stage.invariants["2"] = len(S) >= gamma * size
        lhs = prev_ball & ~union_H
        rhs = prev_ball & ~(_ball(spec, prev_star, level, level) | _mask(spec, V, level, level))
        stage.invariants["3"] = bool((lhs == rhs).all())
        stage.invariants["4"] = all(union_H[f % mod] for f in prev_F)
        stage.invariants["5"] = not union_H[g_star % mod]
        stage.invariants["6"] = not any((earlier | T_star)[s % mod] for s in S)
        cover_mask = _mask(spec, cover, level, level) if cover else np.zeros(mod, dtype=bool)
        stage.invariants["covering"] = bool((~lhs | cover_mask).all())
        log.append(stage)

        if n < stages:
            next_G = sorted({s + t for t in translates for s in S} | set(cover) | {g_star})
            next_word = {g: 0 for g in cover}
            next_word[g_star] = 1
            for t, bits in zip(translates, product((0, 1), repeat=len(S))):
                for s, b in zip(S, bits):
                    next_word[s + t] = b
            pending = (next_G, next_word, len(S) * 2 ** len(S) + len(cover) + 2)
        prev_level, prev_star, prev_F = level, g_star, list(range(size))

    w_gamma, w_zero = _windows(spec, log)
    return EntropyResult(gamma, OdometerSpec(spec.scales, w_gamma.spec.max_depth), log,
                         w_gamma, w_zero)


def _windows(spec: OdometerSpec, log: list[Stage]):
    top = log[-1].level
    tspec = OdometerSpec(spec.scales, top)
    table = np.full(tspec.index(top), -1, dtype=np.int8)
    for st in log:
        for bit, cells in ((1, st.U), (0, st.V)):
            m = _mask(tspec, cells, st.level, top) if cells else None
            if m is None:
                continue
            clash = (table[m] != -1) & (table[m] != bit)
            if clash.any():
                raise ValueError(f"stage {st.n} relabels a decided cell")
            table[m] = bit
    w_gamma = tree_from_table(tspec, table, top)

    zero = np.zeros(tspec.index(top), dtype=np.int8)
    centre, centre_level = 0, 0
    for st in log:
        zero[_mask(tspec, [centre], st.level, top)] = 1
        centre, centre_level = st.g_star, st.level
    zero[_mask(tspec, [centre], centre_level, top)] = -1
    w_zero = tree_from_table(tspec, zero, top)
    return w_gamma, w_zero


def shape_of(stage: Stage) -> tuple[int, tuple[int, ...]]:
    """S_n as (anchor, offsets) for pattern counting."""
    anchor = stage.S[0]
    return anchor, tuple(s - anchor for s in stage.S)
