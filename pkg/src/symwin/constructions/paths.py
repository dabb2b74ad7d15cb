"""The path t -> A(t) from the empty window to H, and blends along it.

Level-n cylinders are re-enumerated so that the first child of every cell
is the one containing the cell's representative integer. An integer then
has an encoding that is eventually "first child", which keeps the greedy
chain off tau(Z) whenever the chain does not stop.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..odometer import OdometerSpec
from ..window import FRONTIER, IN, OUT, WindowTree, mixed, select


def representative(residue: int, modulus: int) -> int:
    """Integer of minimal absolute value in the class; ties go to the nonnegative one."""
    r = residue % modulus
    return r if 2 * r <= modulus else r - modulus


def child_order(spec: OdometerSpec, level: int, rep: int) -> list[int]:
    """Digits at `level` + 1 below a level-`level` cell whose representative is `rep`."""
    m = spec.scale(level + 1)
    first = spec.digits_of(rep, level + 1)[level]
    return [first] + [d for d in range(m) if d != first]


@dataclass(frozen=True)
class PathTrace:
    """Greedy choices k_1, k_2, ... (1-based) and the cells they led into."""

    t: Fraction
    ks: tuple[int, ...]
    chain: tuple[int, ...]
    mass: Fraction
    exact: bool

    def to_json(self) -> dict:
        return {
            "t": {"num": str(self.t.numerator), "den": str(self.t.denominator)},
            "k": list(self.ks),
            "chain_digits": list(self.chain),
            "mass": {"num": str(self.mass.numerator), "den": str(self.mass.denominator)},
            "exact": self.exact,
        }


def path_window(spec: OdometerSpec, t, depth: int | None = None) -> tuple[WindowTree, PathTrace]:
    """A(t) truncated at `depth`: the chain cell left over at the bottom is FRONTIER."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    depth = spec.max_depth if depth is None else depth
    if not 1 <= depth <= spec.max_depth:
        raise ValueError(f"depth must lie in [1, {spec.max_depth}]")

    acc = Fraction(0)
    ks, chain = [], []
    rep = 0
    cell = Fraction(1)
    levels = []  # (order, k) per level
    exact = False
    for level in range(depth):
        order = child_order(spec, level, rep)
        m = len(order)
        piece = cell / m
        k = min(m + 1, int((t - acc) / piece) + 1)
        ks.append(k)
        acc += (k - 1) * piece
        levels.append((order, k))
        if acc == t or k > m:
            exact = True
            break
        digit = order[k - 1]
        chain.append(digit)
        rep = representative(spec.residue_of(chain), spec.index(level + 1))
        cell = piece

    node = OUT if exact else FRONTIER
    for order, k in reversed(levels):
        kids = [OUT] * len(order)
        for i, d in enumerate(order):
            if i < k - 1:
                kids[d] = IN
            elif i == k - 1:
                kids[d] = node
        node = mixed(kids)
    trace = PathTrace(t, tuple(ks), tuple(chain), acc, exact)
    return WindowTree(spec, node), trace


def blend(w0: WindowTree, w1: WindowTree, t, depth: int | None = None) -> WindowTree:
    """W(t) = (W1 and A(t)) or (W0 minus int A(t)), evaluated three-valued."""
    if w0.spec != w1.spec:
        raise ValueError("blend endpoints live on different odometers")
    a, _ = path_window(w0.spec, t, depth)
    return select(a, w1, w0)


def properify(w: WindowTree) -> WindowTree:
    """closure(int W) at tree resolution.

    In and out cells are clopen, so the interior is the union of the in
    cells plus whatever the frontier hides, and its closure adds nothing
    a decided cell could see. The tree is returned unchanged.
    """
    return WindowTree(w.spec, w.root)
