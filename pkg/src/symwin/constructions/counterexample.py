"""Regular window with infinite amorphic complexity.

Scales q_1 = 3, q_{n+1} = 2^(q_n - 1). Inside the cylinder
[q_1-1, ..., q_{n-1}-1, l] (l < q_n - 1) the next digit decides membership:
xi_{n+1} mod 2^(l+1) < 2^l means in, otherwise out. The only undecided point
is tau(-1) = (q_n - 1)_n.
"""

from __future__ import annotations

from fractions import Fraction

from ..odometer import OdometerPoint, OdometerSpec
from ..window import FRONTIER, IN, OUT, WindowTree, mixed, translate

MAX_DEPTH = 4


def q_sequence(n: int) -> list[int]:
    """q_1..q_n as exact integers (q_5 = 2^127 is still fine, q_6 is not)."""
    if n > 5:
        raise ValueError("q_6 has 2^127 binary digits and cannot be materialized")
    qs = [3]
    while len(qs) < n:
        qs.append(2 ** (qs[-1] - 1))
    return qs[:n]


def selector(l: int, q_next: int) -> list[int]:
    """M_n^{(l)}: next-level digits whose residue mod 2^(l+1) is below 2^l."""
    return [x for x in range(q_next) if x % (2 ** (l + 1)) < 2 ** l]


def counterexample_window(depth: int) -> WindowTree:
    """Stages U_1..U_{depth-1} decided; the chain cell Z_{depth-1} left FRONTIER."""
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
    qs = q_sequence(depth)
    spec = OdometerSpec(tuple(qs))

    def chain(n):
        # node for Z_{n-1} = [q_1-1, ..., q_{n-1}-1] at level n-1
        if n >= depth:
            return FRONTIER
        q, q_next = qs[n - 1], qs[n]
        kids = []
        for l in range(q - 1):
            chosen = set(selector(l, q_next))
            kids.append(mixed(IN if x in chosen else OUT for x in range(q_next)))
        kids.append(chain(n + 1))
        return mixed(kids)

    return WindowTree(spec, chain(1))


def stage_cells(n: int, l: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Cells of U_n^{(l)} and V_n^{(l)} as level-(n+1) paths."""
    qs = q_sequence(n + 1)
    prefix = tuple(q - 1 for q in qs[: n - 1]) + (l,)
    chosen = set(selector(l, qs[n]))
    u = [prefix + (x,) for x in range(qs[n]) if x in chosen]
    v = [prefix + (x,) for x in range(qs[n]) if x not in chosen]
    return u, v


def _digit(g: int, n: int, qs: list[int], index: list[int]) -> int:
    """Digit n (1-based) of tau(g), computing q_n only when it matters."""
    if g >= 0:
        quotient = g // index[n - 1]
        return 0 if quotient == 0 else quotient % qs[n - 1]
    h = -g - 1
    return qs[n - 1] - 1 - (h // index[n - 1]) % qs[n - 1]


def member(g: int) -> int | None:
    """Exact x_W(g) for the infinite window and |g| < M_5; None only at g = -1."""
    if g == -1:
        return None
    qs = q_sequence(5)
    index = [1]
    for q in qs:
        index.append(index[-1] * q)
    for n in range(1, 5):
        d = _digit(g, n, qs, index)
        if d == qs[n - 1] - 1:
            continue
        nxt = _digit(g, n + 1, qs, index)
        return 1 if nxt % (2 ** (d + 1)) < 2 ** d else 0
    # first four digits are top; digit 5 is below q_5 - 1 because g != -1
    if abs(g) >= index[5]:
        raise ValueError(f"|g| = {abs(g)} needs digits beyond level 5")
    # digit 6 is 0 for g >= 0 and q_6 - 1 = 2^(q_5 - 1) - 1 for g < 0; the
    # latter is all ones modulo 2^(d+1), so it never falls below 2^d
    return 1 if g >= 0 else 0


def shifted_generic(w: WindowTree, zeta: OdometerPoint) -> WindowTree:
    """W' = zeta + W; moves the boundary chain off tau(Z) when zeta is not an integer."""
    return translate(w, zeta)


def divergence_terms(n_max: int = 5):
    """a_n = (q_n - 1) / (sum_{j<=n} log2 q_j + 1) as exact rational enclosures.

    log2 q_j is an integer for j >= 2; log2 3 is enclosed by
    Fraction bounds checked exactly against powers of 2 and 3.
    """
    lo3, hi3 = log2_3_bounds()
    qs = q_sequence(n_max)
    terms = []
    for n in range(1, n_max + 1):
        exact = sum(Fraction(q.bit_length() - 1) for q in qs[1:n])
        num = Fraction(qs[n - 1] - 1)
        terms.append((num / (exact + hi3 + 1), num / (exact + lo3 + 1)))
    return terms


def log2_3_bounds(denominator: int = 10 ** 5) -> tuple[Fraction, Fraction]:
    """Rational lo < log2(3) < hi with hi - lo = 1/denominator.

    floor(q log2 3) is the bit length of 3^q minus one, so the enclosure is exact.
    """
    k = (3 ** denominator).bit_length() - 1
    return Fraction(k, denominator), Fraction(k + 1, denominator)
