"""Windows W_t whose d_W is Lipschitz-equivalent to a level metric d_t.

Scales are (s*p, p, p, ...). At every level the digits split into
B = {0}, C (the cylinders that keep the chain undecided) and A (the rest).
Cells reached through C-digits only and then an A-digit are in, those
ending in the digit 0 are out, and the all-C chain Z_n is left open.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log

from ..odometer import OdometerPoint, OdometerSpec, first_difference
from ..window import FRONTIER, IN, OUT, MeasureInterval, WindowTree, mixed


def in_density_set(t: Fraction, k: int) -> bool:
    """k is in N(t) iff floor(k t) > floor((k - 1) t); the set has density exactly t."""
    return (k * t).__floor__() > ((k - 1) * t).__floor__()


@dataclass(frozen=True)
class AcParams:
    p: int
    s: int
    t: Fraction
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.p < 3:
            raise ValueError(f"p must be >= 3, got {self.p}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if not 0 <= self.t <= 1:
            raise ValueError(f"t must lie in [0, 1], got {self.t}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    @property
    def spec(self) -> OdometerSpec:
        return OdometerSpec((self.s * self.p,) + (self.p,) * (self.depth - 1))

    def in_N(self, k: int) -> bool:
        return in_density_set(self.t, k)

    def c_count(self, n: int) -> int:
        """#C_n: p - 2 (times s at level 1) on N(t), otherwise 1 (times s)."""
        base = self.p - 2 if self.in_N(n) else 1
        return base * self.s if n == 1 else base

    def n_count(self, n: int) -> int:
        """c_n = #{k <= n : k in N(t)}."""
        return sum(self.in_N(k) for k in range(1, n + 1))

    def epsilon(self, n: int) -> Fraction:
        """eps(t, n) = p^-(n - c_n) * ((p - 2)/p)^(c_n); eps(t, 0) = 1."""
        c = self.n_count(n)
        return Fraction(1, self.p) ** (n - c) * Fraction(self.p - 2, self.p) ** c

    def digit_roles(self, n: int) -> tuple[range, range]:
        """(C_n, A_n) as digit ranges; B_n is the digit 0.

        C takes the low nonzero digits so that the top-digit point tau(-1)
        falls into A at level 1 and stays off the undecided chain.
        """
        m = self.s * self.p if n == 1 else self.p
        c = self.c_count(n)
        return range(1, 1 + c), range(1 + c, m)


@dataclass(frozen=True)
class AcWindow:
    params: AcParams
    tree: WindowTree

    def chain_mass(self, n: int) -> Fraction:
        """nu(Z_n) = prod_{k<=n} #C_k / m_k, which equals eps(t, n)."""
        spec = self.tree.spec
        out = Fraction(1)
        for k in range(1, n + 1):
            out *= Fraction(self.params.c_count(k), spec.scale(k))
        return out

    def d_t(self, xi: OdometerPoint, eta: OdometerPoint) -> Fraction:
        """eps(t, n) for the deepest level n at which xi and eta share a cylinder."""
        n = first_difference(xi, eta)
        return Fraction(0) if n is None else self.params.epsilon(n - 1)

    def d_t_coset(self, level: int, residue: int) -> MeasureInterval:
        """Range of d_t(xi, 0) over the level-`level` coset of `residue`."""
        digits = self.tree.spec.digits_of(residue, level)
        for k, d in enumerate(digits, start=1):
            if d:
                e = self.params.epsilon(k - 1)
                return MeasureInterval(e, e)
        return MeasureInterval(Fraction(0), self.params.epsilon(level))


def ac_window(params: AcParams) -> AcWindow:
    spec = params.spec
    depth = params.depth

    def chain(n):
        # children of the Z_{n} cylinder live at level n + 1
        if n == depth:
            return FRONTIER
        c_digits, a_digits = params.digit_roles(n + 1)
        inner = chain(n + 1)
        kids = [OUT] + [inner] * len(c_digits) + [IN] * len(a_digits)
        return mixed(kids)

    return AcWindow(params, WindowTree(spec, chain(0)))


def ac_ratio(params: AcParams, n: int) -> float:
    """(n log p + log s) / (n log p - c_n log(p - 2)), the finite-n box-dimension ratio."""
    p, s = params.p, params.s
    num = n * log(p) + log(s)
    den = n * log(p) - params.n_count(n) * log(p - 2)
    return num / den
