"""Exact arithmetic on the integer odometer.

A point is a mixed-radix digit vector (xi_1, ..., xi_N) with xi_n in
{0, ..., m_n - 1}. Integers embed through their residue mod M_N, addition
carries from level n into level n + 1, and the invariant ultrametric puts
dist = 1/M_{n-1} on points whose first differing digit sits at level n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from operator import mul


@dataclass(frozen=True)
class OdometerSpec:
    """Scale sequence m_1, m_2, ... truncated at max_depth levels."""

    scales: tuple[int, ...]
    max_depth: int | None = None
    _index: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        scales = tuple(int(m) for m in self.scales)
        if not scales:
            raise ValueError("at least one scale is required")
        if any(m < 2 for m in scales):
            raise ValueError(f"every scale must be >= 2, got {scales}")
        depth = len(scales) if self.max_depth is None else int(self.max_depth)
        if not 1 <= depth <= len(scales):
            raise ValueError(f"max_depth must lie in [1, {len(scales)}], got {depth}")
        object.__setattr__(self, "scales", scales[:depth])
        object.__setattr__(self, "max_depth", depth)
        object.__setattr__(self, "_index", (1,) + tuple(accumulate(self.scales, mul)))

    def scale(self, n: int) -> int:
        """m_n for 1 <= n <= max_depth."""
        self._check_level(n, lower=1)
        return self.scales[n - 1]

    def index(self, n: int) -> int:
        """M_n = [Z : Gamma_n], with M_0 = 1."""
        self._check_level(n, lower=0)
        return self._index[n]

    def cylinder_measure(self, n: int) -> Fraction:
        return Fraction(1, self.index(n))

    def _check_level(self, n: int, lower: int):
        if not lower <= n <= self.max_depth:
            raise ValueError(f"level {n} outside [{lower}, {self.max_depth}]")

    def digits_of(self, g: int, depth: int | None = None) -> tuple[int, ...]:
        """Mixed-radix digits of g mod M_depth."""
        depth = self.max_depth if depth is None else depth
        self._check_level(depth, lower=0)
        r = g % self._index[depth]
        out = []
        for m in self.scales[:depth]:
            r, d = divmod(r, m)
            out.append(d)
        return tuple(out)

    def residue_of(self, digits) -> int:
        """Base residue sum xi_k M_{k-1} of a digit path."""
        return sum(d * self._index[k] for k, d in enumerate(digits))

    def check_path(self, path) -> tuple[int, ...]:
        path = tuple(int(d) for d in path)
        if len(path) > self.max_depth:
            raise ValueError(f"path {path} deeper than max_depth {self.max_depth}")
        for k, d in enumerate(path):
            if not 0 <= d < self.scales[k]:
                raise ValueError(f"digit {d} at level {k + 1} outside [0, {self.scales[k]})")
        return path

    def to_json(self) -> dict:
        return {"scales": list(self.scales), "max_depth": self.max_depth}

    @classmethod
    def from_json(cls, data) -> OdometerSpec:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["scales"]), data.get("max_depth"))


@dataclass(frozen=True)
class OdometerPoint:
    spec: OdometerSpec
    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", self.spec.check_path(self.digits))

    @property
    def depth(self) -> int:
        return len(self.digits)

    def residue(self) -> int:
        """The integer in [0, M_depth) with the same digits."""
        return self.spec.residue_of(self.digits)

    def truncate(self, depth: int) -> OdometerPoint:
        if depth > self.depth:
            raise ValueError(f"cannot truncate depth {self.depth} point to {depth}")
        return OdometerPoint(self.spec, self.digits[:depth])

    def __add__(self, other: OdometerPoint) -> OdometerPoint:
        return add(self, other)

    def __neg__(self) -> OdometerPoint:
        return negate(self)


def embed(spec: OdometerSpec, g: int, depth: int | None = None) -> OdometerPoint:
    """tau(g) truncated at `depth` levels."""
    return OdometerPoint(spec, spec.digits_of(g, depth))


def identity(spec: OdometerSpec, depth: int | None = None) -> OdometerPoint:
    return embed(spec, 0, depth)


def _same_frame(xi: OdometerPoint, eta: OdometerPoint):
    if xi.spec != eta.spec:
        raise ValueError("points belong to different odometers")
    if xi.depth != eta.depth:
        raise ValueError(f"depth mismatch: {xi.depth} vs {eta.depth}")


def add(xi: OdometerPoint, eta: OdometerPoint) -> OdometerPoint:
    _same_frame(xi, eta)
    out = []
    carry = 0
    for m, a, b in zip(xi.spec.scales, xi.digits, eta.digits):
        carry, d = divmod(a + b + carry, m)
        out.append(d)
    return OdometerPoint(xi.spec, tuple(out))


def negate(xi: OdometerPoint) -> OdometerPoint:
    out = []
    borrow = 0
    for m, a in zip(xi.spec.scales, xi.digits):
        d = -a - borrow
        borrow = 1 if d < 0 else 0
        out.append(d % m)
    return OdometerPoint(xi.spec, tuple(out))


def subtract(xi: OdometerPoint, eta: OdometerPoint) -> OdometerPoint:
    return add(xi, negate(eta))


def first_difference(xi: OdometerPoint, eta: OdometerPoint) -> int | None:
    """Level (1-based) of the first differing digit, None if equal."""
    _same_frame(xi, eta)
    for k, (a, b) in enumerate(zip(xi.digits, eta.digits), start=1):
        if a != b:
            return k
    return None


def dist(xi: OdometerPoint, eta: OdometerPoint) -> Fraction:
    n = first_difference(xi, eta)
    if n is None:
        return Fraction(0)
    return Fraction(1, xi.spec.index(n - 1))


def ball_level(spec: OdometerSpec, eps) -> int:
    """Minimal n with 1/M_n < eps; the open eps-ball is a level-n cylinder."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"radius must lie in (0, 1], got {eps}")
    for n in range(1, spec.max_depth + 1):
        if Fraction(1, spec.index(n)) < eps:
            return n
    raise ValueError(f"radius {eps} finer than the deepest level {spec.max_depth}")


def ball_to_cylinder(xi: OdometerPoint, eps) -> tuple[int, tuple[int, ...]]:
    n = ball_level(xi.spec, eps)
    if n > xi.depth:
        raise ValueError(f"point of depth {xi.depth} cannot resolve a level-{n} ball")
    return n, xi.digits[:n]
