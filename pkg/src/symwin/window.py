"""Windows in the odometer as finite-depth labeled cylinder tries.

A node is either a leaf status (IN, OUT, FRONTIER) or a MIXED node with one
child per digit of the next level. MIXED nodes are hash-consed, so equal
subtrees are the same object; this keeps self-similar constructions small and
lets recursive set operations memoize on identity.

FRONTIER marks a cylinder whose membership is undecided at the truncation
depth. Every measure query returns an exact rational interval in which
FRONTIER cells count for [0, nu(cell)]. Set operations use Kleene's
three-valued logic.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .odometer import OdometerPoint, OdometerSpec, embed, subtract

ZERO = Fraction(0)
ONE = Fraction(1)


class Status(Enum):
    IN = "in"
    OUT = "out"
    FRONTIER = "frontier"


IN, OUT, FRONTIER = Status.IN, Status.OUT, Status.FRONTIER
_CODE = {IN: 1, OUT: 0, FRONTIER: -1}
UNDECIDED = -1


class Mixed:
    """Interned inner node; build through `mixed`, never directly."""

    __slots__ = ("children", "in_mass", "frontier_mass", "height")

    def __init__(self, children):
        self.children = children
        m = len(children)
        self.in_mass = sum((in_mass(c) for c in children), ZERO) / m
        self.frontier_mass = sum((frontier_mass(c) for c in children), ZERO) / m
        self.height = 1 + max(height(c) for c in children)

    def __repr__(self):
        return f"Mixed(arity={len(self.children)}, height={self.height})"


_INTERN: dict[tuple[int, ...], Mixed] = {}
_INTERN_LOCK = threading.Lock()


def mixed(children) -> Status | Mixed:
    """Normalized node over `children`; uniform leaves collapse to the leaf."""
    children = tuple(children)
    if len(children) < 2:
        raise ValueError("a MIXED node needs at least two children")
    first = children[0]
    if isinstance(first, Status) and all(c is first for c in children):
        return first
    key = tuple(id(c) for c in children)
    node = _INTERN.get(key)
    if node is None:
        with _INTERN_LOCK:
            node = _INTERN.get(key)
            if node is None:
                node = Mixed(children)
                _INTERN[key] = node
    return node


def in_mass(node) -> Fraction:
    if isinstance(node, Status):
        return ONE if node is IN else ZERO
    return node.in_mass


def frontier_mass(node) -> Fraction:
    if isinstance(node, Status):
        return ONE if node is FRONTIER else ZERO
    return node.frontier_mass


def out_mass(node) -> Fraction:
    return ONE - in_mass(node) - frontier_mass(node)


def height(node) -> int:
    return 0 if isinstance(node, Status) else node.height


def child(node, j: int):
    return node if isinstance(node, Status) else node.children[j]


@dataclass(frozen=True)
class MeasureInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"invalid measure interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


class WindowTree:
    """A window W in the odometer `spec`, rooted at the whole space."""

    __slots__ = ("spec", "root")

    def __init__(self, spec: OdometerSpec, root):
        _validate(root, spec)
        self.spec = spec
        self.root = root

    @property
    def depth(self) -> int:
        return height(self.root)

    def measure(self) -> MeasureInterval:
        return measure(self)

    def __eq__(self, other):
        return isinstance(other, WindowTree) and self.spec == other.spec and self.root is other.root

    def __hash__(self):
        return hash((self.spec, id(self.root)))

    def __repr__(self):
        return f"WindowTree(scales={self.spec.scales}, depth={self.depth}, measure={self.measure()})"


def _validate(root, spec: OdometerSpec):
    seen = set()

    def walk(node, k):
        if isinstance(node, Status) or (id(node), k) in seen:
            return
        if not isinstance(node, Mixed):
            raise TypeError(f"not a window node: {node!r}")
        if k >= spec.max_depth:
            raise ValueError(f"tree deeper than max_depth {spec.max_depth}")
        if len(node.children) != spec.scales[k]:
            raise ValueError(
                f"node at level {k} has {len(node.children)} children, expected {spec.scales[k]}"
            )
        seen.add((id(node), k))
        for c in node.children:
            walk(c, k + 1)

    walk(root, 0)


# construction -------------------------------------------------------------

def _status(label) -> Status:
    if isinstance(label, Status):
        return label
    return Status(str(label).lower())


def from_cylinders(spec: OdometerSpec, cells, default=OUT, strict: bool = False) -> WindowTree:
    """Window from (path, label) pairs; uncovered space gets `default`.

    Nested cells must agree on their label. With strict=True nested cells are
    rejected outright, as the window file loader requires.
    """
    default = _status(default)
    items = []
    for path, label in cells:
        items.append((spec.check_path(path), _status(label)))

    def build(group, k):
        if not group:
            return default
        here = [lab for path, lab in group if len(path) == k]
        if here:
            labels = {lab for _, lab in group}
            if strict and len(group) > 1:
                raise ValueError(f"overlapping cells at {group[0][0][:k]}")
            if len(labels) > 1:
                raise ValueError(f"contradictory labels on nested cells below {group[0][0][:k]}")
            return here[0]
        buckets = [[] for _ in range(spec.scales[k])]
        for path, lab in group:
            buckets[path[k]].append((path, lab))
        return mixed(build(b, k + 1) for b in buckets)

    return WindowTree(spec, build(items, 0))


def constant(spec: OdometerSpec, label=IN) -> WindowTree:
    return WindowTree(spec, _status(label))


def leaves(w: WindowTree):
    """Yield (path, status) for every leaf of the expanded tree."""

    def walk(node, path):
        if isinstance(node, Status):
            yield path, node
            return
        for j, c in enumerate(node.children):
            yield from walk(c, path + (j,))

    yield from walk(w.root, ())


def point_status(w: WindowTree, digits) -> Status:
    """Status of the cylinder containing a point given by enough digits."""
    node = w.root
    for k, d in enumerate(digits):
        if isinstance(node, Status):
            return node
        node = node.children[d]
    if isinstance(node, Status):
        return node
    raise ValueError(f"point of depth {len(digits)} does not reach a leaf")


def integer_status(w: WindowTree, g: int) -> Status:
    return point_status(w, w.spec.digits_of(g, w.depth))


# set algebra --------------------------------------------------------------

def _same_spec(a: WindowTree, b: WindowTree):
    if a.spec != b.spec:
        raise ValueError("windows live on different odometers")


def _union_leaf(a, b):
    if a is IN or b is IN:
        return IN
    if a is OUT:
        return b
    if b is OUT:
        return a
    return FRONTIER


def _intersect_leaf(a, b):
    if a is OUT or b is OUT:
        return OUT
    if a is IN:
        return b
    if b is IN:
        return a
    return FRONTIER


def _xor_leaf(a, b):
    if a is FRONTIER or b is FRONTIER:
        return FRONTIER
    return IN if a is not b else OUT


def _complement_node(node, memo):
    if isinstance(node, Status):
        return {IN: OUT, OUT: IN, FRONTIER: FRONTIER}[node]
    key = id(node)
    if key not in memo:
        memo[key] = mixed(_complement_node(c, memo) for c in node.children)
    return memo[key]


def _combine(a, b, op, memo):
    a_leaf, b_leaf = isinstance(a, Status), isinstance(b, Status)
    if op == "union":
        if a is IN or b is IN:
            return IN
        if a is OUT:
            return b
        if b is OUT:
            return a
        if a_leaf and b_leaf:
            return _union_leaf(a, b)
    elif op == "intersect":
        if a is OUT or b is OUT:
            return OUT
        if a is IN:
            return b
        if b is IN:
            return a
        if a_leaf and b_leaf:
            return _intersect_leaf(a, b)
    else:
        if a is FRONTIER or b is FRONTIER:
            return FRONTIER
        if a is OUT:
            return b
        if b is OUT:
            return a
        if a is IN:
            return _complement_node(b, memo.setdefault("not", {}))
        if b is IN:
            return _complement_node(a, memo.setdefault("not", {}))
    key = (id(a), id(b))
    if key in memo:
        return memo[key]
    m = len(b.children) if a_leaf else len(a.children)
    out = mixed(_combine(child(a, j), child(b, j), op, memo) for j in range(m))
    memo[key] = out
    return out


def union(a: WindowTree, b: WindowTree) -> WindowTree:
    _same_spec(a, b)
    return WindowTree(a.spec, _combine(a.root, b.root, "union", {}))


def intersect(a: WindowTree, b: WindowTree) -> WindowTree:
    _same_spec(a, b)
    return WindowTree(a.spec, _combine(a.root, b.root, "intersect", {}))


def symm_diff(a: WindowTree, b: WindowTree) -> WindowTree:
    _same_spec(a, b)
    return WindowTree(a.spec, _combine(a.root, b.root, "xor", {}))


def complement(a: WindowTree) -> WindowTree:
    return WindowTree(a.spec, _complement_node(a.root, {}))


def difference(a: WindowTree, b: WindowTree) -> WindowTree:
    return intersect(a, complement(b))


def select(cond: WindowTree, then: WindowTree, other: WindowTree) -> WindowTree:
    """Pointwise `then if cond else other`.

    Where cond is undecided the result keeps the common value of the two
    branches and is FRONTIER only where they disagree or are undecided.
    """
    _same_spec(cond, then)
    _same_spec(cond, other)
    memo = {}

    def go(c, a, b):
        if c is IN:
            return a
        if c is OUT:
            return b
        if a is b:
            return a
        if c is FRONTIER and isinstance(a, Status) and isinstance(b, Status):
            return FRONTIER
        key = (id(c), id(a), id(b))
        if key not in memo:
            m = next(len(n.children) for n in (c, a, b) if isinstance(n, Mixed))
            memo[key] = mixed(go(child(c, j), child(a, j), child(b, j)) for j in range(m))
        return memo[key]

    return WindowTree(cond.spec, go(cond.root, then.root, other.root))


def truncate(w: WindowTree, level: int) -> WindowTree:
    """Coarsen to `level`: MIXED nodes at that level become FRONTIER."""
    memo = {}

    def go(node, k):
        if isinstance(node, Status):
            return node
        if k >= level:
            return FRONTIER
        key = (id(node), k)
        if key not in memo:
            memo[key] = mixed(go(c, k + 1) for c in node.children)
        return memo[key]

    return WindowTree(w.spec, go(w.root, 0))


def map_frontier(w: WindowTree, label) -> WindowTree:
    """Replace every FRONTIER leaf by `label` (used to bracket a window)."""
    label = _status(label)
    memo = {}

    def go(node):
        if isinstance(node, Status):
            return label if node is FRONTIER else node
        if id(node) not in memo:
            memo[id(node)] = mixed(go(c) for c in node.children)
        return memo[id(node)]

    return WindowTree(w.spec, go(w.root))


def refine_frontier(w: WindowTree, extension) -> WindowTree:
    """Replace each FRONTIER leaf at `path` by the node `extension(path)`."""

    def go(node, path):
        if node is FRONTIER:
            return extension(path)
        if isinstance(node, Status):
            return node
        return mixed(go(c, path + (j,)) for j, c in enumerate(node.children))

    return WindowTree(w.spec, go(w.root, ()))


def cellwise_subset(a: WindowTree, b: WindowTree) -> bool:
    """Certified inclusion: IN in `a` forces IN in `b`, OUT in `b` forces OUT in `a`."""
    _same_spec(a, b)
    memo = {}

    def go(x, y):
        if isinstance(x, Status) and isinstance(y, Status):
            if x is IN and y is not IN:
                return False
            if y is OUT and x is not OUT:
                return False
            return True
        key = (id(x), id(y))
        if key not in memo:
            m = len(x.children) if isinstance(x, Mixed) else len(y.children)
            memo[key] = all(go(child(x, j), child(y, j)) for j in range(m))
        return memo[key]

    return go(a.root, b.root)


# measures -----------------------------------------------------------------

def measure(w: WindowTree) -> MeasureInterval:
    lo = in_mass(w.root)
    return MeasureInterval(lo, lo + frontier_mass(w.root))


def boundary_mass(w: WindowTree) -> MeasureInterval:
    return MeasureInterval(ZERO, frontier_mass(w.root))


def decided_mass(w: WindowTree, level: int) -> Fraction:
    """Mass of level-`level` cylinders that are entirely IN or entirely OUT."""
    memo = {}

    def go(node, k):
        if isinstance(node, Status):
            return ZERO if node is FRONTIER else ONE
        if k >= level:
            return ZERO
        key = (id(node), k)
        if key not in memo:
            memo[key] = sum((go(c, k + 1) for c in node.children), ZERO) / len(node.children)
        return memo[key]

    return go(w.root, 0)


def pseudo_D(a: WindowTree, b: WindowTree) -> MeasureInterval:
    """D(A, B) = nu(A symmetric-difference B)."""
    return measure(symm_diff(a, b))


def pseudo_Dbar(a: WindowTree, b: WindowTree) -> MeasureInterval:
    """D-bar(A, B) = nu(closure(A symmetric-difference B)).

    Decided cells are clopen, so the closure of the decided part adds nothing;
    new boundary points can only sit in FRONTIER cells of the difference, and
    each of those is counted in full for the upper bound.
    """
    diff = symm_diff(a, b)
    touched = map_frontier(diff, IN)
    return MeasureInterval(in_mass(diff.root), in_mass(touched.root))


def translate(w: WindowTree, xi: OdometerPoint) -> WindowTree:
    """The translate W + xi."""
    if xi.spec != w.spec:
        raise ValueError("translation point from a different odometer")
    depth = w.depth
    if xi.depth < depth:
        raise ValueError(f"translation needs a point of depth >= {depth}, got {xi.depth}")
    digits = xi.digits
    zero_tail = [all(d == 0 for d in digits[k:depth]) for k in range(depth + 1)]
    memo = {}

    def go(node, k, borrow):
        if isinstance(node, Status) or (borrow == 0 and zero_tail[k]):
            return node
        key = (id(node), k, borrow)
        if key not in memo:
            m = len(node.children)
            z = digits[k]
            out = []
            for j in range(m):
                s = j - z - borrow
                out.append(go(node.children[s % m], k + 1, 1 if s < 0 else 0))
            memo[key] = mixed(out)
        return memo[key]

    return WindowTree(w.spec, go(w.root, 0, 0))


def _shift_xor_mass(w: WindowTree, shift_digits) -> tuple[Fraction, Fraction]:
    """Interval for nu{theta : W(theta + shift) xor W(theta)}."""
    depth = w.depth
    digits = tuple(shift_digits) + (0,) * max(0, depth - len(shift_digits))
    zero_tail = [all(d == 0 for d in digits[k:depth]) for k in range(depth + 1)]
    memo = {}

    def go(a, b, k, carry):
        a_leaf, b_leaf = isinstance(a, Status), isinstance(b, Status)
        if a_leaf or b_leaf:
            if a is FRONTIER or b is FRONTIER:
                return ZERO, ONE
            if a_leaf and b_leaf:
                return (ONE, ONE) if a is not b else (ZERO, ZERO)
            leaf, node = (a, b) if a_leaf else (b, a)
            fr = node.frontier_mass
            lo = (ONE - node.in_mass - fr) if leaf is IN else node.in_mass
            return lo, lo + fr
        if a is b and carry == 0 and zero_tail[k]:
            return ZERO, a.frontier_mass
        key = (id(a), id(b), k, carry)
        if key in memo:
            return memo[key]
        m = len(a.children)
        z = digits[k]
        lo = hi = ZERO
        for j in range(m):
            s = j + z + carry
            l, h = go(a.children[s % m], b.children[j], k + 1, 1 if s >= m else 0)
            lo += l
            hi += h
        memo[key] = (lo / m, hi / m)
        return memo[key]

    return go(w.root, w.root, 0, 0)


def d_W_dist(w: WindowTree, xi: OdometerPoint, eta: OdometerPoint) -> MeasureInterval:
    """d_W(xi, eta) = nu((W - xi) symmetric-difference (W - eta)).

    Evaluated as nu((W - zeta) symmetric-difference W) with zeta = xi - eta,
    which is the same interval by translation invariance of the Haar measure.
    """
    if xi.spec != w.spec or eta.spec != w.spec:
        raise ValueError("points from a different odometer")
    if min(xi.depth, eta.depth) < w.depth:
        raise ValueError(f"points must have depth >= {w.depth}")
    zeta = subtract(xi, eta)
    return MeasureInterval(*_shift_xor_mass(w, zeta.digits[: w.depth]))


def d_W_dist_direct(w: WindowTree, xi: OdometerPoint, eta: OdometerPoint) -> MeasureInterval:
    """d_W by its definition: translate twice, then measure the difference."""
    return pseudo_D(translate(w, -xi), translate(w, -eta))


def coset_distance(w: WindowTree, level: int, residue: int, _cache=None) -> MeasureInterval:
    """Bounds on d_W(xi, 0) valid for every xi in the level-`level` coset of `residue`.

    Translating by any point of the coset moves level-`level` cylinders the
    same way, so evaluating on the tree coarsened to that level is sound.
    """
    coarse = truncate(w, level) if _cache is None else _cache(level)
    digits = w.spec.digits_of(residue, level)
    return MeasureInterval(*_shift_xor_mass(coarse, digits))


# property checks ----------------------------------------------------------

@dataclass(frozen=True)
class PropertyReport:
    proper: bool
    generic_on_range: bool
    frontier_hits: tuple[int, ...]
    regular_certificate: Fraction
    irredundant_certificate: str
    certified_depth: int


def irredundancy_certificate(w: WindowTree, depth: int | None = None) -> str:
    """'yes' if d_W(xi, 0) > 0 on every coset outside [0]_depth, else 'inconclusive'.

    `depth` defaults to the odometer's max_depth, which is the finest
    resolution a finite tree can speak for.
    """
    depth = w.spec.max_depth if depth is None else depth
    if depth == 0:
        return "inconclusive"
    spec = w.spec
    cache = {}

    def coarse(level):
        if level not in cache:
            cache[level] = truncate(w, level)
        return cache[level]

    stack = [(1, r) for r in range(spec.scales[0])]
    while stack:
        level, r = stack.pop()
        if r % spec.index(level) == 0:
            if level < depth:
                stack.extend((level + 1, j * spec.index(level)) for j in range(spec.scales[level]))
            continue
        if coset_distance(w, level, r, coarse).lo > 0:
            continue
        if level == depth:
            return "inconclusive"
        stack.extend((level + 1, r + j * spec.index(level)) for j in range(spec.scales[level]))
    return "yes"


def check_properties(w: WindowTree, g_range: tuple[int, int]) -> PropertyReport:
    g_lo, g_hi = g_range
    if g_hi < g_lo:
        raise ValueError("empty range")
    table = residue_table(w)
    mod = len(table)
    gs = np.arange(g_lo, g_hi, dtype=np.int64)
    hits = gs[table[gs % mod] == UNDECIDED]
    return PropertyReport(
        proper=True,
        generic_on_range=hits.size == 0,
        frontier_hits=tuple(int(g) for g in hits),
        regular_certificate=boundary_mass(w).hi,
        irredundant_certificate=irredundancy_certificate(w),
        certified_depth=w.spec.max_depth,
    )


# residue tables -----------------------------------------------------------

def residue_table(w: WindowTree, level: int | None = None) -> np.ndarray:
    """Codes (1 in, 0 out, -1 undecided) of every level-`level` cylinder, by base residue.

    A cylinder that is still MIXED at `level` is undecided at that resolution.
    """
    spec = w.spec
    level = w.depth if level is None else level
    if not 0 <= level <= spec.max_depth:
        raise ValueError(f"level {level} outside [0, {spec.max_depth}]")
    total = spec.index(level)
    memo = {}

    def fill(node, k):
        size = total // spec.index(k)
        if isinstance(node, Status):
            return np.full(size, _CODE[node], dtype=np.int8)
        if k >= level:
            return np.full(size, UNDECIDED, dtype=np.int8)
        key = (id(node), k)
        if key not in memo:
            arr = np.empty(size, dtype=np.int8)
            m = spec.scales[k]
            for j, c in enumerate(node.children):
                arr[j::m] = fill(c, k + 1)
            memo[key] = arr
        return memo[key]

    return fill(w.root, 0)


def tree_from_table(spec: OdometerSpec, table, level: int) -> WindowTree:
    """Inverse of `residue_table`: one code per level-`level` residue."""
    table = np.asarray(table)
    if len(table) != spec.index(level):
        raise ValueError(f"table of length {len(table)} does not match M_{level} = {spec.index(level)}")
    leaf = {1: IN, 0: OUT, -1: FRONTIER}

    def build(arr, k):
        first = int(arr[0])
        if (arr == first).all():
            return leaf[first]
        m = spec.scales[k]
        return mixed(build(arr[j::m], k + 1) for j in range(m))

    return WindowTree(spec, build(table, 0))


# serialization ------------------------------------------------------------

def to_json(w: WindowTree) -> dict:
    nodes = [
        {"path": list(path), "status": status.value}
        for path, status in leaves(w)
        if status is not OUT
    ]
    return {"version": 1, "scales": list(w.spec.scales), "nodes": nodes}


def from_json(data) -> WindowTree:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("version") != 1:
        raise ValueError(f"unsupported window file version {data.get('version')!r}")
    spec = OdometerSpec(tuple(data["scales"]))
    cells = [(node["path"], node["status"]) for node in data["nodes"]]
    return from_cylinders(spec, cells, default=OUT, strict=True)


def origin(spec: OdometerSpec, depth: int | None = None) -> OdometerPoint:
    return embed(spec, 0, depth)
