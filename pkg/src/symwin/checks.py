"""Invariant suites run by `symwin verify`. Each returns a list of (name, passed, detail)."""

from __future__ import annotations

import random
from fractions import Fraction

from .constructions.acwindow import AcParams, ac_window
from .constructions.counterexample import counterexample_window
from .constructions.entropy import entropy_window
from .constructions.paths import blend, path_window, properify
from .metrics import d_W_coset_bounds
from .modelset import generate_array, period_report, reconstruct_window
from .odometer import OdometerSpec, add, dist, embed
from .window import (
    OUT,
    WindowTree,
    cellwise_subset,
    complement,
    d_W_dist,
    from_cylinders,
    measure,
    pseudo_Dbar,
)


def random_scales(rng: random.Random, depth: int, top: int = 5) -> tuple[int, ...]:
    return tuple(rng.randint(2, top) for _ in range(depth))


def random_window(rng: random.Random, spec: OdometerSpec, fill=0.5) -> WindowTree:
    """Fully decided window from a random labelling of the deepest cylinders."""
    depth = spec.max_depth
    cells = [(spec.digits_of(r, depth), "in" if rng.random() < fill else "out")
             for r in range(spec.index(depth))]
    return from_cylinders(spec, cells, default=OUT)


def odometer_suite(seed: int = 0, specs: int = 5):
    rng = random.Random(seed)
    out = []
    for _ in range(specs):
        spec = OdometerSpec(random_scales(rng, rng.randint(1, 3)))
        M = spec.index(spec.max_depth)
        pts = [embed(spec, g) for g in range(M)]
        hom = all(add(pts[g], pts[h]) == pts[(g + h) % M] for g in range(M) for h in range(M))
        samples = [(rng.randrange(M), rng.randrange(M), rng.randrange(M)) for _ in range(200)]
        ultra = all(dist(pts[a], pts[c]) <= max(dist(pts[a], pts[b]), dist(pts[b], pts[c]))
                    for a, b, c in samples)
        inv = all(dist(add(pts[a], pts[c]), add(pts[b], pts[c])) == dist(pts[a], pts[b])
                  for a, b, c in samples)
        out.append((f"odometer{spec.scales}", hom and ultra and inv,
                    {"homomorphism": hom, "ultrametric": ultra, "invariance": inv}))
    return out


def window_suite(seed: int = 0, windows: int = 100):
    rng = random.Random(seed)
    bad_cons = bad_round = 0
    for _ in range(windows):
        spec = OdometerSpec(random_scales(rng, rng.randint(1, 3), top=4))
        w = random_window(rng, spec, rng.random())
        if measure(w).lo + measure(complement(w)).lo != 1:
            bad_cons += 1
        x = generate_array(w, 0, spec.index(spec.max_depth))
        if reconstruct_window(x, spec.max_depth) != w:
            bad_round += 1
    return [("window.conservation", bad_cons == 0, {"violations": bad_cons}),
            ("window.round_trip", bad_round == 0, {"violations": bad_round})]


def counterexample_suite():
    w = counterexample_window(3)
    dens = tuple(period_report(w, n).density for n in (1, 2, 3))
    w4 = counterexample_window(4)
    bounds = d_W_coset_bounds(w4)
    inclusion = True
    for n in (1, 2):
        eps = w4.spec.cylinder_measure(n) / 2
        M = w4.spec.index(n + 1)
        inclusion &= all(bounds(n + 1, r).lo >= eps for r in range(1, M))
    return [("counterexample.densities", dens == (0, Fraction(2, 3), Fraction(11, 12)),
             {"densities": dens}),
            ("counterexample.ball_inclusion", inclusion, {})]


def acwindow_suite(p=5, s=2, t=Fraction(1, 2), depth=8, max_level=6):
    a = ac_window(AcParams(p, s, t, depth))
    w = a.tree
    slack = a.chain_mass(depth)
    zero = embed(w.spec, 0)
    violations = 0
    for n in range(1, max_level + 1):
        for r in range(1, w.spec.index(n)):
            xi = embed(w.spec, r)
            d, dt = d_W_dist(w, xi, zero), a.d_t(xi, zero)
            if d.hi < dt / (s * p * p) - slack or d.lo > p * dt + slack:
                violations += 1
    return [("acwindow.lipschitz_sandwich", violations == 0, {"violations": violations})]


def path_suite(scales=(3, 4, 8)):
    spec = OdometerSpec(scales)
    M = spec.index(spec.max_depth)
    grid = [Fraction(i, 2 * M) for i in range(2 * M + 1)]
    ws = [path_window(spec, t)[0] for t in grid]
    ends = measure(ws[0]).hi == 0 and measure(ws[-1]).lo == 1
    mass_ok = all(t - Fraction(1, M) <= measure(w).lo <= t for t, w in zip(grid, ws))
    cap = Fraction(1, spec.scale(1))
    modulus_ok = all(pseudo_Dbar(ws[i], ws[j]).hi <= cap
                     for i in range(len(grid)) for j in range(i, len(grid))
                     if abs(grid[i] - grid[j]) < Fraction(1, M))
    return [("path.endpoints", ends, {}), ("path.mass", mass_ok, {}),
            ("path.modulus", modulus_ok, {})]


def entropy_suite(gamma=Fraction(1, 2)):
    res = entropy_window(gamma, 2)
    out = []
    for st in res.stages:
        out.append((f"entropy.stage{st.n}", all(st.invariants.values()), st.invariants))
    nested = True
    same = True
    for t in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
        b = blend(res.w_zero, res.w_gamma, t)
        nested &= cellwise_subset(res.w_zero, b) and cellwise_subset(b, res.w_gamma)
        M = res.spec.index(res.w_gamma.spec.max_depth)
        same &= generate_array(properify(b), 0, M) == generate_array(b, 0, M)
    out.append(("entropy.blend_containment", nested, {}))
    out.append(("entropy.properify_array", same, {}))
    return out


SUITES = {
    "odometer": odometer_suite,
    "window": window_suite,
    "counterexample": counterexample_suite,
    "acwindow": acwindow_suite,
    "path": path_suite,
    "entropy": entropy_suite,
}
