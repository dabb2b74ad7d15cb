from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symwin.odometer import (
    OdometerPoint,
    OdometerSpec,
    add,
    ball_level,
    ball_to_cylinder,
    dist,
    embed,
    first_difference,
    identity,
    negate,
    subtract,
)

S348 = OdometerSpec((3, 4, 8))
S34 = OdometerSpec((3, 4))

scales_st = st.lists(st.integers(2, 5), min_size=1, max_size=4).map(tuple)


def test_embed_examples():
    assert embed(S348, 1).digits == (1, 0, 0)
    assert embed(S348, 0).digits == (0, 0, 0)
    assert embed(S348, -1).digits == (2, 3, 7)


def test_add_examples():
    assert add(OdometerPoint(S34, (2, 0)), OdometerPoint(S34, (1, 0))).digits == (0, 1)
    assert add(identity(S34), identity(S34)).digits == (0, 0)
    assert add(OdometerPoint(S34, (2, 3)), OdometerPoint(S34, (1, 0))).digits == (0, 0)


def test_dist_examples():
    assert dist(embed(S34, 0), embed(S34, 3)) == Fraction(1, 3)
    assert dist(embed(S34, 5), embed(S34, 5)) == 0
    assert dist(embed(S34, 0), embed(S34, 1)) == 1


def test_ball_examples():
    assert ball_to_cylinder(identity(S348), Fraction(1, 6)) == (2, (0, 0))
    assert ball_to_cylinder(embed(S348, 7), Fraction(1)) == (1, (1,))
    # just above 1/M_2 the ball is the level-2 cylinder
    assert ball_level(S348, Fraction(1, 12) + Fraction(1, 10**9)) == 2


@pytest.mark.parametrize("eps", [0, -1, Fraction(3, 2)])
def test_ball_rejects_bad_radius(eps):
    with pytest.raises(ValueError):
        ball_level(S348, eps)


def test_ball_finer_than_depth():
    with pytest.raises(ValueError):
        ball_level(S34, Fraction(1, 12))


def test_spec_validation():
    with pytest.raises(ValueError):
        OdometerSpec((3, 1))
    with pytest.raises(ValueError):
        OdometerSpec(())
    with pytest.raises(ValueError):
        OdometerSpec((3, 4), max_depth=3)
    with pytest.raises(ValueError):
        OdometerPoint(S34, (3, 0))
    assert OdometerSpec((3, 4, 5), max_depth=2).scales == (3, 4)


def test_spec_mismatch():
    with pytest.raises(ValueError):
        add(embed(S34, 1), embed(S348, 1))
    with pytest.raises(ValueError):
        dist(embed(S348, 1, 2), embed(S348, 1, 3))


def test_spec_json_round_trip():
    assert OdometerSpec.from_json(S348.to_json()) == S348


def test_index_and_measure():
    assert [S348.index(n) for n in range(4)] == [1, 3, 12, 96]
    assert S348.cylinder_measure(2) == Fraction(1, 12)


@given(scales_st, st.integers(-500, 500))
def test_digits_match_oracle(scales, g):
    spec = OdometerSpec(scales)
    assert embed(spec, g).digits == oracles.digits(scales, g)
    assert embed(spec, g).residue() == g % oracles.index(scales, len(scales))


@settings(max_examples=60)
@given(scales_st)
def test_homomorphism_over_full_period(scales):
    spec = OdometerSpec(scales)
    M = spec.index(spec.max_depth)
    pts = [embed(spec, g) for g in range(M)]
    for g in range(M):
        for h in range(0, M, max(1, M // 16)):
            assert add(pts[g], pts[h]) == pts[(g + h) % M]
        assert add(pts[g], negate(pts[g])) == pts[0]


@given(scales_st, st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_ultrametric_and_invariance(scales, a, b, c):
    spec = OdometerSpec(scales)
    x, y, z = embed(spec, a), embed(spec, b), embed(spec, c)
    assert dist(x, z) <= max(dist(x, y), dist(y, z))
    assert dist(add(x, z), add(y, z)) == dist(x, y)
    assert dist(x, y) == dist(y, x)
    assert subtract(add(x, y), y) == x


@given(scales_st, st.integers(0, 10**6), st.integers(0, 10**6))
def test_dist_is_gauge_of_first_difference(scales, a, b):
    spec = OdometerSpec(scales)
    x, y = embed(spec, a), embed(spec, b)
    n = first_difference(x, y)
    if n is None:
        assert dist(x, y) == 0
    else:
        assert dist(x, y) == Fraction(1, oracles.index(scales, n - 1))


@given(scales_st, st.integers(-300, 300))
def test_eventually_zero_digits_for_nonnegative(scales, g):
    # within representable depth: nonnegative integers below M_{N-1} end in a zero digit
    spec = OdometerSpec(scales + (2,))
    if abs(g) < spec.index(spec.max_depth - 1):
        last = embed(spec, g).digits[-1]
        assert (last == 0) == (g >= 0)


@given(scales_st, st.integers(0, 10**5), st.fractions(Fraction(1, 10**4), Fraction(1)))
def test_ball_is_open_dist_ball(scales, g, eps):
    spec = OdometerSpec(scales)
    xi = embed(spec, g)
    try:
        n, path = ball_to_cylinder(xi, eps)
    except ValueError:
        return
    M = spec.index(spec.max_depth)
    for h in range(0, M, max(1, M // 50)):
        eta = embed(spec, h)
        assert (dist(xi, eta) < eps) == (eta.digits[:n] == path)
