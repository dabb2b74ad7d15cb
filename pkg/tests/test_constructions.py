from fractions import Fraction
from math import log2

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symwin.constructions.acwindow import AcParams, ac_window, in_density_set
from symwin.constructions.counterexample import (
    counterexample_window,
    divergence_terms,
    log2_3_bounds,
    member,
    q_sequence,
    selector,
    stage_cells,
)
from symwin.constructions.entropy import entropy_window, shape_of
from symwin.constructions.paths import blend, path_window, properify, representative
from symwin.metrics import count_patterns
from symwin.modelset import generate_array
from symwin.odometer import OdometerSpec, embed
from symwin.window import (
    FRONTIER,
    IN,
    OUT,
    boundary_mass,
    cellwise_subset,
    constant,
    from_cylinders,
    integer_status,
    measure,
)


# regular counterexample ----------------------------------------------------

def test_counterexample_stage_one_cells():
    assert selector(0, 4) == [0, 2]
    assert selector(1, 4) == [0, 1]
    assert stage_cells(1, 0)[0] == [(0, 0), (0, 2)]
    assert stage_cells(1, 1)[0] == [(1, 0), (1, 1)]
    w = counterexample_window(2)
    u1 = [(0, 0), (0, 2), (1, 0), (1, 1)]
    assert w == from_cylinders(w.spec, [(c, "in") for c in u1] +
                               [((0, 1), "out"), ((0, 3), "out"), ((1, 2), "out"),
                                ((1, 3), "out"), ((2,), "frontier")])


def test_counterexample_chain():
    assert q_sequence(4) == [3, 4, 8, 128]
    # a depth-N tree resolves N levels and leaves the chain cell Z_(N-1) open
    w = counterexample_window(3)
    assert w.root.children[2].children[3] is FRONTIER
    assert boundary_mass(w).hi == Fraction(1, 12)
    w = counterexample_window(4)
    assert w.root.children[2].children[3].children[7] is FRONTIER
    assert boundary_mass(w).hi == Fraction(1, 96)
    with pytest.raises(ValueError):
        counterexample_window(5)
    with pytest.raises(ValueError):
        q_sequence(6)


def test_member_oracle_agrees_with_tree():
    w = counterexample_window(4)
    M = w.spec.index(4)
    for g in list(range(-M - 50, -M + 50)) + list(range(-200, 200)) + list(range(M - 50, M + 50)):
        s = integer_status(w, g)
        if s is IN:
            assert member(g) == 1
        elif s is OUT:
            assert member(g) == 0
    assert member(-1) is None
    # first four digits on top: decided only by the sign at level 6
    assert member(M - 1) == 1 and member(-M - 1) == 0
    with pytest.raises(ValueError):
        member(M * 2 ** 127 + M - 1)


def test_divergence_terms():
    lo, hi = log2_3_bounds()
    assert lo < log2(3) < hi and hi - lo < Fraction(1, 10 ** 4)
    terms = divergence_terms(5)
    assert all(a <= b for a, b in terms)
    # increasing from the second term on; a_1 > a_2 is recorded in the ledger
    assert all(terms[i][1] < terms[i + 1][0] for i in range(1, 4))
    assert terms[0][0] > terms[1][1]
    assert terms[4][0] > 10 ** 35


# W_t ------------------------------------------------------------------------

def test_ac_epsilon_examples():
    zero = AcParams(5, 1, Fraction(0), 6)
    one = AcParams(5, 1, Fraction(1), 6)
    for n in range(7):
        assert zero.epsilon(n) == Fraction(1, 5 ** n)
        assert one.epsilon(n) == Fraction(3, 5) ** n
    assert [in_density_set(Fraction(1, 2), k) for k in range(1, 7)] == [False, True] * 3


def test_ac_params_validation():
    for bad in [(2, 1, 0, 3), (5, 0, 0, 3), (5, 1, 2, 3), (5, 1, 0, 0)]:
        with pytest.raises(ValueError):
            AcParams(*bad)


def test_ac_window_digit_roles_and_boundary():
    a = ac_window(AcParams(5, 2, Fraction(1, 2), 4))
    c, rest = a.params.digit_roles(1)
    assert list(c) == [1, 2] and list(rest) == list(range(3, 10))
    c, rest = a.params.digit_roles(2)
    assert list(c) == [1, 2, 3] and list(rest) == [4]
    assert boundary_mass(a.tree).hi == a.chain_mass(4)
    # tau(-1) has top digits and falls into A at level 1
    assert integer_status(a.tree, -1) is IN


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(1, 3), st.fractions(0, 1, max_denominator=12),
       st.integers(1, 5))
def test_chain_mass_is_epsilon(p, s, t, depth):
    a = ac_window(AcParams(p, s, t, depth))
    for n in range(depth + 1):
        assert a.chain_mass(n) == a.params.epsilon(n)
    assert measure(a.tree).hi - measure(a.tree).lo == a.params.epsilon(depth)
    hits = sum(in_density_set(t, k) for k in range(1, 121))
    assert abs(hits - 120 * t) < 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5 ** 4 * 2 - 1), st.integers(0, 5 ** 4 * 2 - 1))
def test_d_t_is_an_invariant_ultrametric(a, b):
    w = ac_window(AcParams(5, 2, Fraction(1, 2), 4))
    spec = w.tree.spec
    x, y, z = embed(spec, a), embed(spec, b), embed(spec, 0)
    assert w.d_t(x, y) == w.d_t(embed(spec, a - b), z)
    assert w.d_t(x, y) <= max(w.d_t(x, z), w.d_t(z, y))


# path A(t) ------------------------------------------------------------------

def test_path_endpoints_and_example():
    spec = OdometerSpec((3, 4))
    empty, _ = path_window(spec, 0)
    full, _ = path_window(spec, 1)
    assert empty.root is OUT and full.root is IN
    w, trace = path_window(spec, Fraction(1, 2))
    assert trace.ks[0] == 2
    assert trace.ks == (2, 3)
    assert measure(w).lo == Fraction(1, 3) + Fraction(2, 12)
    assert trace.to_json()["k"] == [2, 3]
    with pytest.raises(ValueError):
        path_window(spec, Fraction(3, 2))


def test_representative():
    assert representative(2, 3) == -1
    assert representative(1, 2) == 1
    assert representative(5, 12) == 5
    assert representative(7, 12) == -5


@settings(max_examples=80)
@given(st.fractions(0, 1, max_denominator=500))
def test_path_mass_below_t(t):
    spec = OdometerSpec((3, 4, 8))
    w, trace = path_window(spec, t)
    m = measure(w)
    assert m.lo == trace.mass <= t
    assert t - Fraction(1, 96) <= m.lo
    assert (m.hi == m.lo) == trace.exact


def test_blend_endpoints():
    spec = OdometerSpec((3, 4))
    w0 = from_cylinders(spec, [([0, 0], "in")])
    w1 = from_cylinders(spec, [([0], "in"), ([1, 1], "in")])
    assert blend(w0, w1, 0) == w0
    assert blend(w0, w1, 1) == w1
    mid = blend(w0, w1, Fraction(1, 2))
    assert cellwise_subset(w0, mid) and cellwise_subset(mid, w1)
    assert properify(mid) == mid
    with pytest.raises(ValueError):
        blend(w0, constant(OdometerSpec((2,)), IN), 0)


# entropy construction -------------------------------------------------------

@pytest.fixture(scope="module")
def entropy():
    return entropy_window(Fraction(1, 2), 2)


def test_entropy_stage_one(entropy):
    st1 = entropy.stages[0]
    assert (st1.k, st1.r, st1.level, st1.g_star) == (3, 4, 4, 8)
    assert len(st1.G) == 8 - len(st1.S)
    assert len(st1.S) >= 4
    # the first word is 1 on the identity and 0 on the rest of G_1
    assert st1.word == {0: 1, 1: 0, 2: 0}
    assert len(st1.translates) == 2 ** len(st1.S)
    assert all(st1.invariants.values())


def test_entropy_stage_two(entropy):
    st2 = entropy.stages[1]
    assert (st2.k, st2.r, st2.level, st2.g_star) == (11, 256, 12, 2056)
    assert len(st2.S) >= 2 ** 11 // 2
    assert all(st2.invariants.values())
    log = entropy.log_json()
    assert [s["stage"] for s in log["stages"]] == [1, 2]


def test_entropy_windows(entropy):
    assert cellwise_subset(entropy.w_zero, entropy.w_gamma)
    M = entropy.w_gamma.spec.index(entropy.w_gamma.spec.max_depth)
    x = generate_array(entropy.w_gamma, 0, M)
    anchor, offsets = shape_of(entropy.stages[0])
    assert count_patterns(x, offsets) == 2 ** len(offsets)
    for t in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
        b = blend(entropy.w_zero, entropy.w_gamma, t)
        assert cellwise_subset(entropy.w_zero, b) and cellwise_subset(b, entropy.w_gamma)


def test_entropy_validation():
    with pytest.raises(ValueError):
        entropy_window(Fraction(1), 1)
    with pytest.raises(ValueError):
        entropy_window(Fraction(1, 2), 3)
    with pytest.raises(ValueError):
        entropy_window(Fraction(1, 2), 2, scales=(2,) * 6)
