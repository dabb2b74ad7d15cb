import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symwin.constructions.acwindow import AcParams, ac_window
from symwin.constructions.counterexample import counterexample_window
from symwin.modelset import (
    SymbolicArray,
    array_from_oracle,
    generate_array,
    period_report,
    period_report_from_array,
    reconstruct_window,
    regularity_constant,
    write_array,
)
from symwin.odometer import OdometerSpec
from symwin.window import IN, UNDECIDED, boundary_mass, constant, decided_mass, from_cylinders


@st.composite
def decided_windows(draw):
    scales = tuple(draw(st.lists(st.integers(2, 4), min_size=1, max_size=3)))
    M = oracles.index(scales, len(scales))
    table = draw(st.lists(st.sampled_from([0, 1]), min_size=M, max_size=M))
    spec = OdometerSpec(scales)
    return spec, table, from_cylinders(spec, oracles.cells_of_table(scales, table))


@st.composite
def any_windows(draw):
    scales = tuple(draw(st.lists(st.integers(2, 4), min_size=1, max_size=3)))
    M = oracles.index(scales, len(scales))
    table = draw(st.lists(st.sampled_from([0, 1, -1]), min_size=M, max_size=M))
    spec = OdometerSpec(scales)
    return spec, table, from_cylinders(spec, oracles.cells_of_table(scales, table))


def test_generate_examples():
    s3 = OdometerSpec((3,))
    w = from_cylinders(s3, [([0], "in")])
    assert generate_array(w, 0, 6).to_text() == "100100"
    assert generate_array(constant(s3, IN), 0, 10).to_text() == "1" * 10
    cx = counterexample_window(3)
    assert generate_array(cx, -1, 0).at(-1) == UNDECIDED


def test_period_report_counterexample():
    cx = counterexample_window(3)
    assert period_report(cx, 1).density == 0
    r2 = period_report(cx, 2)
    assert r2.density == Fraction(2, 3)
    assert r2.residues_one == {0, 6, 1, 4}
    assert not r2.residues_one & r2.residues_zero
    assert period_report(cx, 3).density == Fraction(11, 12)
    with pytest.raises(ValueError):
        period_report(cx, 4)
    js = r2.to_json()
    assert js["density"]["num"] == "2" and js["density"]["den"] == "3"


def test_regularity_examples():
    cx = counterexample_window(3)
    rep = regularity_constant(cx, 3)
    assert rep.densities == (0, Fraction(2, 3), Fraction(11, 12))
    assert rep.limit_estimate == Fraction(11, 12)
    s3 = OdometerSpec((3, 3))
    assert regularity_constant(from_cylinders(s3, [([0], "in")]), 1).densities == (1,)
    a = ac_window(AcParams(5, 1, Fraction(1), 5))
    dens = regularity_constant(a.tree, 5).densities
    assert dens == tuple(1 - Fraction(3, 5) ** n for n in range(1, 6))


def test_reconstruct_examples():
    s34 = OdometerSpec((3, 4))
    x = array_from_oracle(s34, lambda g: int(g % 3 == 0), 0, 12)
    assert reconstruct_window(x, 2) == from_cylinders(s34, [([0], "in")])
    ones = SymbolicArray(s34, 0, np.ones(12, dtype=np.int8))
    assert reconstruct_window(ones, 2).root is IN
    cx = counterexample_window(3)
    M = cx.spec.index(3)
    assert reconstruct_window(generate_array(cx, 0, M), 3) == cx
    assert reconstruct_window(lambda g: int(g % 3 == 0), 2, spec=s34, g_range=(0, 12)) == \
        from_cylinders(s34, [([0], "in")])


def test_reconstruct_needs_a_full_period():
    cx = counterexample_window(3)
    with pytest.raises(ValueError):
        reconstruct_window(generate_array(cx, 0, 50), 3)
    with pytest.raises(ValueError):
        reconstruct_window(lambda g: 1, 2)


def test_symbolic_array_io():
    cx = counterexample_window(2)
    x = generate_array(cx, -2, 3)
    assert x.to_text() == "0?11?"
    assert write_array(x, "csv").splitlines()[0] == "g,symbol"
    assert json.loads(write_array(x, "json"))["g_lo"] == -2
    with pytest.raises(ValueError):
        write_array(x, "xml")
    with pytest.raises(ValueError):
        SymbolicArray(cx.spec, 0, np.array([2], dtype=np.int8))
    with pytest.raises(IndexError):
        x.at(10)


@settings(max_examples=60)
@given(decided_windows(), st.integers(-200, 200))
def test_generate_matches_table(win, g_lo):
    spec, table, w = win
    M = spec.index(spec.max_depth)
    x = generate_array(w, g_lo, g_lo + 2 * M)
    assert list(x.values) == [table[g % M] for g in range(g_lo, g_lo + 2 * M)]


@settings(max_examples=60)
@given(any_windows())
def test_density_matches_oracle_and_boundary(win):
    spec, table, w = win
    N = spec.max_depth
    prev = Fraction(0)
    for n in range(1, N + 1):
        dens = period_report(w, n).density
        assert dens == oracles.period_density(table, spec.scales, n)
        assert dens == decided_mass(w, n)
        assert dens >= prev
        prev = dens
    assert prev == 1 - boundary_mass(w).hi


@settings(max_examples=60)
@given(any_windows())
def test_round_trip(win):
    spec, table, w = win
    M = spec.index(spec.max_depth)
    x = generate_array(w, 0, M)
    assert reconstruct_window(x, spec.max_depth) == w
    for n in range(1, spec.max_depth + 1):
        assert period_report_from_array(x, n) == period_report(w, n)


@settings(max_examples=60)
@given(decided_windows(), decided_windows())
def test_phi_injective_on_decided(a, b):
    sa, ta, wa = a
    sb, tb, wb = b
    if sa != sb or wa == wb:
        return
    M = sa.index(sa.max_depth)
    assert generate_array(wa, 0, M) != generate_array(wb, 0, M)
