from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmckay.errors import RegionMismatch, UnknownVariable
from qmckay.exactnum import Cyclotomic
from qmckay.lattice import ChangeOfVariables
from qmckay.series import Monomial, PuiseuxSeries, Region, compare, scale, substitute

SRC = ("q4", "q5", "q0")
TGT = ("qh1", "qh5", "qh0")
Z5_COV = ChangeOfVariables(SRC, TGT, [[F(-1, 5), 0, 0], [F(-3, 5), 1, 0], [F(1, 5), 0, 1]])
IDENTITY = ChangeOfVariables(SRC, SRC, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

z = Cyclotomic.zeta_power
exps = st.builds(F, st.integers(-6, 6), st.integers(1, 5))
monomials = st.dictionaries(st.sampled_from(SRC), exps, max_size=3).map(Monomial)
coeffs = st.tuples(st.integers(-3, 3), st.integers(0, 9)).map(lambda t: z(t[1], 10) * t[0])


def series_of(items, m0_max=3, variables=SRC):
    return PuiseuxSeries(items, 10, Region(m0_max, frozenset(variables)))


series = st.lists(st.tuples(monomials, coeffs), max_size=8).map(series_of)


def test_monomial_canonical_form():
    m = Monomial({"q0": 2, "q4": 0})
    assert m.exponents == {"q0": 2}
    assert m == Monomial({"q0": F(4, 2)})
    assert str(Monomial({"q4": F(-1, 5), "q0": 1})) == "q0*q4^(-1/5)"
    assert Monomial({}) < Monomial({"a": 1})


def test_substitute_z5_examples():
    s = series_of([(Monomial({"q0": 1, "q4": 1}), z(7, 10)), (Monomial({"q0": 5}), z(0, 10))])
    out = substitute(s, Z5_COV)
    assert out.coefficient(Monomial({"qh0": 1})) == z(7, 10)
    assert out.coefficient(Monomial({"qh1": 1, "qh0": 5})) == z(0, 10)
    assert len(out) == 2
    assert out.region == Region(3, frozenset(TGT))


@given(series)
def test_substitute_identity(s):
    assert substitute(s, IDENTITY) == s


@given(monomials, monomials)
def test_substitute_is_multiplicative(m1, m2):
    img = lambda m: Monomial(Z5_COV.image(m.exponents))
    assert img(m1 * m2) == img(m1) * img(m2)


@given(series)
def test_substitute_round_trip(s):
    back = substitute(substitute(s, Z5_COV), Z5_COV.inverse())
    assert back == s


@given(series, st.integers(-4, 4))
def test_substitute_commutes_with_scale(s, c):
    assert substitute(scale(s, c), Z5_COV) == scale(substitute(s, Z5_COV), c)


def test_substitute_unknown_variable():
    s = series_of([(Monomial({"q9": 1}), z(0, 10))])
    with pytest.raises(UnknownVariable):
        substitute(s, Z5_COV)


def test_substitute_collisions_are_summed_and_counted():
    collapse = ChangeOfVariables(("a", "b"), ("x",), [[1], [1]])
    s = PuiseuxSeries(
        [(Monomial({"a": 1}), z(1, 10)), (Monomial({"b": 1}), z(1, 10) * 2)], 10, Region(1, frozenset("ab"))
    )
    out = substitute(s, collapse)
    assert out.coefficient(Monomial({"x": 1})) == z(1, 10) * 3
    assert out.collisions == 1


def test_cancelling_collision_drops_term():
    collapse = ChangeOfVariables(("a", "b"), ("x",), [[1], [1]])
    s = PuiseuxSeries([(Monomial({"a": 1}), z(2, 10)), (Monomial({"b": 1}), -z(2, 10))], 10)
    assert len(substitute(s, collapse)) == 0


def test_scale_examples():
    s = series_of([(Monomial({"q0": 1}), z(7, 10)), (Monomial({"q0": 2}), z(3, 10))])
    assert scale(s, 1) == s
    assert len(scale(s, 0)) == 0
    assert scale(s, 5).coefficient(Monomial({"q0": 1})) == z(7, 10) * 5


def test_no_zero_coefficients_stored():
    s = series_of([(Monomial({"q0": 1}), Cyclotomic.zero(10))])
    assert len(s) == 0


@given(series)
def test_compare_self_is_empty(s):
    assert compare(s, s).empty


@given(series)
def test_compare_against_double(s):
    rep = compare(s, scale(s, 2))
    assert [m for m, _, _ in rep.mismatches] == sorted(s.terms)
    assert not rep.left_only and not rep.right_only


@given(series, series)
def test_compare_symmetry(a, b):
    assert compare(a, b).empty == compare(b, a).empty
    assert compare(a, b).total == compare(b, a).total


def test_compare_reports_one_sided_terms():
    a = series_of([(Monomial({"q0": 1}), z(0, 10))])
    b = series_of([(Monomial({"q0": 2}), z(0, 10))])
    rep = compare(a, b)
    assert rep.left_only == [Monomial({"q0": 1})]
    assert rep.right_only == [Monomial({"q0": 2})]


def test_compare_region_mismatch():
    with pytest.raises(RegionMismatch):
        compare(series_of([], m0_max=3), series_of([], m0_max=4))
    with pytest.raises(RegionMismatch):
        compare(series_of([], variables=SRC), series_of([], variables=TGT))


@given(series)
def test_json_round_trip_and_order(s):
    doc = s.to_json()
    assert PuiseuxSeries.from_json(doc, s.region, order=10) == s
    assert [Monomial.from_json(t["monomial"]) for t in doc] == sorted(s.terms)
