from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ainf.errors import InvalidGenerator, MonoidMismatch
from ainf.grading import CoefficientRing
from ainf.novikov import (GappedMonoid, MonoidElement, NovikovScalar, enumerate_monoid, left_action_sign,
                          novikov_mul, parse_element)

F = Fraction


def test_enumerate_examples():
    assert enumerate_monoid(GappedMonoid(), 5) == [(0, 0)]
    assert enumerate_monoid(GappedMonoid([(1, 2)]), F(5, 2)) == [(0, 0), (1, 2), (2, 4)]
    got = enumerate_monoid(GappedMonoid([(1, 1), (F(3, 2), 0)]), 3)
    assert got == [(0, 0), (1, 1), (F(3, 2), 0), (2, 2), (F(5, 2), 1), (3, 0), (3, 3)]


def test_generators_need_positive_energy():
    with pytest.raises(InvalidGenerator):
        GappedMonoid([(0, 2)])


@given(st.lists(st.tuples(st.integers(1, 3), st.integers(-2, 2)), min_size=1, max_size=3),
       st.integers(1, 4))
def test_enumeration_is_closed_and_bounded(gens, cap):
    G = GappedMonoid(gens)
    elems = set(G.elements(cap))
    for a in elems:
        assert a.E <= cap
        for b in elems:
            if a.E + b.E <= cap:
                assert a + b in elems


def test_novikov_products():
    G = GappedMonoid([(1, 2), (F(1, 2), 0)])
    a = NovikovScalar.monomial(G, 4, MonoidElement(1, 2))
    b = NovikovScalar.monomial(G, 4, MonoidElement(F(3, 2), 0))
    assert (a * b).coefficients == {MonoidElement(F(5, 2), 2): 1}
    assert novikov_mul(a, b, E_max=2).is_zero()
    ring = CoefficientRing(1)
    G1 = GappedMonoid([(1, 0)])
    c = NovikovScalar.monomial(G1, 3, MonoidElement(1, 0), ring.alpha(1), ring)
    d = NovikovScalar.monomial(G1, 3, MonoidElement(1, 0), 2, ring)
    assert (c * d).coefficients == {MonoidElement(2, 0): 2 * ring.alpha(1)}


def test_mismatched_monoids():
    a = NovikovScalar.monomial(GappedMonoid([(1, 0)]), 2, MonoidElement(1, 0))
    b = NovikovScalar.monomial(GappedMonoid([(1, 1)]), 2, MonoidElement(1, 1))
    with pytest.raises(MonoidMismatch):
        a * b


def test_left_action_sign_examples():
    assert left_action_sign(1, 0, 1) == 1
    assert left_action_sign(0, 0, 1) == -1
    assert left_action_sign(3, 1, 0) == 1


def test_parse_element_forms():
    assert parse_element("E=3/2,mu=-1") == MonoidElement(F(3, 2), -1)
    assert parse_element("1, 2") == MonoidElement(1, 2)
