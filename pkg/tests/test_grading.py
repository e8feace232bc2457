from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ainf.errors import NotUnipotent
from ainf.grading import (Bidegree, CoefficientRing, GradedMatrix, GradedModule, Poly, format_poly,
                          koszul_sign, parity_sign, parse_poly, unipotent_inverse)


def test_koszul_sign_examples():
    assert koszul_sign(0, [Bidegree(5, 1), Bidegree(2, 0)]) == 1
    assert koszul_sign(1, [Bidegree(2, 0)]) == -1
    assert koszul_sign(1, [Bidegree(1, 0), Bidegree(3, 1)]) == 1


@given(st.integers(-6, 6), st.lists(st.tuples(st.integers(-4, 4), st.integers(0, 1)), max_size=5))
def test_koszul_sign_is_multiplicative_in_the_degree(d, raw):
    degs = [Bidegree(*g) for g in raw]
    assert koszul_sign(d + 1, degs) == koszul_sign(d, degs) * koszul_sign(1, degs)


def test_bidegree_reduces_local_system_mod_two():
    assert Bidegree(1, 3) == Bidegree(1, 1)
    assert Bidegree(2, 1) + Bidegree(1, 1) == Bidegree(3, 0)
    assert parity_sign(-3) == -1


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 2)),
                        st.fractions(max_denominator=5), max_size=4).map(lambda t: Poly(2, t))


@given(polys)
def test_poly_literal_round_trip(p):
    assert parse_poly(format_poly(p), 2) == p


@given(polys, polys, polys)
def test_poly_ring_axioms(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p - p == Poly(2)


def test_poly_evaluate_and_constant_term():
    ring = CoefficientRing(2)
    p = ring.alpha(1) * ring.alpha(2) + 3
    assert p.constant_term() == 3
    assert p.evaluate({1: 2, 2: 5}).constant_term() == 13
    assert ring.specialize(p) == 3
    assert ring.alpha_degree(ring.alpha(1) * ring.alpha(2)) == 2


def test_matrix_degree_check_rejects_bad_entries():
    mod = GradedModule([("x", (0, 0)), ("y", (1, 0))])
    GradedMatrix(mod, mod, Bidegree(1, 0), {("y", "x"): 1})
    with pytest.raises(ValueError):
        GradedMatrix(mod, mod, Bidegree(1, 0), {("x", "y"): 1})


def test_unipotent_inverse_identity_and_two_by_two():
    ring = CoefficientRing(1)
    mod = GradedModule([("u", (0, 0)), ("v", (2, 0))], ring)
    ident = GradedMatrix.identity(mod)
    assert unipotent_inverse(ident) == ident
    # entry (u, v) = alpha: deg u + 2 = deg v
    M = GradedMatrix(mod, mod, Bidegree(0, 0), {("u", "u"): 1, ("v", "v"): 1, ("u", "v"): ring.alpha(1)})
    inv = unipotent_inverse(M)
    assert inv.entry("u", "v") == -ring.alpha(1)
    assert inv.entry("u", "u") == 1 and inv.entry("v", "v") == 1


def test_unipotent_inverse_rejects_constant_off_diagonal():
    mod = GradedModule([("u", (0, 0)), ("v", (0, 0))])
    M = GradedMatrix(mod, mod, Bidegree(0, 0), {("u", "u"): 1, ("v", "v"): 1, ("u", "v"): 1})
    with pytest.raises(NotUnipotent):
        unipotent_inverse(M)


def test_module_vector_round_trip():
    ring = CoefficientRing(1)
    mod = GradedModule([("p", (0, 1)), ("w", (2, 1))], ring)
    vec = {"w": ring.one, "p": ring.alpha(1) * Fraction(-1, 2)}
    assert mod.parse_vector(mod.format_vector(vec)) == vec
    assert mod.element_degree(vec) == Bidegree(2, 1)
