import pytest

from ainf import bar
from ainf.ainfty import validate_structure
from ainf.errors import NotAHomotopy, NotAPerturbation, SideConditionsMissing
from ainf.fixtures import BETA_E, build_fixture
from ainf.grading import Bidegree, GradedMatrix
from ainf.hpl import (Retraction, check_retraction, correct_side_conditions, retraction_for,
                      retraction_from_splitting, transfer)
from ainf.novikov import ZERO


def _h(r):
    return {n: dict(r.h.column(n)) for n in r.C.names if r.h.column(n)}


def test_point_retraction_is_trivial():
    b = build_fixture("PT")
    r = retraction_from_splitting(b.d.source, b.d)
    assert _h(r) == {}
    assert r.Pi.column("1") == {"[1]": 1} and r.I.column("[1]") == {"1": 1}


def test_m6_retraction():
    b = build_fixture("M6")
    A = b.structure
    r = retraction_from_splitting(b.d.source, b.d, A.pairing, "1")
    assert _h(r) == {"b": {"a": 1}, "q": {"p": -1}}
    assert r.side_conditions and r.cyclic and r.unital
    assert not r.h.column("1")


def test_side_condition_violation_is_reported():
    A = build_fixture("M6").structure
    r = retraction_for(A)
    cols = {n: dict(r.h.column(n)) for n in A.module.names}
    # h I([w]) = h(w) != 0; the homotopy identity then fails too, which is fine for this probe
    cols["w"] = {"q": 1}
    bad = Retraction(r.C, r.H, r.dprime, r.Pi, r.I, GradedMatrix.from_columns(r.C, r.C, Bidegree(-1, 0), cols))
    assert "h-I" in check_retraction(bad).checks_failed()


def test_correction_keeps_good_input_and_rejects_non_homotopies():
    A = build_fixture("M6").structure
    r = retraction_for(A)
    again = correct_side_conditions(r.Pi, r.I, r.h, r.dprime, A.pairing, "1")
    assert again.side_conditions and _h(again) == _h(r)
    broken = r.h.scale(2)
    with pytest.raises(NotAHomotopy):
        correct_side_conditions(r.Pi, r.I, broken, r.dprime)


def test_transfer_preconditions():
    A = build_fixture("M6").structure
    r = retraction_for(A)
    other = build_fixture("N3").structure
    with pytest.raises(NotAPerturbation):
        transfer(other, retraction_for(build_fixture("PT").structure))
    lazy = Retraction(r.C, r.H, r.dprime, r.Pi, r.I, GradedMatrix.zero(r.C, r.C, Bidegree(-1, 0)))
    with pytest.raises((SideConditionsMissing, NotAPerturbation)):
        transfer(A, lazy)


def test_curved_point_transfer():
    A = build_fixture("DEF-E").structure
    T = transfer(A, retraction_for(A))
    assert T.A_can.m(0, BETA_E, ()) == {"[1]": 1}


def test_m6_minimal_model_is_binary():
    A = build_fixture("M6").structure
    T = transfer(A, retraction_for(A), k_max=4)
    for word, beta, vec in T.A_can.entries(4):
        assert len(word) == 2 and beta == ZERO
    assert T.A_can.m(2, ZERO, ("[1]", "[w]")) == {"[w]": 1}


def test_small_length_cap_does_truncate():
    # guards the stability check against being vacuous
    A = build_fixture("DEF-O").structure
    r = retraction_for(A)
    full = transfer(A, r)
    capped = transfer(A, r, length_cap=0)
    H = full.A_can.module
    differs = any(full.I.component(w) != capped.I.component(w)
                  for k in range(3) for w in bar.basis_words(H, k))
    assert differs
    assert validate_structure(full.A_can, 3).passed
