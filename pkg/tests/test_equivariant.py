from types import SimpleNamespace

import pytest

from ainf import bar
from ainf.ainfty import AInftyStructure, Operations, Pairing, validate_structure, validate_unit
from ainf.equivariant import (Coderivation, TStarModule, bracket, cartan_complex, check_even_cohomology,
                              check_invariance, check_tstar, coderivations_agree, equivariant_extend,
                              equivariant_pipeline, equivariant_retraction, invariant_retraction,
                              invariant_subcomplex, jacobi_residual, kunneth_check, lift_closed_basis,
                              normalize_basis)
from ainf.errors import LiftObstructed, NotInvariant
from ainf.fixtures import BETA_E, build_fixture
from ainf.grading import Bidegree, CoefficientRing, GradedMatrix, GradedModule
from ainf.novikov import ZERO


def _random_family(mod, degree, rng):
    table = {}
    for k in (1, 2):
        for w in bar.basis_words(mod, k):
            g = Bidegree(sum(mod.degree(x).codim - 1 for x in w) + degree + 1,
                         sum(mod.degree(x).ls for x in w))
            outs = mod.names_of_degree(g)
            if outs and rng.random() < 0.5:
                table[w] = {ZERO: {rng.choice(outs): rng.choice([-2, -1, 1, 2])}}
    return lambda w: table.get(w, {})


def test_tstar_fixtures():
    for name in ("PT", "S1", "M6i"):
        assert check_tstar(build_fixture(name).tstar).passed
    b = build_fixture("M6i")
    mod = b.d.source
    bad = GradedMatrix(mod, mod, Bidegree(-1, 0), {("a", "b"): 1, ("1", "a"): 1})
    assert not check_tstar(TStarModule(b.d, [bad])).passed


def test_invariant_subcomplex():
    assert invariant_subcomplex(build_fixture("M6i").tstar).module.names == ["1", "a", "b", "p", "q", "w"]
    assert invariant_subcomplex(build_fixture("PT").tstar).module.names == ["1"]
    b = build_fixture("M6i")
    mod = b.d.source
    zero = GradedMatrix.zero(mod, mod, Bidegree(-1, 0))
    lie = GradedMatrix(mod, mod, Bidegree(0, 0), {("a", "a"): 1})
    assert "a" not in invariant_subcomplex(TStarModule(b.d, [zero], [lie])).module.names


def test_brackets():
    b = build_fixture("S1")
    dp = Coderivation.linear(b.d.twisted(), 1)
    ip = Coderivation.linear(b.tstar.iota_prime(0), -1)
    minus_lie = Coderivation.linear(b.tstar.lie[0].scale(-1), 0)
    assert coderivations_agree(bracket(dp, ip), minus_lie, 3) == []
    m = build_fixture("M6").structure
    zero = Coderivation(m.module, lambda w: {}, 0)
    L = Coderivation.linear(GradedMatrix.identity(m.module), 0)
    assert coderivations_agree(bracket(L, L), zero, 3) == []


def test_graded_jacobi_on_random_coderivations(rng):
    mod = build_fixture("M6").structure.module
    hs = [Coderivation(mod, _random_family(mod, d, rng), d) for d in (1, 0, -1)]
    assert jacobi_residual(*hs, 3) == []


def test_cartan_square_of_the_extended_coderivation():
    # m' = m - sum alpha iota' squares to -sum alpha L-hat; for the circle L = 0
    X = equivariant_extend(build_fixture("S1").structure, build_fixture("S1").tstar)
    m = Coderivation.of_structure(X)
    zero = Coderivation(X.module, lambda w: {}, 2)
    assert coderivations_agree(bracket(m, m), zero, 3) == []


def test_invariance():
    s1 = build_fixture("S1")
    assert check_invariance(s1.structure, s1.tstar).passed
    m6 = build_fixture("M6")
    assert check_invariance(m6.structure, TStarModule.trivial(m6.d)).passed
    m6i = build_fixture("M6i")
    rep = check_invariance(m6i.structure, m6i.tstar, 2)
    assert not rep.passed
    with pytest.raises(NotInvariant):
        equivariant_extend(m6i.structure, m6i.tstar, 2)


def test_cartan_differential():
    E = cartan_complex(build_fixture("M6i").tstar)
    a1 = E.ring.alpha(1)
    assert E.D.column("a") == {"b": 1, "1": -a1}
    assert E.D.column("w") == {"q": -a1}
    assert E.D.column("p") == {"q": 1}
    assert all(not E.D.column(n) for n in ("1", "b", "q"))
    S = cartan_complex(build_fixture("S1").tstar)
    assert S.D.column("e1") == {"e0": -S.ring.alpha(1)}
    P = cartan_complex(TStarModule.trivial(build_fixture("M6").d))
    assert P.D.map_coefficients(P.ring.specialize, P.invariant.module, P.invariant.module).entries == \
        build_fixture("M6").d.entries


def test_extension_examples():
    s1 = build_fixture("S1")
    X = equivariant_extend(s1.structure, s1.tstar)
    assert X.m(1, ZERO, ("e1",)) == {"e0": X.ring.alpha(1)}
    assert validate_unit(X, "e0").passed
    de = build_fixture("DEF-E")
    Y = equivariant_extend(de.structure, TStarModule.trivial(de.d))
    assert Y.m(0, BETA_E, ()) == {"1": Y.ring.one}
    assert validate_structure(Y, 3).passed


def test_even_cohomology():
    for name, expected in (("PT", True), ("S1", False), ("M6", True)):
        b = build_fixture(name)
        assert check_even_cohomology(b.d.source, b.d) is expected


def test_lifts():
    assert lift_closed_basis(cartan_complex(build_fixture("PT").tstar)) == [{"1": CoefficientRing(1).one}]
    with pytest.raises(LiftObstructed) as info:
        lift_closed_basis(cartan_complex(build_fixture("S1").tstar))
    assert info.value.degree is not None


def test_normalize_basis():
    b = build_fixture("M6i")
    E = cartan_complex(b.tstar)
    pairing = b.structure.pairing.with_module(E.module)
    lifts = lift_closed_basis(E)
    assert normalize_basis(E, lifts, pairing) == lifts


def test_normalize_basis_two_by_two():
    ring = CoefficientRing(1)
    a1 = ring.alpha(1)
    mod = GradedModule([("u", (0, 0)), ("v", (2, 0)), ("x", (2, 0)), ("y", (0, 0))], ring)
    pairing = Pairing(mod, (2, 0), {("u", "x"): 1, ("v", "y"): 1, ("u", "y"): a1})
    lifts = [{"u": ring.one}, {"v": ring.one}, {"x": ring.one}, {"y": ring.one}]
    E = SimpleNamespace(module=mod)
    out = normalize_basis(E, lifts, pairing)
    assert pairing.evaluate(out[0], out[2]) == 1 and pairing.evaluate(out[1], out[3]) == 1
    assert pairing.evaluate(out[0], out[3]) == 0 and pairing.evaluate(out[1], out[2]) == 0
    assert out[3] == {"y": ring.one, "x": -a1}


def test_equivariant_retraction_values():
    b = build_fixture("M6i")
    r = equivariant_retraction(b.tstar, invariant_retraction(b.structure, b.tstar))
    a1 = r.C.ring.alpha(1)
    assert r.Pi.column("b") == {"[1]": a1}
    assert r.Pi.column("w") == {"[w]": 1}
    assert r.I.column("[w]") == {"w": 1, "p": a1}
    assert {n: dict(r.h.column(n)) for n in r.C.names if r.h.column(n)} == {"b": {"a": 1}, "q": {"p": -1}}
    assert r.side_conditions and r.cyclic and r.unital


def test_point_pipeline_is_unital_and_cyclic():
    b = build_fixture("PT")
    run = equivariant_pipeline(b.structure, b.tstar)
    assert not {n: v for n, v in run.retraction.h.cols.items() if v}
    C = run.transfer.A_can
    assert validate_structure(C, 4).passed and validate_unit(C, C.unit).passed
    with pytest.raises(LiftObstructed):
        s1 = build_fixture("S1")
        equivariant_pipeline(s1.structure, s1.tstar)


def test_kunneth():
    m6i, pt = build_fixture("M6i").tstar, build_fixture("PT").tstar
    assert kunneth_check(m6i, pt).info["rank"] == 2
    assert kunneth_check(m6i, m6i).info["rank"] == 4
    s1 = build_fixture("S1").tstar
    with pytest.raises(LiftObstructed):
        kunneth_check(s1, s1)
