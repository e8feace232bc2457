"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under capture) or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys

import pytest

from ainf import bar
from ainf.ainfty import AInftyStructure, Operations, from_dga, same_operations, validate_cyclic, \
    validate_structure, validate_unit
from ainf.equivariant import (cartan_complex, drop_deformation, equivariant_extend, equivariant_retraction,
                              invariant_retraction, kunneth_check, lift_closed_basis, specialize_alpha)
from ainf.errors import LiftObstructed
from ainf.fixtures import BETA_E, build_fixture
from ainf.grading import Bidegree, GradedMatrix, vadd, vclean
from ainf.hpl import check_retraction, correct_side_conditions, retraction_for, transfer
from ainf.morphisms import (AInftyMorphism, check_cyclic_morphism, check_homotopy, check_unital_morphism,
                            compose)
from ainf.novikov import ZERO, GappedMonoid
from ainf.trees import tree_inclusion, tree_transfer

K_MAX = 4


def _retraction(A):
    return retraction_for(A, cyclic=A.pairing is not None, unital=A.unit is not None)


def _is_identity(f: AInftyMorphism, k_max: int) -> list:
    """Words where f differs from the identity morphism."""
    bad = []
    for k in range(k_max + 1):
        for word in bar.basis_words(f.source.module, k):
            got = f.component(word)
            want = {ZERO: {word[0]: 1}} if k == 1 else {}
            for beta in set(got) | set(want):
                if vclean(vadd(dict(got.get(beta, {})), want.get(beta, {}), -1)):
                    bad.append(word)
    return bad


# ---------------------------------------------------------------- criteria

def crit_dga_soundness():
    failing = [n for n in ("PT", "S1", "M6", "N3")
               if not validate_structure(build_fixture(n).structure, K_MAX).passed]
    return not failing, f"failing: {failing}" if failing else "PT, S1, M6, N3 clean at k_max=4"


def crit_odd_sign_canary():
    A = build_fixture("DEF-O").structure
    honest = validate_structure(A, K_MAX)
    mutated = validate_structure(A, K_MAX, twist=False)
    ok = honest.passed and not mutated.passed
    return ok, f"honest={honest.passed} mutated_fails={not mutated.passed}"


def crit_hpl_theorem():
    problems = []
    for name in ("PT", "S1", "M6", "M6i", "N3", "DEF-E", "DEF-O"):
        A = build_fixture(name).structure
        T = transfer(A, _retraction(A), k_max=K_MAX)
        if not validate_structure(T.A_can, K_MAX).passed:
            problems.append(f"{name}: m_can")
        if _is_identity(compose(T.Pi, T.I), K_MAX):
            problems.append(f"{name}: Pi*I")
        if not check_homotopy(T.h, k_max=K_MAX).passed:
            problems.append(f"{name}: homotopy")
    return not problems, "; ".join(problems) or "m_can valid, Pi*I = id, h: id => I*Pi on all fixtures"


def crit_tree_oracle():
    diffs = []
    for name in ("M6", "N3", "DEF-E", "DEF-O"):
        A = build_fixture(name).structure
        r = _retraction(A)
        T = transfer(A, r)
        for k in range(K_MAX + 1):
            for beta in A.monoid.elements(min(A.cutoff, 2)):
                trees = tree_transfer(A, r, k, beta)
                incl = tree_inclusion(A, r, k, beta)
                for word in bar.basis_words(r.H, k):
                    if vclean(vadd(dict(trees.get(word, {})), T.A_can.m(k, beta, word), -1)):
                        diffs.append(f"{name} m k={k} {beta} {word}")
                    if vclean(vadd(dict(incl.get(word, {})), T.I.f(k, beta, word), -1)):
                        diffs.append(f"{name} I k={k} {beta} {word}")
    return not diffs, f"{len(diffs)} differences {diffs[:3]}" if diffs else "series = trees"


def crit_massey():
    A = build_fixture("N3").structure
    T = transfer(A, _retraction(A))
    ones = [n for n in T.A_can.module.names if T.A_can.module.degree(n) == Bidegree(1, 0)]
    m2 = [T.A_can.m(2, ZERO, (x, y)) for x in ones for y in ones]
    m3 = {(x, y, z): T.A_can.m(3, ZERO, (x, y, z)) for x in ones for y in ones for z in ones}
    nonzero = {w: v for w, v in m3.items() if v}
    ok = not any(m2) and bool(nonzero)
    first = next(iter(nonzero.items()), None)
    return ok, f"m2 on degree-1 classes zero={not any(m2)}, m3 witness {first}"


def crit_cyclic_unital():
    A = build_fixture("M6").structure
    r = retraction_for(A)
    T = transfer(A, r)
    C = T.A_can
    checks = {
        "retraction flags": r.cyclic and r.unital and r.side_conditions,
        "validate_cyclic": validate_cyclic(C, k_max=K_MAX).passed,
        "validate_unit": validate_unit(C, C.unit, 3).passed,
        "I cyclic": check_cyclic_morphism(T.I, k_max=K_MAX).passed,
        "I unital": check_unital_morphism(T.I).passed,
        "Pi unital": check_unital_morphism(T.Pi).passed,
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, f"failing: {bad}" if bad else "all cyclic/unital checks pass"


def crit_truncation():
    changed = []
    for name in ("DEF-E", "DEF-O", "N3"):
        A = build_fixture(name).structure
        r = _retraction(A)
        base = transfer(A, r)
        big_cap = 3 * max(K_MAX, A.monoid.length_bound(A.cutoff) + 1) + 6
        wide = transfer(A, r, length_cap=big_cap)
        for fam, module in (("A_can", r.H), ("I", r.H), ("Pi", r.C)):
            x, y = getattr(base, fam), getattr(wide, fam)
            for k in range(K_MAX + 1):
                for word in bar.basis_words(module, k):
                    a = x.ops(word)
                    b = y.ops(word)
                    if {key: vclean(v) for key, v in a.items()} != {key: vclean(v) for key, v in b.items()}:
                        changed.append((name, fam, word))
    return not changed, f"changed: {changed[:3]}" if changed else "raising length_cap changes nothing"


def crit_equivariant_square():
    b = build_fixture("S1")
    A = b.structure
    table = {(beta, w): v for w, beta, v in A.ops.items()}
    table[(BETA_E, ())] = {"e0": 1}
    deformed = AInftyStructure(A.module, Operations(table), GappedMonoid([BETA_E]), 2, A.unit, A.pairing)
    X = equivariant_extend(deformed, b.tstar, K_MAX)
    E = cartan_complex(b.tstar)
    ring = E.ring
    cw_dga = from_dga(E.D, {k: {n: ring.coerce(c) for n, c in v.items()} for k, v in b.product.items()},
                      b.integral, unit="e0")
    at_alpha0 = same_operations(specialize_alpha(X), deformed, K_MAX)
    at_T0 = same_operations(drop_deformation(X), cw_dga, K_MAX)
    ok = validate_structure(X, K_MAX).passed and not at_alpha0 and not at_T0
    return ok, f"alpha=0 diffs={len(at_alpha0)}, T=eps=0 diffs={len(at_T0)}"


def crit_even_lifting():
    E = cartan_complex(build_fixture("M6i").tstar)
    a1 = E.ring.alpha(1)
    lifts = lift_closed_basis(E)
    expected = [{"1": E.ring.one}, {"w": E.ring.one, "p": a1}]
    lift_ok = lifts == expected
    try:
        lift_closed_basis(cartan_complex(build_fixture("S1").tstar))
        s1_ok = False
    except LiftObstructed:
        s1_ok = True
    m6i = build_fixture("M6i").tstar
    rank = kunneth_check(m6i, m6i)
    ok = lift_ok and s1_ok and rank.passed and rank.info["rank"] == 4
    return ok, f"lifts={[E.module.format_vector(v) for v in lifts]} S1 obstructed={s1_ok} rank={rank.info['rank']}"


def crit_equivariant_retraction():
    b = build_fixture("M6i")
    M = b.tstar
    # the retraction lives on the complex; unit and pairing come from the M6 DGA
    r = equivariant_retraction(M, invariant_retraction(b.structure, M))
    check_retraction(r)
    curved = build_fixture("M6i-C").structure
    X = equivariant_extend(curved, M, K_MAX)
    T = transfer(X, r, k_max=K_MAX)
    C = T.A_can
    checks = {
        "flags": r.side_conditions and r.cyclic and r.unital,
        "structure": validate_structure(C, K_MAX).passed,
        "cyclic": validate_cyclic(C, k_max=K_MAX).passed,
    }
    bad = [k for k, v in checks.items() if not v]
    curvature = C.ops(()).get(build_fixture("M6i-C").notes["beta"], {})
    return not bad, (f"failing: {bad}" if bad else
                     f"flags set, A_can valid and cyclic, m_can_0 = {C.module.format_vector(curvature)}")


def crit_correction_lemma():
    A = build_fixture("M6").structure
    r0 = retraction_for(A)
    cols = {n: dict(r0.h.column(n)) for n in A.module.names}
    cols["a"] = {"1": 1}
    h_tilde = GradedMatrix.from_columns(A.module, A.module, Bidegree(-1, 0), cols)
    probe = check_retraction(type(r0)(r0.C, r0.H, r0.dprime, r0.Pi, r0.I, h_tilde))
    was_broken = {"h-h", "Pi-h"} <= probe.checks_failed()
    r = correct_side_conditions(r0.Pi, r0.I, h_tilde, r0.dprime, A.pairing, A.unit)
    expected = {"b": {"a": 1}, "q": {"p": -1}}
    got = {n: vclean(r.h.column(n)) for n in A.module.names if vclean(r.h.column(n))}
    ok = was_broken and r.side_conditions and r.cyclic and r.unital and got == expected
    return ok, f"input broken={was_broken}, output h={got}, cyclic={r.cyclic}, unital={r.unital}"


CRITERIA = [
    (1, "DGA soundness", crit_dga_soundness),
    (2, "odd-sign canary", crit_odd_sign_canary),
    (3, "HPL conclusions", crit_hpl_theorem),
    (4, "tree oracle", crit_tree_oracle),
    (5, "Massey witness", crit_massey),
    (6, "cyclic/unital HPL", crit_cyclic_unital),
    (7, "truncation stability", crit_truncation),
    (8, "equivariant square", crit_equivariant_square),
    (9, "even-cohomology lifting", crit_even_lifting),
    (10, "equivariant retraction", crit_equivariant_retraction),
    (11, "correction lemma", crit_correction_lemma),
]


def _run(fn):
    try:
        return fn()
    except Exception as exc:  # a crash is a FAIL line, not a missing line
        return False, f"{type(exc).__name__}: {exc}"


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, detail = _run(fn)
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d} ({title}): {detail}")
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, title, fn in CRITERIA:
        ok, detail = _run(fn)
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {number:2d} ({title}): {detail}")
    sys.exit(1 if failures else 0)
