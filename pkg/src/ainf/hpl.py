"""Retractions, side conditions, and homotopy transfer by the perturbation series."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import bar, linalg
from .ainfty import AInftyStructure, Operations, Pairing
from .complexes import split_complex
from .errors import (CorrectionDiverged, NoOrthogonalComplement, NotAHomotopy, NotAPerturbation,
                     SideConditionsMissing)
from .grading import Bidegree, GradedMatrix, GradedModule, vadd, vclean, vscale
from .morphisms import AInftyHomotopy, AInftyMorphism
from .novikov import ZERO
from .report import Report


@dataclass
class Retraction:
    C: GradedModule
    H: GradedModule
    dprime: GradedMatrix      # the twisted differential x -> (-1)^{codim x} dx
    Pi: GradedMatrix
    I: GradedMatrix
    h: GradedMatrix
    side_conditions: bool = False
    cyclic: bool = False
    unital: bool = False
    pairing: Pairing | None = None
    unit: str | None = None

    @property
    def P(self) -> GradedMatrix:
        return self.I @ self.Pi

    def h_value(self, name: str) -> dict:
        return dict(self.h.column(name))


# ---------------------------------------------------------------- checking

def _zero(M: GradedMatrix) -> bool:
    return M.is_zero()


def check_retraction(r: Retraction, dprime: GradedMatrix | None = None, pairing: Pairing | None = None,
                     unit: str | None = None) -> Report:
    """Retraction identities, side conditions, cyclicity and unitality; sets the flags on r."""
    rep = Report("retraction")
    d = dprime or r.dprime
    pairing = pairing or r.pairing
    unit = unit or r.unit
    C = r.C
    ident_C = GradedMatrix.identity(C)
    ident_H = GradedMatrix.identity(r.H)
    mod_fmt = C.format_vector

    def record(check, M: GradedMatrix, fmt):
        for n in M.source.names:
            col = vclean(M.column(n))
            if col:
                rep.add(check, None, None, (n,), fmt(col))

    record("Pi-d", r.Pi @ d, r.H.format_vector)
    record("d-I", d @ r.I, mod_fmt)
    record("Pi-I", r.Pi @ r.I - ident_H, r.H.format_vector)
    record("homotopy", d @ r.h + r.h @ d - (r.P - ident_C), mod_fmt)
    base_ok = rep.passed
    side = Report("side")
    for check, M, fmt in (("h-h", r.h @ r.h, mod_fmt), ("Pi-h", r.Pi @ r.h, r.H.format_vector),
                          ("h-I", r.h @ r.I, mod_fmt)):
        for n in M.source.names:
            col = vclean(M.column(n))
            if col:
                side.add(check, None, None, (n,), fmt(col))
    rep.violations.extend(side.violations)
    r.side_conditions = base_ok and side.passed
    r.cyclic = False
    if pairing is not None:
        cyc = Report("cyc")
        for x in C.names:
            hx = r.h.column(x)
            for y in C.names:
                hy = r.h.column(y)
                val = pairing.evaluate(hx, {y: 1}) + (-1) ** (C.degree(x).codim % 2) * pairing.evaluate({x: 1}, hy)
                if val:
                    cyc.add("cyclic", None, None, (x, y), str(val))
        rep.violations.extend(cyc.violations)
        r.cyclic = base_ok and cyc.passed
    r.unital = False
    if unit is not None:
        he = vclean(r.h.column(unit))
        if he:
            rep.add("unital", None, None, (unit,), mod_fmt(he))
        r.unital = base_ok and not he
    rep.info.update(side_conditions=r.side_conditions, cyclic=r.cyclic, unital=r.unital)
    return rep.finish()


def _homotopy_holds(d, Pi, I, h) -> bool:
    C = d.source
    return (d @ h + h @ d - (I @ Pi - GradedMatrix.identity(C))).is_zero()


# ---------------------------------------------------------------- construction

def _orthogonalize(sp, pairing: Pairing) -> None:
    """Make the complement O orthogonal to H and isotropic by adding H and exact vectors."""
    mod = sp.module
    deg = mod.element_degree
    H = sp.harmonic
    for idx, o in enumerate(sp.complement):
        g = deg(o)
        same = [j for j, v in enumerate(H) if deg(v) == g]
        if not same:
            continue
        rows = [[Fraction(pairing.evaluate(H[j], Hi)) for j in same] for Hi in H]
        rhs = [-Fraction(pairing.evaluate(o, Hi)) for Hi in H]
        sol = linalg.solve(rows, rhs, len(same))
        if sol is None:
            raise NoOrthogonalComplement("cohomology pairing is degenerate on a needed subspace")
        new = dict(o)
        for c, j in zip(sol, same):
            vadd(new, H[j], c)
        sp.complement[idx] = vclean(new)
    O, B = sp.complement, sp.exact
    unknowns = [(i, k) for i in range(len(O)) for k in range(len(B)) if deg(B[k]) == deg(O[i])]
    if not unknowns:
        return
    col = {u: n for n, u in enumerate(unknowns)}
    rows, rhs = [], []
    for i in range(len(O)):
        for j in range(len(O)):
            row = [Fraction(0)] * len(unknowns)
            for (a, k), n in col.items():
                if a == j:
                    row[n] += Fraction(pairing.evaluate(O[i], B[k]))
                if a == i:
                    row[n] += Fraction(pairing.evaluate(B[k], O[j]))
            rows.append(row)
            rhs.append(-Fraction(pairing.evaluate(O[i], O[j])))
    sol = linalg.solve(rows, rhs, len(unknowns))
    if sol is None:
        raise NoOrthogonalComplement("cannot make the complement isotropic")
    for (i, k), n in col.items():
        if sol[n]:
            vadd(O[i], B[k], sol[n])
    for i in range(len(O)):
        O[i] = vclean(O[i])


def retraction_from_dprime(dprime: GradedMatrix, pairing: Pairing | None = None,
                           unit: str | None = None) -> Retraction:
    C = dprime.source
    sp = split_complex(C, dprime, unit)
    if pairing is not None:
        _orthogonalize(sp, pairing)
        sp.exact = [vclean(dprime.apply(o)) for o in sp.complement]
    H = sp.cohomology_module()
    coords = sp.coordinates()
    Pi_cols, h_cols = {}, {}
    for n in C.names:
        Pi_cols[n] = {sp.labels[i]: c for i, c in coords[n]["h"].items()}
        hv: dict = {}
        for i, c in coords[n]["b"].items():
            vadd(hv, sp.complement[i], -c)
        h_cols[n] = hv
    Pi = GradedMatrix.from_columns(C, H, Bidegree(0, 0), Pi_cols)
    I = GradedMatrix.from_columns(H, C, Bidegree(0, 0), dict(zip(sp.labels, sp.harmonic)))
    h = GradedMatrix.from_columns(C, C, Bidegree(-1, 0), h_cols)
    r = Retraction(C, H, dprime, Pi, I, h, pairing=pairing, unit=unit)
    check_retraction(r)
    return r


def retraction_from_splitting(C: GradedModule, d: GradedMatrix, pairing: Pairing | None = None,
                              unit: str | None = None) -> Retraction:
    """Retraction of (C, d) built from C = H + d(C) + O; d is the untwisted differential."""
    if d.source != C:
        raise ValueError("differential does not act on C")
    return retraction_from_dprime(d.twisted(), pairing, unit)


def retraction_for(A: AInftyStructure, cyclic: bool = True, unital: bool = True) -> Retraction:
    """Retraction of (C, m_{1,0}) for a structure (m_{1,0} is already the twisted differential)."""
    return retraction_from_dprime(A.linear_part(), A.pairing if cyclic else None,
                                  A.unit if unital else None)


def correct_side_conditions(Pi: GradedMatrix, I: GradedMatrix, h0: GradedMatrix, dprime: GradedMatrix,
                            pairing: Pairing | None = None, unit: str | None = None,
                            rounds: int = 3) -> Retraction:
    """Replace h0 by Q h0 Q (Q = id - I Pi), then by s * h d' h until the side conditions hold."""
    if not _homotopy_holds(dprime, Pi, I, h0):
        raise NotAHomotopy("d'h + hd' != I Pi - id")
    C = dprime.source
    Q = GradedMatrix.identity(C) - I @ Pi
    h = Q @ h0 @ Q
    for _ in range(rounds):
        r = Retraction(C, Pi.target, dprime, Pi, I, h, pairing=pairing, unit=unit)
        check_retraction(r)
        if r.side_conditions:
            return r
        for s in (1, -1):
            trial = (h @ dprime @ h).scale(s)
            if _homotopy_holds(dprime, Pi, I, trial):
                h = trial
                break
        else:
            raise CorrectionDiverged("no sign makes h d' h a homotopy")
    r = Retraction(C, Pi.target, dprime, Pi, I, h, pairing=pairing, unit=unit)
    check_retraction(r)
    if not r.side_conditions:
        raise CorrectionDiverged(f"side conditions still fail after {rounds} rounds")
    return r


# ---------------------------------------------------------------- transfer

@dataclass
class Transfer:
    A_can: AInftyStructure
    I: AInftyMorphism
    Pi: AInftyMorphism
    h: AInftyHomotopy
    retraction: Retraction


class _Series:
    """Word operators of the perturbation series for one structure and retraction."""

    def __init__(self, A: AInftyStructure, r: Retraction, length_cap: int | None):
        self.A = A
        self.r = r
        self.C = A.module
        self.cutoff = A.cutoff
        self.length_cap = length_cap
        self.h_family = bar.linear_family(r.h)
        self.P = r.P
        self._suffix: dict = {}

    def cap(self, word_length: int) -> int:
        if self.length_cap is not None:
            return self.length_cap
        e_min = self.A.monoid.min_energy
        extra = int(self.cutoff // e_min) + 1 if e_min else 1
        return 3 * max(word_length, extra)

    def suffix(self, word: tuple) -> dict:
        hit = self._suffix.get(word)
        if hit is None:
            hit = bar.apply_linear(self.P, {(ZERO, word): 1})
            self._suffix[word] = hit
        return hit

    def perturbation(self, chain: Mapping) -> dict:
        return bar.extend_coderivation(self.C, self.C, self.A.ops, chain, 1, self.cutoff, skip_linear=True)

    def hhat(self, chain: Mapping) -> dict:
        return bar.extend_coderivation(self.C, self.C, self.h_family, chain, -1, self.cutoff,
                                       suffix=self.suffix)


def _collect(acc: dict, chain: Mapping, matrix: GradedMatrix | None = None) -> None:
    """Add pi_1 of the chain (optionally followed by a linear map) to acc: {beta: vector}."""
    for (beta, w), c in chain.items():
        if len(w) != 1:
            continue
        vec = matrix.column(w[0]) if matrix is not None else {w[0]: 1}
        if vec:
            vadd(acc.setdefault(beta, {}), vec, c)


def _clean(acc: dict) -> dict:
    return {b: v for b, v in ((b, vclean(v)) for b, v in acc.items()) if v}


def transfer(A: AInftyStructure, r: Retraction, k_max: int | None = None,
             length_cap: int | None = None) -> Transfer:
    """Minimal model on H by the operator series; every component is computed on demand."""
    if not (A.linear_part() - r.dprime).is_zero():
        raise NotAPerturbation("m_{1,0} differs from the twisted differential of the retraction")
    check_retraction(r)
    if not r.side_conditions:
        raise SideConditionsMissing("retraction must satisfy h^2 = 0, Pi h = 0, h I = 0")
    s = _Series(A, r, length_cap)
    H = r.H

    def m_can(word):
        acc: dict = {}
        w = bar.apply_linear(r.I, {(ZERO, word): 1})
        for _ in range(s.cap(len(word)) + 1):
            u = s.perturbation(w)
            _collect(acc, u, r.Pi)
            w = s.hhat(u)
            if not w:
                break
        return _clean(acc)

    def incl(word):
        acc: dict = {}
        w = bar.apply_linear(r.I, {(ZERO, word): 1})
        for _ in range(s.cap(len(word)) + 1):
            _collect(acc, w)
            w = s.hhat(s.perturbation(w))
            if not w:
                break
        return _clean(acc)

    def proj(word):
        acc: dict = {}
        w = {(ZERO, word): 1}
        for _ in range(s.cap(len(word)) + 1):
            _collect(acc, w, r.Pi)
            w = s.perturbation(s.hhat(w))
            if not w:
                break
        return _clean(acc)

    def homot(word):
        acc: dict = {}
        w = {(ZERO, word): 1}
        for _ in range(s.cap(len(word)) + 1):
            v = s.hhat(w)
            _collect(acc, v)
            w = s.perturbation(v)
            if not w:
                break
        return _clean(acc)

    unit = None
    if A.unit is not None:
        img = vclean(r.Pi.column(A.unit))
        if len(img) == 1 and next(iter(img.values())) == 1:
            unit = next(iter(img))
    pairing = None
    if A.pairing is not None:
        entries = {}
        for u in H.names:
            for v in H.names:
                val = A.pairing.evaluate(r.I.column(u), r.I.column(v))
                if val:
                    entries[(u, v)] = val
        pairing = Pairing(H, A.pairing.shift, entries)
    A_can = AInftyStructure(H, Operations(compute=m_can), A.monoid, A.cutoff, unit, pairing,
                            f"{A.name}-can")
    I_mor = AInftyMorphism(A_can, A, Operations(compute=incl), "I")
    Pi_mor = AInftyMorphism(A, A_can, Operations(compute=proj), "Pi")
    from .morphisms import compose
    h_hom = AInftyHomotopy(AInftyMorphism.identity(A), compose(I_mor, Pi_mor), Operations(compute=homot), "h")
    if k_max is not None:
        A_can = A_can.materialize(k_max)
        I_mor = AInftyMorphism(A_can, A, I_mor.ops, "I")
        Pi_mor = AInftyMorphism(A, A_can, Pi_mor.ops, "Pi")
        h_hom = AInftyHomotopy(AInftyMorphism.identity(A), compose(I_mor, Pi_mor), h_hom.ops, "h")
    return Transfer(A_can, I_mor, Pi_mor, h_hom, r)
