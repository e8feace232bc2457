"""T*-modules, the Cartan model, equivariant extension, and equivariant retractions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Mapping

from . import bar, linalg
from .ainfty import AInftyStructure, Operations, Pairing
from .complexes import has_even_cohomology, split_complex
from .errors import LiftObstructed, NotInvariant, NotInvariantClosed
from .grading import (Bidegree, CoefficientRing, GradedMatrix, GradedModule, Poly, parity_sign,
                      unipotent_inverse, vadd, vclean, vscale)
from .hpl import Retraction, check_retraction, correct_side_conditions, retraction_from_dprime, transfer
from .novikov import ZERO
from .report import Report

_EMPTY: dict = {}


class TStarModule:
    """A complex (C, d) with contractions iota_a (degree -1) and Lie derivatives L_a (degree 0)."""

    def __init__(self, d: GradedMatrix, iota: list, lie: list | None = None):
        self.d = d
        self.module = d.source
        self.iota = list(iota)
        if lie is None:
            lie = [d @ i + i @ d for i in self.iota]
        self.lie = list(lie)
        if len(self.lie) != len(self.iota):
            raise ValueError("need one Lie operator per contraction")

    @property
    def n_alphas(self) -> int:
        return len(self.iota)

    @classmethod
    def trivial(cls, d: GradedMatrix, n: int = 1) -> "TStarModule":
        mod = d.source
        zero = GradedMatrix.zero(mod, mod, Bidegree(-1, 0))
        return cls(d, [zero] * n, [GradedMatrix.zero(mod, mod)] * n)

    def iota_prime(self, a: int) -> GradedMatrix:
        """x -> (-1)^{codim x} iota_a x."""
        return self.iota[a].twisted()


def _record(rep: Report, check: str, M: GradedMatrix) -> None:
    for n in M.source.names:
        col = vclean(M.column(n))
        if col:
            rep.add(check, None, None, (n,), M.target.format_vector(col))


def check_tstar(M: TStarModule) -> Report:
    rep = Report("tstar")
    d = M.d
    _record(rep, "d-squared", d @ d)
    n = M.n_alphas
    for a in range(n):
        _record(rep, f"cartan-{a + 1}", d @ M.iota[a] + M.iota[a] @ d - M.lie[a])
        _record(rep, f"lie-d-{a + 1}", M.lie[a] @ d - d @ M.lie[a])
        for b in range(n):
            _record(rep, f"iota-iota-{a + 1}{b + 1}", M.iota[a] @ M.iota[b] + M.iota[b] @ M.iota[a])
            _record(rep, f"lie-iota-{a + 1}{b + 1}", M.lie[a] @ M.iota[b] - M.iota[b] @ M.lie[a])
            _record(rep, f"lie-lie-{a + 1}{b + 1}", M.lie[a] @ M.lie[b] - M.lie[b] @ M.lie[a])
    return rep.finish()


# ---------------------------------------------------------------- invariants

@dataclass
class InvariantPart:
    module: GradedModule                 # basis of the joint kernel of the L_a
    vectors: dict                        # invariant name -> vector in the ambient module
    coordinate: bool                     # every invariant basis vector is an ambient basis element

    def express(self, vec: Mapping) -> dict:
        """Coordinates of an ambient vector in the invariant basis (NotInvariantClosed if outside)."""
        if self.coordinate:
            for n in vec:
                if n not in self.module:
                    raise NotInvariantClosed(f"{n} is not invariant")
            return dict(vec)
        out: dict = {}
        names = list(self.vectors)
        ambient = sorted({n for v in self.vectors.values() for n in v} | set(vec))
        cols = [[Fraction(self.vectors[m].get(a, 0)) for m in names] for a in ambient]
        sol = linalg.solve(cols, [Fraction(vec.get(a, 0)) for a in ambient], len(names))
        if sol is None:
            raise NotInvariantClosed("image leaves the invariant subspace")
        for m, c in zip(names, sol):
            if c:
                out[m] = c
        return out


def invariant_subcomplex(M: TStarModule) -> InvariantPart:
    mod = M.module
    vectors: dict = {}
    coordinate = True
    counter = 0
    basis = []
    for g in mod.degrees():
        names = mod.names_of_degree(g)
        rows = []
        for L in M.lie:
            for r in mod.names:
                rows.append([Fraction(L.entry(r, c)) for c in names])
        rows = [r for r in rows if any(r)]
        kernel = linalg.nullspace(rows, len(names)) if rows else \
            [[Fraction(int(i == j)) for i in range(len(names))] for j in range(len(names))]
        for v in kernel:
            vec = vclean(dict(zip(names, v)))
            if len(vec) == 1 and next(iter(vec.values())) == 1:
                name = next(iter(vec))
            else:
                coordinate = False
                counter += 1
                name = f"inv{counter}"
            vectors[name] = vec
            basis.append((name, g))
    order = {n: i for i, n in enumerate(mod.names)}
    basis.sort(key=lambda t: order.get(t[0], len(order)))
    return InvariantPart(GradedModule(basis), vectors, coordinate)


def _restrict(inv: InvariantPart, T: GradedMatrix) -> GradedMatrix:
    cols = {n: inv.express(T.apply(v)) for n, v in inv.vectors.items()}
    return GradedMatrix.from_columns(inv.module, inv.module, T.degree, cols)


@dataclass
class EquivariantComplex:
    tstar: TStarModule
    invariant: InvariantPart
    module: GradedModule                 # invariant basis over Q[alpha]
    d: GradedMatrix                      # restricted d, over Q[alpha]
    iota: list                           # restricted iota_a, over Q[alpha]
    D: GradedMatrix                      # d - sum alpha_a iota_a
    ring: CoefficientRing = field(default=None)

    @property
    def Dprime(self) -> GradedMatrix:
        return self.D.twisted()


def cartan_complex(M: TStarModule) -> EquivariantComplex:
    inv = invariant_subcomplex(M)
    n = M.n_alphas
    ring = CoefficientRing(n)
    d_inv = _restrict(inv, M.d)
    iota_inv = [_restrict(inv, i) for i in M.iota]
    mod = inv.module.with_ring(ring)
    lift = lambda T: T.map_coefficients(ring.coerce, mod, mod)
    d_r = lift(d_inv)
    iota_r = [lift(i) for i in iota_inv]
    entries = dict(d_r.entries)
    for a, i in enumerate(iota_r, start=1):
        for key, c in i.entries.items():
            entries[key] = entries.get(key, ring.zero) - ring.alpha(a) * c
    D = GradedMatrix(mod, mod, Bidegree(1, 0), entries)
    assert (D @ D).is_zero(), "D^2 != 0 on invariants"
    return EquivariantComplex(M, inv, mod, d_r, iota_r, D, ring)


# ---------------------------------------------------------------- coderivations

class Coderivation:
    """An (id, id)-coderivation given by its components, of a fixed degree."""

    def __init__(self, module: GradedModule, family, degree: int, cutoff=0, name: str = ""):
        self.module = module
        self.family = family
        self.degree = degree
        self.cutoff = Fraction(cutoff)
        self.name = name

    @classmethod
    def linear(cls, matrix: GradedMatrix, degree: int | None = None, name: str = "") -> "Coderivation":
        deg = matrix.degree.codim if degree is None else degree
        return cls(matrix.source, bar.linear_family(matrix), deg, 0, name)

    @classmethod
    def of_structure(cls, A: AInftyStructure) -> "Coderivation":
        return cls(A.module, A.ops, 1, A.cutoff, A.name)

    def apply(self, chain: Mapping) -> dict:
        return bar.extend_coderivation(self.module, self.module, self.family, chain, self.degree, self.cutoff)

    def scaled(self, c) -> "Coderivation":
        fam = self.family

        def scaled_family(word):
            return {b: vscale(v, c) for b, v in fam(word).items()}

        return Coderivation(self.module, scaled_family, self.degree, self.cutoff, f"{c}*{self.name}")

    def __add__(self, other: "Coderivation") -> "Coderivation":
        f1, f2 = self.family, other.family

        def fam(word):
            out = {b: dict(v) for b, v in f1(word).items()}
            for b, v in f2(word).items():
                vadd(out.setdefault(b, {}), v)
            return {b: vclean(v) for b, v in out.items() if vclean(v)}

        return Coderivation(self.module, fam, self.degree, min(self.cutoff, other.cutoff),
                            f"{self.name}+{other.name}")


def bracket(h1: Coderivation, h2: Coderivation) -> Coderivation:
    """Graded commutator h1 h2 - (-1)^{d1 d2} h2 h1, as a component family."""
    cutoff = min(h1.cutoff, h2.cutoff)
    sign = parity_sign(h1.degree * h2.degree)
    cache: dict = {}

    def fam(word):
        hit = cache.get(word)
        if hit is None:
            chain = bar.word_chain(word)
            one = bar.project_family(h1.family, h2.apply(chain), h1.degree, cutoff)
            two = bar.project_family(h2.family, h1.apply(chain), h2.degree, cutoff)
            out = {b: dict(v) for b, v in one.items()}
            for b, v in two.items():
                vadd(out.setdefault(b, {}), v, -sign)
            hit = {b: vclean(v) for b, v in out.items() if vclean(v)}
            cache[word] = hit
        return hit

    return Coderivation(h1.module, fam, h1.degree + h2.degree, cutoff, f"[{h1.name},{h2.name}]")


def coderivations_agree(h1: Coderivation, h2: Coderivation, k_max: int) -> list:
    """Words (length <= k_max) on which the two component families differ."""
    bad = []
    for k in range(k_max + 1):
        for w in bar.basis_words(h1.module, k):
            a, b = h1.family(w), h2.family(w)
            keys = set(a) | set(b)
            if any(vclean(vadd(dict(a.get(x, _EMPTY)), b.get(x, _EMPTY), -1)) for x in keys):
                bad.append(w)
    return bad


def jacobi_residual(h1: Coderivation, h2: Coderivation, h3: Coderivation, k_max: int) -> list:
    """Words where the graded Jacobi sum fails to vanish."""
    d1, d2, d3 = h1.degree, h2.degree, h3.degree
    terms = [bracket(h1, bracket(h2, h3)).scaled(parity_sign(d1 * d3)),
             bracket(h2, bracket(h3, h1)).scaled(parity_sign(d1 * d2)),
             bracket(h3, bracket(h1, h2)).scaled(parity_sign(d2 * d3))]
    total = terms[0] + terms[1] + terms[2]
    zero = Coderivation(h1.module, lambda w: _EMPTY, total.degree)
    return coderivations_agree(total, zero, k_max)


# ---------------------------------------------------------------- invariance and extension

def check_invariance(A: AInftyStructure, M: TStarModule, k_max: int = 4) -> Report:
    """iota'_a m(x) = sum_i (-1)^{1 + mu + sum_{j<i}(codim x_j - 1)} m(.., iota'_a x_i, ..)."""
    rep = Report("invariance")
    mod = A.module
    for a in range(M.n_alphas):
        ip = M.iota_prime(a)
        for k in range(k_max + 1):
            for word in bar.basis_words(mod, k):
                vals = A.ops(word)
                lhs = {b: ip.apply(v) for b, v in vals.items() if not (k == 1 and b == ZERO)}
                rhs: dict = {}
                prefix = 0
                for i, x in enumerate(word):
                    for y, cy in ip.column(x).items():
                        for b, v in A.ops(word[:i] + (y,) + word[i + 1:]).items():
                            if k == 1 and b == ZERO:
                                continue
                            vadd(rhs.setdefault(b, {}), v, cy * parity_sign(1 + b.mu + prefix))
                    prefix += mod.degree(x).codim - 1
                for b in sorted(set(lhs) | set(rhs)):
                    diff = vclean(vadd(dict(lhs.get(b, _EMPTY)), rhs.get(b, _EMPTY), -1))
                    if diff:
                        rep.add(f"invariance-{a + 1}", k, b, word, mod.format_vector(diff))
    return rep.finish()


def _arities(A: AInftyStructure, k_max: int) -> int:
    if A.ops.lazy:
        return k_max
    return max((len(w) for w, _, _ in A.ops.items()), default=0)


def equivariant_extend(A: AInftyStructure, M: TStarModule, k_max: int = 4) -> AInftyStructure:
    """Q[alpha]-linear extension on invariants, with m_{1,0} replaced by the twisted Cartan differential."""
    inv_rep = check_invariance(A, M, k_max)
    if not inv_rep.passed:
        raise NotInvariant(f"structure is not invariant: {inv_rep.violations[0]}")
    E = cartan_complex(M)
    inv = E.invariant
    ring = E.ring
    mod = E.module
    if A.unit is not None and A.unit not in inv.module:
        raise NotInvariant("unit is not invariant")
    table: dict = {}
    top = _arities(A, k_max)
    for k in range(top + 1):
        for word in cartesian(inv.module.names, repeat=k):
            expanded = {(): Fraction(1)}
            for x in word:
                expanded = {w + (y,): c * cy for w, c in expanded.items() for y, cy in inv.vectors[x].items()}
            acc: dict = {}
            for w, c in expanded.items():
                for b, v in A.ops(w).items():
                    if k == 1 and b == ZERO:
                        continue
                    vadd(acc.setdefault(b, {}), v, c)
            for b, v in acc.items():
                v = vclean(v)
                if v:
                    table[(b, word)] = {n: ring.coerce(c) for n, c in inv.express(v).items()}
    for n, col in E.Dprime.cols.items():
        if col:
            table[(ZERO, (n,))] = dict(col)
    pairing = None if A.pairing is None else restrict_pairing(inv, A.pairing, mod)
    return AInftyStructure(mod, Operations(table), A.monoid, A.cutoff, A.unit, pairing, f"{A.name}-CW")


def restrict_pairing(inv: InvariantPart, pairing: Pairing, module: GradedModule | None = None) -> Pairing:
    entries = {}
    for u in inv.module.names:
        for v in inv.module.names:
            val = pairing.evaluate(inv.vectors[u], inv.vectors[v])
            if val:
                entries[(u, v)] = val
    return Pairing(module or inv.module, pairing.shift, entries)


def specialize_alpha(A: AInftyStructure) -> AInftyStructure:
    """Set every alpha to zero (the structure over the rationals)."""
    ring = A.ring
    mod0 = A.module.with_ring(CoefficientRing(0))
    table = {}
    for w, b, v in A.ops.items():
        v0 = vclean({n: ring.specialize(c) for n, c in v.items()})
        if v0:
            table[(b, w)] = v0
    pairing = None
    if A.pairing is not None:
        pairing = Pairing(mod0, A.pairing.shift, {k: ring.specialize(c) for k, c in A.pairing.entries.items()})
    return AInftyStructure(mod0, Operations(table), A.monoid, A.cutoff, A.unit, pairing, f"{A.name}|a=0")


def drop_deformation(A: AInftyStructure) -> AInftyStructure:
    """Set T = eps = 0: keep only the beta = 0 components."""
    table = {(b, w): v for w, b, v in A.ops.items() if b == ZERO}
    return AInftyStructure(A.module, Operations(table), type(A.monoid)(), 0, A.unit, A.pairing,
                           f"{A.name}|T=0")


# ---------------------------------------------------------------- even cohomology and lifts

def check_even_cohomology(C: GradedModule, d: GradedMatrix) -> bool:
    return has_even_cohomology(C, d)


def _monomials(n: int, total: int):
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _monomials(n - 1, total - first):
            yield (first,) + rest


def _alpha_power(ring: CoefficientRing, J: tuple) -> Poly:
    return Poly(ring.num_alphas, {J: Fraction(1)})


def lift_closed_basis(E: EquivariantComplex, classes: list | None = None) -> list:
    """D-closed lifts sigma_i = gamma_i + sum_{|J|>=1} alpha^J sigma_{i,J}, solved order by order."""
    mod0 = E.invariant.module
    d0 = E.d.map_coefficients(E.ring.specialize, mod0, mod0)
    iota0 = [i.map_coefficients(E.ring.specialize, mod0, mod0) for i in E.iota]
    if classes is None:
        classes = split_complex(mod0, d0).harmonic
    n = E.ring.num_alphas
    codims = [g.codim for g in mod0.degrees()]
    lo = min(codims, default=0)
    lifts = []
    for gamma in classes:
        g = mod0.element_degree(gamma)
        parts = {(0,) * n: dict(gamma)}
        t = 1
        while g.codim - 2 * t >= lo - 1:
            target_deg = g.shift(-2 * t)
            names = mod0.names_of_degree(target_deg)
            for J in _monomials(n, t):
                rhs: dict = {}
                for a in range(n):
                    if J[a] == 0:
                        continue
                    prev = tuple(J[b] - (1 if b == a else 0) for b in range(n))
                    vadd(rhs, iota0[a].apply(parts.get(prev, _EMPTY)))
                rhs = vclean(rhs)
                if not rhs:
                    continue
                out_names = mod0.names_of_degree(target_deg.shift(1))
                mat = [[Fraction(d0.entry(r, c)) for c in names] for r in out_names]
                sol = linalg.solve(mat, [Fraction(rhs.get(r, 0)) for r in out_names], len(names)) if names else None
                if sol is None or any(r not in out_names for r in rhs):
                    raise LiftObstructed(f"order-{t} lift of {mod0.format_vector(gamma)} is obstructed",
                                         degree=target_deg.shift(1))
                parts[J] = vclean(dict(zip(names, sol)))
            t += 1
        sigma: dict = {}
        for J, vec in parts.items():
            mono = _alpha_power(E.ring, J)
            for nm, c in vec.items():
                sigma[nm] = sigma.get(nm, 0) + mono * c
        sigma = vclean(sigma)
        assert not vclean(E.D.apply(sigma)), "lift is not D-closed"
        lifts.append(sigma)
    _check_free(E, classes)
    return lifts


def _cw_degree_basis(E: EquivariantComplex, deg: Bidegree) -> list:
    mod0 = E.invariant.module
    out = []
    n = E.ring.num_alphas
    for g in mod0.degrees():
        diff = deg.codim - g.codim
        if diff < 0 or diff % 2 or g.ls != deg.ls:
            continue
        for J in _monomials(n, diff // 2):
            for name in mod0.names_of_degree(g):
                out.append((J, name))
    return out


def _check_free(E: EquivariantComplex, classes: list) -> None:
    """Dimension of H^CW in each total degree equals the number of alpha-monomial multiples of the classes."""
    mod0 = E.invariant.module
    codims = [g.codim for g in mod0.degrees()]
    if not codims:
        return
    n = E.ring.num_alphas
    hi = max(codims) + 2
    for ls in (0, 1):
        for c in range(min(codims), hi + 1):
            deg = Bidegree(c, ls)
            src = _cw_degree_basis(E, deg)
            tgt = _cw_degree_basis(E, deg.shift(1))
            prev = _cw_degree_basis(E, deg.shift(-1))
            rank_out = linalg.rank(_cw_matrix(E, src, tgt)) if src and tgt else 0
            rank_in = linalg.rank(_cw_matrix(E, prev, src)) if prev and src else 0
            dim_h = len(src) - rank_out - rank_in
            expected = 0
            for gamma in classes:
                gg = mod0.element_degree(gamma)
                diff = c - gg.codim
                if gg.ls == ls and diff >= 0 and diff % 2 == 0:
                    expected += sum(1 for _ in _monomials(n, diff // 2))
            if dim_h != expected:
                raise LiftObstructed(f"equivariant cohomology has rank {dim_h} in degree {deg}, "
                                     f"free module predicts {expected}", degree=deg)


def _cw_matrix(E: EquivariantComplex, src: list, tgt: list) -> list:
    index = {t: i for i, t in enumerate(tgt)}
    rows = [[Fraction(0)] * len(src) for _ in tgt]
    for j, (J, name) in enumerate(src):
        for out, c in E.D.column(name).items():
            terms = c.terms if isinstance(c, Poly) else {(0,) * E.ring.num_alphas: Fraction(c)}
            for K, coeff in terms.items():
                key = (tuple(a + b for a, b in zip(J, K)), out)
                if key in index:
                    rows[index[key]][j] += coeff
    return rows


def equivariant_cohomology_rank(E: EquivariantComplex) -> int:
    return len(lift_closed_basis(E))


def normalize_basis(E: EquivariantComplex, lifts: list, pairing: Pairing) -> list:
    """Adjust the second half so that <omega_i, omega_{N+j}> = delta_ij exactly."""
    if len(lifts) % 2:
        raise ValueError("lifts must split into two halves of equal size")
    N = len(lifts) // 2
    mod = E.module
    p, q = pairing.shift
    first, second = lifts[:N], lifts[N:]
    degs = [mod.element_degree(v) for v in lifts]
    for i in range(N):
        if degs[i] + degs[N + i] != Bidegree(p, q):
            raise ValueError("lift halves are not dual in degree")
    # <omega_i, omega_{N+j}> has alpha-degree (p - c_i - c_{N+j}) / 2; index j sits in degree -c_{N+j}
    idx = GradedModule([(f"k{j}", -degs[N + j]) for j in range(N)], mod.ring)
    entries = {}
    for i in range(N):
        for j in range(N):
            val = pairing.evaluate(first[i], second[j])
            if val:
                entries[(f"k{i}", f"k{j}")] = val
    gram = GradedMatrix(idx, idx, Bidegree(0, 0), entries)
    inv = unipotent_inverse(gram)
    out = list(first)
    for j in range(N):
        new: dict = {}
        for l in range(N):
            c = inv.entry(f"k{l}", f"k{j}")
            if c:
                vadd(new, second[l], c)
        out.append(vclean(new))
    return out


# ---------------------------------------------------------------- retraction

def _series(start: GradedMatrix, step: GradedMatrix, limit: int, left: bool = False) -> GradedMatrix:
    total = start
    term = start
    for _ in range(limit):
        term = (step @ term) if left else (term @ step)
        if term.is_zero():
            break
        total = total + term
    return total


def equivariant_retraction(M: TStarModule, base: Retraction, pairing: Pairing | None = None,
                           unit: str | None = None) -> Retraction:
    """Retraction of (C^CW, D') from a cyclic unital retraction of the invariant complex."""
    E = cartan_complex(M)
    mod0 = E.invariant.module
    d0 = E.d.map_coefficients(E.ring.specialize, mod0, mod0)
    if not check_even_cohomology(mod0, d0):
        raise LiftObstructed("even cohomology fails", degree=None)
    ring = E.ring
    C = E.module
    H = base.H.with_ring(ring)
    lift = lambda T, s, t: T.map_coefficients(ring.coerce, s, t)
    h0 = lift(base.h, C, C)
    I0 = lift(base.I, H, C)
    Pi0 = lift(base.Pi, C, H)
    Dp = E.Dprime
    delta = Dp - E.d.twisted()
    limit = len(C) + 1
    dh = delta @ h0
    h = _series(h0, dh, limit)
    Pi = _series(Pi0, dh, limit)
    I = _series(I0, h0 @ delta, limit, left=True)
    h = GradedMatrix(C, C, Bidegree(-1, 0), h.entries)
    Pi = GradedMatrix(C, H, Bidegree(0, 0), Pi.entries)
    I = GradedMatrix(H, C, Bidegree(0, 0), I.entries)
    if pairing is None and base.pairing is not None:
        pairing = base.pairing.with_module(C)
    unit = unit or base.unit
    lifts = lift_closed_basis(E, [base.I.column(n) for n in base.H.names])
    for n, sigma in zip(base.H.names, lifts):
        col = I.column(n)
        # both are D-closed lifts of the same class; they must agree modulo D-exact terms
        if vclean(E.D.apply(col)):
            raise LiftObstructed(f"series inclusion of {n} is not closed", degree=None)
    r = correct_side_conditions(Pi, I, h, Dp, pairing, unit)
    check_retraction(r)
    return r


# ---------------------------------------------------------------- tensor products

def tensor_tstar(M1: TStarModule, M2: TStarModule) -> TStarModule:
    m1, m2 = M1.module, M2.module
    basis = [(f"{x}|{y}", m1.degree(x) + m2.degree(y)) for x in m1.names for y in m2.names]
    mod = GradedModule(basis)

    def left(T: GradedMatrix, sign_by_codim: bool):
        cols = {}
        for x in m1.names:
            for y in m2.names:
                cols[f"{x}|{y}"] = {f"{u}|{y}": c for u, c in T.column(x).items()}
        return cols

    def right(T: GradedMatrix, twisted: bool):
        cols = {}
        for x in m1.names:
            s = parity_sign(m1.degree(x).codim) if twisted else 1
            for y in m2.names:
                cols[f"{x}|{y}"] = {f"{x}|{v}": s * c for v, c in T.column(y).items()}
        return cols

    dcols = left(M1.d, False)
    for k, v in right(M2.d, True).items():
        dcols[k] = vadd(dict(dcols.get(k, {})), v)
    d = GradedMatrix.from_columns(mod, mod, Bidegree(1, 0), dcols)
    iota = [GradedMatrix.from_columns(mod, mod, Bidegree(-1, 0), left(i, False)) for i in M1.iota]
    iota += [GradedMatrix.from_columns(mod, mod, Bidegree(-1, 0), right(i, True)) for i in M2.iota]
    lie = [GradedMatrix.from_columns(mod, mod, Bidegree(0, 0), left(L, False)) for L in M1.lie]
    lie += [GradedMatrix.from_columns(mod, mod, Bidegree(0, 0), right(L, False)) for L in M2.lie]
    return TStarModule(d, iota, lie)


def kunneth_check(M1: TStarModule, M2: TStarModule) -> Report:
    rep = Report("kunneth")
    ranks = []
    for M in (M1, M2):
        E = cartan_complex(M)
        mod0 = E.invariant.module
        d0 = E.d.map_coefficients(E.ring.specialize, mod0, mod0)
        if not check_even_cohomology(mod0, d0):
            raise LiftObstructed("factor without even cohomology", degree=None)
        ranks.append(len(lift_closed_basis(E)))
    T = tensor_tstar(M1, M2)
    tst = check_tstar(T)
    if not tst.passed:
        rep.violations.extend(tst.violations)
    rank = len(lift_closed_basis(cartan_complex(T)))
    rep.info.update(rank_left=ranks[0], rank_right=ranks[1], rank=rank)
    if rank != ranks[0] * ranks[1]:
        rep.add("rank", None, None, (), f"{rank} != {ranks[0]} * {ranks[1]}")
    return rep.finish()


# ---------------------------------------------------------------- pipeline

@dataclass
class EquivariantRun:
    extended: AInftyStructure
    retraction: Retraction
    transfer: object


def invariant_retraction(A: AInftyStructure, M: TStarModule) -> Retraction:
    """Cyclic unital retraction of the invariant complex over the rationals."""
    inv = invariant_subcomplex(M)
    d0 = _restrict(inv, M.d)
    pairing = None if A.pairing is None else restrict_pairing(inv, A.pairing)
    unit = A.unit if A.unit in inv.module else None
    return retraction_from_dprime(d0.twisted(), pairing, unit)


def equivariant_pipeline(A: AInftyStructure, M: TStarModule, k_max: int = 4,
                         length_cap: int | None = None) -> EquivariantRun:
    """Extend, build the equivariant retraction, and transfer."""
    X = equivariant_extend(A, M, k_max)
    base = invariant_retraction(A, M)
    r = equivariant_retraction(M, base)
    return EquivariantRun(X, r, transfer(X, r, k_max=k_max, length_cap=length_cap))
