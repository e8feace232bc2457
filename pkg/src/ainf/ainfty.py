"""Twisted A-infinity structures, the DGA adapter, and their validators."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from . import bar, linalg
from .complexes import split_complex
from .errors import (CutoffExceeded, LeibnizFailure, NotADifferential, NotAField, NotAssociative,
                     StructureMismatch)
from .grading import (Bidegree, CoefficientRing, GradedMatrix, GradedModule, Poly, parity_sign,
                      vadd, vclean, vscale)
from .novikov import ZERO, GappedMonoid, MonoidElement
from .report import Report

_EMPTY: dict = {}


class Operations:
    """Component family word -> {beta: vector}.

    Either a finite table (the usual case) or a lazily evaluated rule with a
    per-word cache, used for transferred and gauge-transformed structures.
    """

    def __init__(self, table: Mapping | None = None, compute: Callable | None = None):
        self.compute = compute
        self.table: dict = {}
        if table:
            for key, vec in table.items():
                beta, word = key
                vec = vclean(vec)
                if vec:
                    self.table.setdefault(tuple(word), {})[beta] = vec
        self._cache: dict = {}

    @property
    def lazy(self) -> bool:
        return self.compute is not None

    def __call__(self, word: tuple) -> dict:
        if self.compute is None:
            return self.table.get(word, _EMPTY)
        hit = self._cache.get(word)
        if hit is None:
            hit = {b: v for b, v in self.compute(word).items() if v}
            self._cache[word] = hit
        return hit

    def items(self):
        """Stored (word, beta, vector) triples in a deterministic order."""
        for word in sorted(self.table, key=lambda w: (len(w), w)):
            for beta in sorted(self.table[word]):
                yield word, beta, self.table[word][beta]


class Pairing:
    """Bilinear pairing C x C -> R of degree shift (p, q)."""

    def __init__(self, module: GradedModule, shift: tuple, entries: Mapping):
        self.module = module
        self.shift = (int(shift[0]), int(shift[1]) % 2)
        ring = module.ring
        self.entries = {k: ring.coerce(c) for k, c in entries.items() if c}

    def value(self, u: str, v: str):
        return self.entries.get((u, v), 0)

    def evaluate(self, x: Mapping, y: Mapping):
        total = 0
        for u, cu in x.items():
            for v, cv in y.items():
                c = self.entries.get((u, v))
                if c:
                    total = total + cu * cv * c
        return total

    def gram(self, rows: list, cols: list) -> list:
        return [[self.evaluate(r, c) for c in cols] for r in rows]

    def with_module(self, module: GradedModule) -> "Pairing":
        return Pairing(module, self.shift, self.entries)


class AInftyStructure:
    def __init__(self, module: GradedModule, ops: Operations | Mapping, monoid: GappedMonoid | None = None,
                 cutoff=0, unit: str | None = None, pairing: Pairing | None = None, name: str = ""):
        self.module = module
        self.ops = ops if isinstance(ops, Operations) else Operations(ops)
        self.monoid = monoid or GappedMonoid()
        self.cutoff = Fraction(cutoff)
        self.unit = unit
        self.pairing = pairing
        self.name = name

    @property
    def ring(self) -> CoefficientRing:
        return self.module.ring

    def component(self, word) -> dict:
        return self.ops(tuple(word))

    def m(self, k: int, beta: MonoidElement, word) -> dict:
        word = tuple(word)
        if len(word) != k:
            raise ValueError("arity and input length differ")
        return dict(self.ops(word).get(beta, _EMPTY))

    def output_degree(self, beta: MonoidElement, word) -> Bidegree:
        g = Bidegree(2 - len(word) - beta.mu, beta.mu)
        for x in word:
            g = g + self.module.degree(x)
        return g

    def linear_part(self) -> GradedMatrix:
        cols = {n: self.ops((n,)).get(ZERO, _EMPTY) for n in self.module.names}
        return GradedMatrix.from_columns(self.module, self.module, Bidegree(1, 0), cols)

    def entries(self, k_max: int) -> list:
        """All nonzero (word, beta, vector) with arity <= k_max, in deterministic order."""
        if not self.ops.lazy:
            return [t for t in self.ops.items() if len(t[0]) <= k_max]
        out = []
        for k in range(k_max + 1):
            for word in bar.basis_words(self.module, k):
                for beta, vec in sorted(self.ops(word).items()):
                    out.append((word, beta, vec))
        return out

    def materialize(self, k_max: int) -> "AInftyStructure":
        table = {(beta, word): vec for word, beta, vec in self.entries(k_max)}
        return AInftyStructure(self.module, Operations(table), self.monoid, self.cutoff, self.unit,
                               self.pairing, self.name)

    def replace(self, **changes) -> "AInftyStructure":
        fields = dict(module=self.module, ops=self.ops, monoid=self.monoid, cutoff=self.cutoff,
                      unit=self.unit, pairing=self.pairing, name=self.name)
        fields.update(changes)
        return AInftyStructure(**fields)

    def __repr__(self):
        return f"AInftyStructure({self.name or '?'}, dim={len(self.module)}, cutoff={self.cutoff})"


# ---------------------------------------------------------------- construction

def _check_degree(module: GradedModule, vec: Mapping, expected: Bidegree, what: str) -> None:
    got = module.element_degree(vec)
    if got is not None and got != expected:
        raise ValueError(f"{what} has degree {got}, expected {expected}")


def from_dga(d: GradedMatrix, product: Mapping, integral: Mapping | None = None, unit: str | None = None,
             monoid: GappedMonoid | None = None, cutoff=0, extra: Mapping | None = None,
             name: str = "") -> AInftyStructure:
    """A-infinity structure of a DGA (C, d, wedge) with optional integration functional.

    ``product`` maps (x, y) to the vector x wedge y; ``extra`` adds deformation
    components {(beta, word): vector} on top.
    """
    module = d.source
    ring = module.ring
    names = module.names

    def mul(u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for x, cx in u.items():
            for y, cy in v.items():
                p = product.get((x, y))
                if p:
                    vadd(out, p, cx * cy)
        return out

    for n in names:
        if vclean(d.apply(d.column(n))):
            raise NotADifferential(f"d(d({n})) = {module.format_vector(d.apply(d.column(n)))}")
    for (x, y), v in product.items():
        _check_degree(module, v, module.degree(x) + module.degree(y), f"{x}*{y}")
    for x in names:
        for y in names:
            xy = product.get((x, y), _EMPTY)
            for z in names:
                left = mul(xy, {z: 1})
                right = mul({x: 1}, product.get((y, z), _EMPTY))
                if vclean(vadd(dict(left), right, -1)):
                    raise NotAssociative(f"({x}*{y})*{z} != {x}*({y}*{z})")
            lhs = d.apply(xy)
            rhs = vadd(mul(d.column(x), {y: 1}), mul({x: 1}, d.column(y)),
                       parity_sign(module.degree(x).codim))
            if vclean(vadd(dict(lhs), rhs, -1)):
                raise LeibnizFailure(f"d({x}*{y}) breaks the Leibniz rule")

    table: dict = {}
    for n in names:
        col = d.column(n)
        if col:
            table[(ZERO, (n,))] = vscale(col, parity_sign(module.degree(n).codim))
    for (x, y), v in product.items():
        cx, cy = module.degree(x).codim, module.degree(y).codim
        if v:
            table[(ZERO, (x, y))] = vscale(v, parity_sign(cx + cx * cy))
    for key, v in (extra or {}).items():
        table[key] = vadd(dict(table.get(key, {})), v)

    pairing = None
    if integral is not None:
        pairing = pairing_from_integral(module, product, integral)
    return AInftyStructure(module, Operations(table), monoid, cutoff, unit, pairing, name)


def pairing_from_integral(module: GradedModule, product: Mapping, integral: Mapping) -> Pairing:
    support = [module.degree(n) for n, c in integral.items() if c]
    top = support[0] if support else Bidegree(0, 0)
    entries = {}
    for (x, y), v in product.items():
        val = sum((c * integral.get(z, 0) for z, c in v.items()), 0)
        if val:
            cx, cy = module.degree(x).codim, module.degree(y).codim
            entries[(x, y)] = parity_sign(cx * cy + cx) * val
    return Pairing(module, (top.codim, top.ls), entries)


# ---------------------------------------------------------------- word operators

def extend_to_coderivation(A: AInftyStructure, chain: Mapping, degree: int = 1,
                           skip_linear: bool = False) -> dict:
    """The coderivation with components A.ops applied to a chain {(beta, word): coeff}."""
    for beta, _ in chain:
        if beta.E > A.cutoff:
            raise CutoffExceeded(f"input scalar {beta} above cutoff {A.cutoff}")
    return bar.extend_coderivation(A.module, A.module, A.ops, chain, degree, A.cutoff,
                                   skip_linear=skip_linear)


def relation_residual(A: AInftyStructure, word: tuple, twist: bool = True) -> dict:
    """{beta: pi_1(m m word)} restricted to nonzero entries."""
    chain = bar.word_chain(word)
    inner = bar.extend_coderivation(A.module, A.module, A.ops, chain, 1, A.cutoff, twist=twist)
    return bar.project_family(A.ops, inner, 1, A.cutoff, twist=twist)


# ---------------------------------------------------------------- validators

def validate_structure(A: AInftyStructure, k_max: int, twist: bool = True) -> Report:
    """Relations for all words of length <= k_max, tameness, degrees and cutoff."""
    rep = Report("structure")
    mod = A.module
    if A.ops(()).get(ZERO):
        rep.add("tameness", 0, ZERO, (), mod.format_vector(A.ops(()).get(ZERO)))
    checked = 0
    for k in range(k_max + 1):
        for word in bar.basis_words(mod, k):
            for beta, vec in A.ops(word).items():
                if beta.E > A.cutoff:
                    rep.add("cutoff", k, beta, word, f"energy {beta.E} > {A.cutoff}")
                if not A.monoid.contains(beta):
                    rep.add("monoid", k, beta, word, "label outside the monoid")
                try:
                    got = mod.element_degree(vec)
                except ValueError:
                    got = None
                expected = A.output_degree(beta, word)
                if got != expected:
                    rep.add("degree", k, beta, word, f"output degree {got}, expected {expected}")
            for beta, res in sorted(relation_residual(A, word, twist).items()):
                rep.add("relation", k, beta, word, mod.format_vector(res))
            checked += 1
    rep.info["words"] = checked
    return rep.finish()


def validate_unit(A: AInftyStructure, e: str, k_max: int = 3) -> Report:
    rep = Report("unit")
    mod = A.module
    if mod.degree(e) != Bidegree(0, 0):
        rep.add("unit-degree", None, None, (e,), f"degree {mod.degree(e)}")
        return rep
    for x in mod.names:
        left = A.m(2, ZERO, (e, x))
        right = vscale(A.m(2, ZERO, (x, e)), parity_sign(mod.degree(x).codim))
        if vclean(vadd(dict(left), {x: 1}, -1)):
            rep.add("unit-left", 2, ZERO, (e, x), mod.format_vector(left))
        if vclean(vadd(dict(right), {x: 1}, -1)):
            rep.add("unit-right", 2, ZERO, (x, e), mod.format_vector(right))
    for k in range(1, k_max + 1):
        for word in bar.basis_words(mod, k):
            if e not in word:
                continue
            for beta, vec in A.ops(word).items():
                if k == 2 and beta == ZERO:
                    continue
                rep.add("unit-insertion", k, beta, word, mod.format_vector(vec))
    return rep.finish()


def _nondegenerate(gram: list, ring: CoefficientRing) -> bool:
    n = len(gram)
    if n == 0:
        return True
    if len(gram[0]) != n:
        return False
    if ring.is_field:
        return linalg.rank(gram) == n
    # rank over the fraction field: try a few evaluation points, then the exact determinant
    for point in range(4):
        vals = {j: point + j for j in range(1, ring.num_alphas + 1)}
        num = [[_specialize(c, vals) for c in row] for row in gram]
        if linalg.rank(num) == n:
            return True
    return bool(linalg.determinant(gram))


def _specialize(c, values) -> Fraction:
    if isinstance(c, Poly):
        return c.evaluate(values).constant_term()
    return Fraction(c)


def _is_unit(c) -> bool:
    if isinstance(c, Poly):
        return c.is_constant() and c.constant_term() != 0
    return c != 0


def validate_cyclic(A: AInftyStructure, pairing: Pairing | None = None, k_max: int = 4) -> Report:
    """Antisymmetry, non-degeneracy, cyclic symmetry (k <= k_max) and perfectness on cohomology."""
    rep = Report("cyclic")
    pairing = pairing or A.pairing
    if pairing is None:
        rep.add("pairing-missing")
        return rep
    mod = A.module
    ring = mod.ring
    p, q = pairing.shift
    for (u, v), c in pairing.entries.items():
        g = mod.degree(u) + mod.degree(v)
        if g.shift(2 * ring.alpha_degree(c)) != Bidegree(p, q):
            rep.add("pairing-degree", None, None, (u, v), f"{ring.format(c)} in degree {g}")
    for u in mod.names:
        cu = mod.degree(u).codim
        for v in mod.names:
            cv = mod.degree(v).codim
            lhs = pairing.value(u, v)
            rhs = parity_sign(1 + (cu - 1) * (cv - 1)) * pairing.value(v, u)
            if lhs != rhs:
                rep.add("antisymmetry", None, None, (u, v), f"{lhs} vs {rhs}")
    basis = [{n: 1} for n in mod.names]
    if not _nondegenerate(pairing.gram(basis, basis), ring):
        rep.add("nondegeneracy", None, None, (), "pairing matrix is singular")

    for k in range(k_max + 1):
        for full in bar.basis_words(mod, k + 1):
            x0, rest = full[0], full[1:]
            cx0 = mod.degree(x0)
            shift_sum = sum(mod.degree(x).codim - 1 for x in rest)
            # <m(x1..xk), x0> against <m(x0..x_{k-1}), xk>
            last = rest[-1] if k else x0
            lhs = A.ops(rest)
            rhs = A.ops(full[:-1] if k else ())
            for beta in sorted(set(lhs) | set(rhs)):
                sign = parity_sign((cx0.codim - 1) * shift_sum + beta.mu * cx0.ls)
                a = pairing.evaluate(lhs.get(beta, _EMPTY), {x0: 1})
                b = pairing.evaluate(rhs.get(beta, _EMPTY), {last: 1})
                if a != sign * b:
                    rep.add("cyclic-symmetry", k, beta, full, f"{a} vs {sign * b}")
    _check_perfect(A, pairing, rep)
    return rep.finish()


def _check_perfect(A: AInftyStructure, pairing: Pairing, rep: Report) -> None:
    ring = A.ring
    d = A.linear_part()
    if d.is_zero():
        basis = [{n: 1} for n in A.module.names]
        gram = pairing.gram(basis, basis)
        if ring.is_field:
            ok = _nondegenerate(gram, ring)
        else:
            ok = _is_unit(linalg.determinant(gram))
        if not ok:
            rep.add("perfectness", None, None, (), "induced pairing on cohomology is not perfect")
        return
    if not ring.is_field:
        # nonzero differential over Q[alpha]: test the reduction modulo the alphas
        mod0 = A.module.with_ring(CoefficientRing(0))
        d0 = d.map_coefficients(ring.specialize, mod0, mod0)
        pairing = Pairing(mod0, pairing.shift, {k: ring.specialize(c) for k, c in pairing.entries.items()})
        split = split_complex(mod0, d0)
        rep.info["perfectness"] = "checked modulo the alphas"
    else:
        split = split_complex(A.module, d)
    gram = pairing.gram(split.harmonic, split.harmonic)
    if not _nondegenerate(gram, CoefficientRing(0)):
        rep.add("perfectness", None, None, (), "induced pairing on cohomology is not perfect")


@dataclass
class Cohomology:
    module: GradedModule      # basis "[name]" of H(C, m_{1,0})
    Pi: GradedMatrix          # C -> H
    I: GradedMatrix           # H -> C, chosen representatives


def cohomology(A: AInftyStructure, unit: str | None = None) -> Cohomology:
    if not A.ring.is_field:
        raise NotAField("cohomology needs rational coefficients; use the equivariant lifting instead")
    sp = split_complex(A.module, A.linear_part(), unit or A.unit)
    H = sp.cohomology_module()
    coords = sp.coordinates()
    Pi = GradedMatrix.from_columns(
        A.module, H, Bidegree(0, 0),
        {n: {sp.labels[i]: c for i, c in coords[n]["h"].items()} for n in A.module.names})
    I = GradedMatrix.from_columns(H, A.module, Bidegree(0, 0),
                                  {lab: v for lab, v in zip(sp.labels, sp.harmonic)})
    return Cohomology(H, Pi, I)


def structure_entries(A: AInftyStructure, words: Iterable[tuple]) -> dict:
    """{(beta, word): vector} for the given words (a convenience for comparisons)."""
    out = {}
    for w in words:
        for beta, vec in A.ops(tuple(w)).items():
            out[(beta, tuple(w))] = vec
    return out


def same_operations(A: AInftyStructure, B: AInftyStructure, k_max: int) -> list:
    """Basis words (arity <= k_max) on which the two component families differ."""
    if A.module.names != B.module.names:
        raise StructureMismatch("structures live on different bases")
    bad = []
    for k in range(k_max + 1):
        for word in bar.basis_words(A.module, k):
            a, b = A.ops(word), B.ops(word)
            for beta in set(a) | set(b):
                if vclean(vadd(dict(a.get(beta, _EMPTY)), b.get(beta, _EMPTY), -1)):
                    bad.append((word, beta))
    return bad
