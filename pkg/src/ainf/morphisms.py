"""Morphisms, homotopies, composition and gauge transforms of twisted A-infinity structures."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import bar, linalg
from .ainfty import AInftyStructure, Operations, Pairing
from .errors import NotInvertible, StructureMismatch
from .grading import Bidegree, GradedMatrix, GradedModule, parity_sign, vadd, vclean
from .novikov import ZERO, MonoidElement
from .report import Report

_EMPTY: dict = {}


class AInftyMorphism:
    def __init__(self, source: AInftyStructure, target: AInftyStructure, ops: Operations | Mapping,
                 name: str = ""):
        self.source = source
        self.target = target
        self.ops = ops if isinstance(ops, Operations) else Operations(ops)
        self.name = name
        self.cutoff = min(source.cutoff, target.cutoff)
        self._evaluator = bar.MorphismEvaluator(source.module, target.module, self.ops, self.cutoff)

    @classmethod
    def identity(cls, A: AInftyStructure) -> "AInftyMorphism":
        return cls.linear(A, A, GradedMatrix.identity(A.module), name="id")

    @classmethod
    def linear(cls, source: AInftyStructure, target: AInftyStructure, matrix: GradedMatrix,
               name: str = "") -> "AInftyMorphism":
        table = {(ZERO, (n,)): matrix.column(n) for n in source.module.names if matrix.column(n)}
        return cls(source, target, Operations(table), name)

    def component(self, word) -> dict:
        return self.ops(tuple(word))

    def f(self, k: int, beta: MonoidElement, word) -> dict:
        return dict(self.ops(tuple(word)).get(beta, _EMPTY))

    def linear_part(self) -> GradedMatrix:
        cols = {n: self.ops((n,)).get(ZERO, _EMPTY) for n in self.source.module.names}
        return GradedMatrix.from_columns(self.source.module, self.target.module, Bidegree(0, 0), cols)

    def word(self, word) -> dict:
        """The coalgebra morphism applied to one word: a chain in the target."""
        return self._evaluator.word(tuple(word))

    def apply(self, chain: Mapping) -> dict:
        return self._evaluator(chain)

    def output_degree(self, beta: MonoidElement, word) -> Bidegree:
        g = Bidegree(1 - len(word) - beta.mu, beta.mu)
        for x in word:
            g = g + self.source.module.degree(x)
        return g

    def entries(self, k_max: int) -> list:
        if not self.ops.lazy:
            return [t for t in self.ops.items() if len(t[0]) <= k_max]
        out = []
        for k in range(k_max + 1):
            for w in bar.basis_words(self.source.module, k):
                for beta, vec in sorted(self.ops(w).items()):
                    out.append((w, beta, vec))
        return out

    def __repr__(self):
        return f"AInftyMorphism({self.name or '?'}: {self.source.name} -> {self.target.name})"


class AInftyHomotopy:
    """A degree -1 (f1, f2)-coderivation h with m'h + hm = f2 - f1."""

    def __init__(self, f1: AInftyMorphism, f2: AInftyMorphism, ops: Operations | Mapping, name: str = ""):
        self.f1 = f1
        self.f2 = f2
        self.ops = ops if isinstance(ops, Operations) else Operations(ops)
        self.name = name

    @property
    def source(self) -> AInftyStructure:
        return self.f1.source

    @property
    def target(self) -> AInftyStructure:
        return self.f1.target

    def apply(self, chain: Mapping) -> dict:
        cutoff = min(self.source.cutoff, self.target.cutoff)
        return bar.extend_coderivation(self.source.module, self.target.module, self.ops, chain, -1, cutoff,
                                       prefix=self.f1.word, suffix=self.f2.word)


def apply_morphism(f: AInftyMorphism, word) -> dict:
    """Image of a word (or a chain) under the coalgebra morphism of f."""
    if isinstance(word, Mapping):
        return f.apply(word)
    return f.apply(bar.word_chain(tuple(word)))


def _diff(mod: GradedModule, lhs: Mapping, rhs: Mapping) -> dict:
    out = {}
    for beta in set(lhs) | set(rhs):
        v = vclean(vadd(dict(lhs.get(beta, _EMPTY)), rhs.get(beta, _EMPTY), -1))
        if v:
            out[beta] = v
    return out


def check_morphism(f: AInftyMorphism, k_max: int) -> Report:
    """f o m = m' o f on all words of length <= k_max, plus tameness and degrees."""
    rep = Report("morphism")
    A, B = f.source, f.target
    if A.monoid != B.monoid:
        rep.add("monoid-mismatch")
        return rep
    cutoff = f.cutoff
    if f.ops(()).get(ZERO):
        rep.add("tameness", 0, ZERO, (), B.module.format_vector(f.ops(()).get(ZERO)))
    for k in range(k_max + 1):
        for word in bar.basis_words(A.module, k):
            for beta, vec in f.ops(word).items():
                try:
                    got = B.module.element_degree(vec)
                except ValueError:
                    got = None
                if got != f.output_degree(beta, word):
                    rep.add("degree", k, beta, word, f"output degree {got}, expected {f.output_degree(beta, word)}")
            chain = bar.word_chain(word)
            m_chain = bar.extend_coderivation(A.module, A.module, A.ops, chain, 1, cutoff)
            lhs = bar.project_family(f.ops, m_chain, 0, cutoff)
            rhs = bar.project_family(B.ops, f.apply(chain), 1, cutoff)
            for beta, res in sorted(_diff(B.module, lhs, rhs).items()):
                rep.add("relation", k, beta, word, B.module.format_vector(res))
    return rep.finish()


def compose(g: AInftyMorphism, f: AInftyMorphism) -> AInftyMorphism:
    """Components of the coalgebra composite g o f."""
    if f.target.module != g.source.module:
        raise StructureMismatch("target of f is not the source of g")
    cutoff = min(f.cutoff, g.cutoff)

    def compute(word):
        return bar.project_family(g.ops, f.word(word), 0, cutoff)

    name = f"{g.name or 'g'}*{f.name or 'f'}"
    return AInftyMorphism(f.source, g.target, Operations(compute=compute), name)


def check_homotopy(h: AInftyHomotopy, f1: AInftyMorphism | None = None, f2: AInftyMorphism | None = None,
                   k_max: int = 4) -> Report:
    """m' h + h m = f2 - f1 componentwise, h expanded as an (f1, f2)-coderivation."""
    rep = Report("homotopy")
    if f1 is not None and f1 is not h.f1:
        h = AInftyHomotopy(f1, h.f2, h.ops)
    if f2 is not None and f2 is not h.f2:
        h = AInftyHomotopy(h.f1, f2, h.ops)
    A, B = h.source, h.target
    cutoff = min(A.cutoff, B.cutoff)
    for k in range(k_max + 1):
        for word in bar.basis_words(A.module, k):
            chain = bar.word_chain(word)
            lhs = bar.project_family(B.ops, h.apply(chain), 1, cutoff)
            m_chain = bar.extend_coderivation(A.module, A.module, A.ops, chain, 1, cutoff)
            for beta, vec in bar.project_family(h.ops, m_chain, -1, cutoff).items():
                vadd(lhs.setdefault(beta, {}), vec)
            rhs = {}
            for beta, vec in h.f2.ops(word).items():
                vadd(rhs.setdefault(beta, {}), vec)
            for beta, vec in h.f1.ops(word).items():
                vadd(rhs.setdefault(beta, {}), vec, -1)
            for beta, res in sorted(_diff(B.module, lhs, rhs).items()):
                rep.add("homotopy", k, beta, word, B.module.format_vector(res))
    return rep.finish()


def check_cyclic_morphism(f: AInftyMorphism, source_pairing: Pairing | None = None,
                          target_pairing: Pairing | None = None, k_max: int = 4) -> Report:
    """Pullback of the target pairing cocycle along f equals the source pairing cocycle."""
    rep = Report("cyclic-morphism")
    src = source_pairing or f.source.pairing
    tgt = target_pairing or f.target.pairing
    if src is None or tgt is None:
        rep.add("pairing-missing")
        return rep
    for k in range(k_max + 1):
        for word in bar.basis_words(f.source.module, k):
            pulled: dict = {}
            for (beta, w), c in f.word(word).items():
                if len(w) == 2:
                    val = tgt.value(w[0], w[1])
                    if val:
                        pulled[beta] = pulled.get(beta, 0) + c * val
            if k == 2:
                own = src.value(word[0], word[1])
                if own:
                    pulled[ZERO] = pulled.get(ZERO, 0) - own
            for beta in sorted(pulled):
                if pulled[beta]:
                    rep.add("pullback", k, beta, word, f"difference {pulled[beta]}")
    return rep.finish()


def check_unital_morphism(f: AInftyMorphism, e: str | None = None, e_prime: str | None = None,
                          k_max: int = 3) -> Report:
    rep = Report("unital-morphism")
    e = e or f.source.unit
    e_prime = e_prime or f.target.unit
    if e is None or e_prime is None:
        rep.add("unit-missing")
        return rep
    img = f.f(1, ZERO, (e,))
    if vclean(vadd(dict(img), {e_prime: 1}, -1)):
        rep.add("unit-image", 1, ZERO, (e,), f.target.module.format_vector(img))
    for k in range(1, k_max + 1):
        for word in bar.basis_words(f.source.module, k):
            if e not in word:
                continue
            for beta, vec in f.ops(word).items():
                if k == 1 and beta == ZERO:
                    continue
                rep.add("unit-insertion", k, beta, word, f.target.module.format_vector(vec))
    return rep.finish()


# ---------------------------------------------------------------- inversion and gauge

def _invert_linear(mat: GradedMatrix) -> GradedMatrix:
    if not mat.target.ring.is_field:
        raise NotInvertible("only rational linear parts are inverted")
    src, tgt = mat.source, mat.target
    cols = {}
    for g in sorted(set(src.degrees()) | set(tgt.degrees())):
        s_names = src.names_of_degree(g)
        t_names = tgt.names_of_degree(g)
        if len(s_names) != len(t_names):
            raise NotInvertible(f"linear part is not square in degree {g}")
        if not s_names:
            continue
        m = [[Fraction(mat.entry(r, c)) for c in s_names] for r in t_names]
        inv = linalg.inverse(m)
        if inv is None:
            raise NotInvertible(f"linear part is singular in degree {g}")
        for j, t in enumerate(t_names):
            cols[t] = vclean({s: inv[i][j] for i, s in enumerate(s_names)})
    return GradedMatrix.from_columns(tgt, src, Bidegree(0, 0), cols)


def invert_morphism(g: AInftyMorphism) -> AInftyMorphism:
    """Inverse coalgebra morphism, solved order by order in (word length, energy)."""
    lin_inv = _invert_linear(g.linear_part())
    cutoff = g.cutoff
    betas = g.source.monoid.elements(cutoff)
    table: dict = {}

    def family(word):
        return table.get(word, _EMPTY)

    def solve(word):
        if word in table:
            return table[word]
        for i in range(len(word)):
            for j in range(i, len(word) + 1):
                if (i, j) != (0, len(word)):
                    solve(word[i:j])
        if word != ():
            solve(())
        table[word] = {}
        for beta in betas:
            evaluator = bar.MorphismEvaluator(g.target.module, g.source.module, family, cutoff)
            current = bar.project_family(g.ops, evaluator.word(word), 0, cutoff).get(beta, {})
            wanted = {word[0]: 1} if len(word) == 1 and beta == ZERO else {}
            residual = vclean(vadd(dict(wanted), current, -1))
            if residual:
                table[word] = dict(table[word])
                table[word][beta] = vclean(lin_inv.apply(residual))
        return table[word]

    return AInftyMorphism(g.target, g.source, Operations(compute=solve), f"{g.name or 'g'}^-1")


def gauge_transform(A: AInftyStructure, g: AInftyMorphism) -> AInftyStructure:
    """Structure whose bar differential is g m g^{-1}; g is given by components on A's module."""
    if g.source.module != A.module or g.target.module != A.module:
        raise StructureMismatch("gauge morphism must act on the structure's module")
    g = AInftyMorphism(A, A, g.ops, g.name)
    inv = invert_morphism(g)
    cutoff = A.cutoff

    def compute(word):
        pulled = inv.word(word)
        m_chain = bar.extend_coderivation(A.module, A.module, A.ops, pulled, 1, cutoff)
        return bar.project_family(g.ops, m_chain, 0, cutoff)

    return A.replace(ops=Operations(compute=compute), name=f"{A.name}^g")


def random_unipotent_gauge(A: AInftyStructure, rng, density: int = 1) -> AInftyMorphism:
    """g_{1,0} = id plus ``density`` random degree-correct g_{2,0} entries (small integers)."""
    mod = A.module
    table = {(ZERO, (n,)): {n: 1} for n in mod.names}
    pairs = [(x, y) for x in mod.names for y in mod.names]
    rng.shuffle(pairs)
    added = 0
    for x, y in pairs:
        target_deg = mod.degree(x) + mod.degree(y) + Bidegree(-1, 0)
        outs = mod.names_of_degree(target_deg)
        if not outs:
            continue
        out = outs[rng.randrange(len(outs))]
        coeff = rng.choice([-2, -1, 1, 2])
        table[(ZERO, (x, y))] = {out: coeff}
        added += 1
        if added >= density:
            break
    return AInftyMorphism(A, A, Operations(table), "gauge")
