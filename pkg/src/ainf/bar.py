"""Word-level evaluation on the bar construction.

A *chain* is a dict mapping ``(beta, word)`` to a coefficient, where ``word``
is a tuple of basis names and ``beta`` records the Novikov monomial
eps^mu T^E sitting in front of the whole word.  Every operator here keeps
scalars normalized to the front:

* inserting a component output ``lambda(beta) y`` after a prefix moves
  ``lambda(beta)`` leftwards across the prefix with the bimodule sign
  (-1)^{mu(beta) * sum(codim + ls + 1)};
* an operator of coderivation degree d acting after a prefix picks up
  (-1)^{d * sum(codim - 1)} and, when it passes a front scalar eps^r,
  (-1)^{d * r}.

This one set of rules drives relation checks, morphism and homotopy
checks, and the perturbation series.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .grading import GradedMatrix, GradedModule, parity_sign
from .novikov import ZERO, MonoidElement

# an operation family: word -> {beta: vector}
Family = Callable[[tuple], Mapping[MonoidElement, Mapping[str, object]]]


def parities(module: GradedModule) -> tuple[dict, dict]:
    """Per-name parities of (codim - 1) and (codim + ls + 1)."""
    cached = getattr(module, "_bar_parities", None)
    if cached is None:
        shift = {n: (g.codim - 1) & 1 for n, g in module.basis}
        cross = {n: (g.codim + g.ls + 1) & 1 for n, g in module.basis}
        cached = (shift, cross)
        module._bar_parities = cached
    return cached


def chain_add(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def chain_merge(acc: dict, other: Mapping, scale=1) -> dict:
    for k, c in other.items():
        chain_add(acc, k, c * scale)
    return acc


def word_chain(word: tuple, coeff=1, beta: MonoidElement = ZERO) -> dict:
    return {(beta, tuple(word)): coeff}


def length_part(chain: Mapping, n: int) -> dict:
    return {k: c for k, c in chain.items() if len(k[1]) == n}


def collapse(chain: Mapping) -> dict:
    """Length-one chain -> {beta: vector}."""
    out: dict = {}
    for (beta, word), c in chain.items():
        if len(word) != 1:
            raise ValueError("collapse expects words of length one")
        vec = out.setdefault(beta, {})
        chain_add(vec, word[0], c)
    return {b: v for b, v in out.items() if v}


def extend_coderivation(source: GradedModule, target: GradedModule, family: Family, chain: Mapping,
                        degree: int, cutoff, prefix: Callable | None = None,
                        suffix: Callable | None = None, skip_linear: bool = False,
                        twist: bool = True) -> dict:
    """Apply the (f1, f2)-coderivation of the given degree determined by ``family``.

    ``prefix`` / ``suffix`` map a source word to a target chain (the morphisms
    f1 and f2); ``None`` means the identity.  With ``skip_linear`` the (1, 0)
    component is omitted.  ``twist=False`` drops every Maslov-index sign
    (used only to show that those signs matter).
    """
    shift_s, _ = parities(source)
    _, cross_t = parities(target)
    out: dict = {}
    for (b0, word), c0 in chain.items():
        s0 = parity_sign(degree * b0.mu) if twist else 1
        n = len(word)
        pre_shift = 0
        for i in range(n + 1):
            if i:
                pre_shift += shift_s[word[i - 1]]
            pre = word[:i]
            if prefix is None:
                pre_terms = {(ZERO, pre): 1}
            else:
                pre_terms = prefix(pre)
                if not pre_terms:
                    continue
            s_xi = parity_sign(degree * pre_shift)
            for j in range(i, n + 1):
                mid = word[i:j]
                vals = family(mid)
                if not vals:
                    continue
                post = word[j:]
                if suffix is None:
                    suf_terms = {(ZERO, post): 1}
                else:
                    suf_terms = suffix(post)
                    if not suf_terms:
                        continue
                for bm, vec in vals.items():
                    if skip_linear and j - i == 1 and bm.is_zero():
                        continue
                    base_b = b0 + bm
                    if base_b.E > cutoff:
                        continue
                    for (bl, wl), cl in pre_terms.items():
                        bb = base_b + bl
                        if bb.E > cutoff:
                            continue
                        cross_l = sum(cross_t[x] for x in wl) & 1
                        s_m = parity_sign(bm.mu * cross_l) if twist else 1
                        for (bs, ws), cs in suf_terms.items():
                            btot = bb + bs
                            if btot.E > cutoff:
                                continue
                            for y, cy in vec.items():
                                sgn = s0 * s_xi * s_m
                                if twist and bs.mu & 1:
                                    sgn *= parity_sign(cross_l + cross_t[y])
                                chain_add(out, (btot, wl + (y,) + ws), c0 * cl * cy * cs * sgn)
    return out


def project_family(family: Family, chain: Mapping, degree: int, cutoff, twist: bool = True) -> dict:
    """pi_1 of the coderivation (or morphism, degree 0) applied to ``chain``: {beta: vector}."""
    out: dict = {}
    for (b0, word), c0 in chain.items():
        vals = family(word)
        if not vals:
            continue
        s0 = parity_sign(degree * b0.mu) if twist else 1
        for bm, vec in vals.items():
            b = b0 + bm
            if b.E > cutoff:
                continue
            acc = out.setdefault(b, {})
            for y, cy in vec.items():
                chain_add(acc, y, c0 * cy * s0)
    return {b: v for b, v in out.items() if v}


class MorphismEvaluator:
    """Applies the coalgebra morphism determined by a component family to chains."""

    def __init__(self, source: GradedModule, target: GradedModule, family: Family, cutoff):
        self.source = source
        self.target = target
        self.family = family
        self.cutoff = Fraction(cutoff)
        self._cache: dict = {}

    def word(self, word: tuple) -> dict:
        word = tuple(word)
        hit = self._cache.get(word)
        if hit is None:
            hit = self._cover(word)
            self._cache[word] = hit
        return hit

    def _cover(self, word: tuple) -> dict:
        _, cross_t = parities(self.target)
        n = len(word)
        memo: dict = {}
        cutoff = self.cutoff

        def cover(pos: int, spent: Fraction) -> dict:
            key = (pos, spent)
            if key in memo:
                return memo[key]
            result: dict = {}
            if pos == n:
                result[(ZERO, ())] = 1
            for end in range(pos, n + 1):
                vals = self.family(word[pos:end])
                if not vals:
                    continue
                for bm, vec in vals.items():
                    if end == pos and bm.is_zero():
                        continue
                    if spent + bm.E > cutoff:
                        continue
                    rest = cover(end, spent + bm.E)
                    for (br, wr), cr in rest.items():
                        btot = bm + br
                        if btot.E > cutoff:
                            continue
                        for y, cy in vec.items():
                            sgn = parity_sign(br.mu * cross_t[y])
                            chain_add(result, (btot, (y,) + wr), cy * cr * sgn)
            memo[key] = result
            return result

        return cover(0, Fraction(0))

    def __call__(self, chain: Mapping) -> dict:
        out: dict = {}
        for (b0, word), c0 in chain.items():
            for (b, w), c in self.word(word).items():
                bt = b0 + b
                if bt.E <= self.cutoff:
                    chain_add(out, (bt, w), c0 * c)
        return out


def apply_linear(matrix: GradedMatrix, chain: Mapping) -> dict:
    """Apply a degree-(0, 0) linear map in every slot (no signs arise)."""
    out: dict = {}
    for (b0, word), c0 in chain.items():
        partial = {(): c0}
        for x in word:
            col = matrix.column(x)
            if not col:
                partial = {}
                break
            nxt: dict = {}
            for w, c in partial.items():
                for y, cy in col.items():
                    chain_add(nxt, w + (y,), c * cy)
            partial = nxt
        for w, c in partial.items():
            chain_add(out, (b0, w), c)
    return out


def linear_family(matrix: GradedMatrix) -> Family:
    """The component family with only a (1, 0) entry given by ``matrix``."""
    cache: dict = {}

    def fam(word: tuple):
        if len(word) != 1:
            return {}
        hit = cache.get(word[0])
        if hit is None:
            col = matrix.column(word[0])
            hit = {ZERO: dict(col)} if col else {}
            cache[word[0]] = hit
        return hit

    return fam


def basis_words(module: GradedModule, k: int):
    """All words of length k in the basis names (lexicographic in basis order)."""
    if k == 0:
        yield ()
        return
    from itertools import product
    yield from product(module.names, repeat=k)
