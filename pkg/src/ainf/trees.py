"""Planar labeled trees and the tree-sum formula for the transferred structure.

This evaluates trees directly on slot lists and shares no code path with the
operator series in ``hpl`` beyond reading the components of A and the
retraction matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian

from .ainfty import AInftyStructure
from .grading import GradedMatrix, parity_sign, vadd, vclean
from .hpl import Retraction
from .novikov import ZERO, GappedMonoid, MonoidElement

LEAF = None


@dataclass(frozen=True)
class RibbonTree:
    """An interior vertex m_{k,beta}; children are subtrees or LEAF, left to right."""

    beta: MonoidElement
    children: tuple

    @property
    def arity(self) -> int:
        return len(self.children)

    def leaves(self) -> int:
        return sum(1 if c is LEAF else c.leaves() for c in self.children)

    def total_beta(self) -> MonoidElement:
        total = self.beta
        for c in self.children:
            if c is not LEAF:
                total = total + c.total_beta()
        return total

    def vertices(self) -> int:
        return 1 + sum(c.vertices() for c in self.children if c is not LEAF)

    def __str__(self) -> str:
        inner = " ".join("*" if c is LEAF else str(c) for c in self.children)
        head = f"{self.arity};{self.beta.E},{self.beta.mu}"
        return f"({head}{' ' + inner if inner else ''})"


def _stable(k: int, beta: MonoidElement) -> bool:
    return not (beta.is_zero() and k in (0, 1))


def enumerate_trees(k: int, beta: MonoidElement, G: GappedMonoid, cutoff=None) -> list[RibbonTree]:
    """All stable planar trees with k leaves and total label beta."""
    cutoff = Fraction(beta.E if cutoff is None else cutoff)
    if beta.E > cutoff:
        return []
    elems = G.elements(beta.E)
    return list(_trees(k, beta, elems, G.min_energy or Fraction(0)))


@lru_cache(maxsize=None)
def _trees(k: int, beta: MonoidElement, elems: tuple, e_min: Fraction) -> tuple:
    out = []
    present = set(elems)
    extra = int(beta.E // e_min) if e_min else 0
    for root in elems:
        rest = beta - root
        if rest not in present:
            continue
        for arity in range(0, k + extra + 1):
            if not _stable(arity, root):
                continue
            for children in _child_sequences(arity, k, rest, elems, e_min):
                out.append(RibbonTree(root, children))
    return tuple(out)


def _child_sequences(n: int, leaves: int, beta: MonoidElement, elems: tuple, e_min: Fraction):
    """Sequences of n children (leaves or subtrees) with given leaf total and label total."""
    if n == 0:
        if leaves == 0 and beta.is_zero():
            yield ()
        return
    present = set(elems)
    # first child is a leaf
    if leaves >= 1:
        for rest in _child_sequences(n - 1, leaves - 1, beta, elems, e_min):
            yield (LEAF,) + rest
    # first child is a subtree
    for b1 in elems:
        b2 = beta - b1
        if b2 not in present:
            continue
        for l1 in range(0, leaves + 1):
            if n >= 2 and l1 == leaves and b2.is_zero():
                continue  # the other children would need zero leaves and zero label
            subs = _trees(l1, b1, elems, e_min)
            if not subs:
                continue
            tails = list(_child_sequences(n - 1, leaves - l1, b2, elems, e_min))
            for s in subs:
                for t in tails:
                    yield (s,) + t


# ---------------------------------------------------------------- evaluation

def _frontier_spans(tree: RibbonTree):
    """Postorder vertex list with (vertex, first frontier slot, last frontier slot, leaf offset)."""
    order = []
    counter = [0]

    def walk(t):
        start = counter[0]
        if t is LEAF:
            counter[0] += 1
            return start, start
        if not t.children:
            counter[0] += 1
            order.append((t, start, start))
            return start, start
        for c in t.children:
            walk(c)
        order.append((t, start, counter[0] - 1))
        return start, counter[0] - 1

    walk(tree)
    return order


def evaluate_tree(tree: RibbonTree, A: AInftyStructure, r: Retraction, inputs: tuple,
                  root: str = "Pi") -> dict:
    """Value of one tree on H inputs: I at leaves, h on inner edges, Pi (or h) at the root."""
    C = A.module
    shift = {n: (g.codim - 1) & 1 for n, g in C.basis}
    cross = {n: (g.codim + g.ls + 1) & 1 for n, g in C.basis}

    # frontier items: leaves carry their span, nullary vertices are inserted later
    leaf_spans = []
    counter = [0]

    def leaves_of(t):
        if t is LEAF:
            leaf_spans.append(counter[0])
            counter[0] += 1
            return
        if not t.children:
            counter[0] += 1
            return
        for c in t.children:
            leaves_of(c)

    leaves_of(tree)
    if len(leaf_spans) != len(inputs):
        raise ValueError("input count does not match the tree's leaves")

    # state: {(front beta, names): coeff}, with a parallel list of slot spans
    spans = [(s, s) for s in leaf_spans]
    state = {(ZERO, ()): Fraction(1)}
    for y in inputs:
        nxt = {}
        col = r.I.column(y)
        for (b, w), c in state.items():
            for x, cx in col.items():
                key = (b, w + (x,))
                nxt[key] = nxt.get(key, 0) + c * cx
        state = {k: v for k, v in nxt.items() if v}

    vertices = _frontier_spans(tree)
    for idx, (v, lo, hi) in enumerate(vertices):
        pos = sum(1 for s in spans if s[1] < lo)
        k = v.arity
        is_root = idx == len(vertices) - 1
        nxt: dict = {}
        for (b0, w), c in state.items():
            prefix = w[:pos]
            pre_shift = sum(shift[x] for x in prefix) & 1
            pre_cross = sum(cross[x] for x in prefix) & 1
            out = A.ops(w[pos:pos + k]).get(v.beta)
            if not out:
                continue
            b1 = b0 + v.beta
            # m: Koszul sign over the prefix, eps crossing, and passing the front scalar
            sign = parity_sign(pre_shift + v.beta.mu * pre_cross + b0.mu)
            for y, cy in out.items():
                if is_root and root == "Pi":
                    key = (b1, prefix + (y,) + w[pos + k:])
                    nxt[key] = nxt.get(key, 0) + c * cy * sign
                    continue
                hy = r.h.column(y)
                if not hy:
                    continue
                # h: degree -1, same prefix, passes the new front scalar
                sign_h = parity_sign(pre_shift + b1.mu)
                for z, cz in hy.items():
                    key = (b1, prefix + (z,) + w[pos + k:])
                    nxt[key] = nxt.get(key, 0) + c * cy * cz * sign * sign_h
        state = {key: val for key, val in nxt.items() if val}
        spans = spans[:pos] + [(lo, hi)] + spans[pos + k:]
        if not state:
            return {}
    result: dict = {}
    for (b, w), c in state.items():
        assert len(w) == 1
        vec = r.Pi.column(w[0]) if root == "Pi" else {w[0]: 1}
        vadd(result, vec, c)
    return vclean(result)


def _support(A: AInftyStructure):
    """(arity, label) pairs carrying a nonzero component, or None when A is lazy."""
    if A.ops.lazy:
        return None
    return {(len(w), b) for w, b, _ in A.ops.items()}


def _uses_only(tree: RibbonTree, support) -> bool:
    if support is None:
        return True
    if (tree.arity, tree.beta) not in support:
        return False
    return all(c is LEAF or _uses_only(c, support) for c in tree.children)


def _relevant_trees(A: AInftyStructure, k: int, beta: MonoidElement) -> list:
    support = _support(A)
    return [t for t in enumerate_trees(k, beta, A.monoid, A.cutoff) if _uses_only(t, support)]


def tree_transfer(A: AInftyStructure, r: Retraction, k: int, beta: MonoidElement) -> dict:
    """m^can_{k,beta} as {input word: vector} by summing over trees."""
    trees = _relevant_trees(A, k, beta)
    out = {}
    for word in cartesian(r.H.names, repeat=k):
        acc: dict = {}
        for t in trees:
            vadd(acc, evaluate_tree(t, A, r, word))
        acc = vclean(acc)
        if acc:
            out[word] = acc
    return out


def tree_inclusion(A: AInftyStructure, r: Retraction, k: int, beta: MonoidElement) -> dict:
    """Components of the transferred inclusion I_{k,beta}: trees with h at the root (plus I itself)."""
    out = {}
    trees = _relevant_trees(A, k, beta)
    for word in cartesian(r.H.names, repeat=k):
        acc: dict = {}
        if k == 1 and beta.is_zero():
            vadd(acc, r.I.column(word[0]))
        for t in trees:
            vadd(acc, evaluate_tree(t, A, r, word, root="h"))
        acc = vclean(acc)
        if acc:
            out[word] = acc
    return out


def count_trees(k: int, beta: MonoidElement, G: GappedMonoid) -> int:
    return len(enumerate_trees(k, beta, G))
