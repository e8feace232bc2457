"""Gapped monoids of (energy, Maslov index) pairs and truncated Novikov scalars."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InvalidGenerator, MonoidMismatch
from .grading import RATIONALS, CoefficientRing, parity_sign


@dataclass(frozen=True, order=True)
class MonoidElement:
    """An element beta of the monoid, identified with its pair (E(beta), mu(beta))."""

    E: Fraction
    mu: int

    def __post_init__(self):
        object.__setattr__(self, "E", Fraction(self.E))

    def __add__(self, other: "MonoidElement") -> "MonoidElement":
        return MonoidElement(self.E + other.E, self.mu + other.mu)

    def __sub__(self, other: "MonoidElement") -> "MonoidElement":
        return MonoidElement(self.E - other.E, self.mu - other.mu)

    def is_zero(self) -> bool:
        return self.E == 0 and self.mu == 0

    def __str__(self) -> str:
        return f"E={self.E},mu={self.mu}"

    __repr__ = __str__


ZERO = MonoidElement(Fraction(0), 0)

_ELEMENT = re.compile(r"^\s*(?:E\s*=\s*)?([-+]?\d+(?:/\d+)?)\s*,\s*(?:mu\s*=\s*)?([-+]?\d+)\s*$")


def parse_element(text: str) -> MonoidElement:
    """Parse "E=p/q,mu=m" (the short form "p/q,m" is also accepted)."""
    m = _ELEMENT.match(text)
    if not m:
        raise ValueError(f"bad monoid element {text!r}")
    return MonoidElement(Fraction(m.group(1)), int(m.group(2)))


class GappedMonoid:
    """Submonoid of Q>=0 x Z generated by finitely many elements of positive energy."""

    def __init__(self, generators: Iterable = ()):
        gens = []
        for g in generators:
            if not isinstance(g, MonoidElement):
                g = MonoidElement(Fraction(g[0]), int(g[1]))
            if g.E <= 0:
                raise InvalidGenerator(f"generator {g} must have positive energy")
            if g not in gens:
                gens.append(g)
        self.generators = tuple(sorted(gens))

    def __eq__(self, other):
        return isinstance(other, GappedMonoid) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"GappedMonoid({[str(g) for g in self.generators]})"

    @property
    def min_energy(self) -> Fraction | None:
        return min((g.E for g in self.generators), default=None)

    def elements(self, E_max) -> tuple[MonoidElement, ...]:
        return _enumerate(self.generators, Fraction(E_max))

    def contains(self, beta: MonoidElement) -> bool:
        return beta in self.elements(beta.E)

    def splittings(self, beta: MonoidElement, E_max) -> list[tuple[MonoidElement, MonoidElement]]:
        """All (b1, b2) in the monoid with b1 + b2 = beta."""
        elems = self.elements(E_max)
        present = set(elems)
        return [(b1, beta - b1) for b1 in elems if (beta - b1) in present]

    def length_bound(self, cutoff) -> int:
        """Largest number of nonzero elements whose energies can sum to at most cutoff."""
        e = self.min_energy
        if e is None:
            return 0
        return int(Fraction(cutoff) // e)


@lru_cache(maxsize=None)
def _enumerate(generators: tuple, E_max: Fraction) -> tuple:
    if E_max < 0:
        raise ValueError("E_max must be nonnegative")
    seen = {ZERO}
    frontier = [ZERO]
    while frontier:
        nxt = []
        for b in frontier:
            for g in generators:
                s = b + g
                if s.E <= E_max and s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return tuple(sorted(seen))


def enumerate_monoid(G: GappedMonoid, E_max) -> list[tuple[Fraction, int]]:
    """All sums of generators with energy <= E_max, sorted, as (E, mu) pairs."""
    E_max = Fraction(E_max)
    if E_max < 0:
        raise ValueError("E_max must be nonnegative")
    return [(b.E, b.mu) for b in G.elements(E_max)]


def left_action_sign(codim: int, ls: int, r1: int) -> int:
    """Sign of moving eps^r1 from the right of c to its left, for c of degree (codim, ls)."""
    return parity_sign((codim + ls + 1) * r1)


@dataclass
class NovikovScalar:
    """Truncated sum of a_beta eps^mu(beta) T^E(beta)."""

    monoid: GappedMonoid
    cutoff: Fraction
    coefficients: dict = field(default_factory=dict)
    ring: CoefficientRing = RATIONALS

    def __post_init__(self):
        self.cutoff = Fraction(self.cutoff)
        clean = {}
        for b, c in self.coefficients.items():
            if not isinstance(b, MonoidElement):
                b = MonoidElement(Fraction(b[0]), int(b[1]))
            if c and b.E <= self.cutoff:
                clean[b] = self.ring.coerce(c)
        self.coefficients = clean

    @classmethod
    def monomial(cls, monoid, cutoff, beta, coeff=1, ring=RATIONALS) -> "NovikovScalar":
        return cls(monoid, cutoff, {beta: coeff}, ring)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        return novikov_mul(self, other)

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        if self.monoid != other.monoid:
            raise MonoidMismatch("operands live over different monoids")
        out = dict(self.coefficients)
        for b, c in other.coefficients.items():
            out[b] = out.get(b, 0) + c
        return NovikovScalar(self.monoid, min(self.cutoff, other.cutoff), out, self.ring)

    def __eq__(self, other):
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.monoid == other.monoid and self.coefficients == other.coefficients

    def is_zero(self) -> bool:
        return not self.coefficients

    def __str__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for b in sorted(self.coefficients):
            parts.append(f"({self.ring.format(self.coefficients[b])})*eps^{b.mu}*T^{b.E}")
        return " + ".join(parts)


def novikov_mul(a: NovikovScalar, b: NovikovScalar, E_max=None) -> NovikovScalar:
    """Convolution product, truncated above the smallest of the cutoffs involved."""
    if a.monoid != b.monoid:
        raise MonoidMismatch("operands live over different monoids")
    cutoff = min(a.cutoff, b.cutoff)
    if E_max is not None:
        cutoff = min(cutoff, Fraction(E_max))
    out: dict = {}
    for b1, c1 in a.coefficients.items():
        for b2, c2 in b.coefficients.items():
            s = b1 + b2
            if s.E <= cutoff:
                out[s] = out.get(s, 0) + c1 * c2
    return NovikovScalar(a.monoid, cutoff, out, a.ring)


def as_elements(pairs: Mapping | Iterable) -> list[MonoidElement]:
    return [p if isinstance(p, MonoidElement) else MonoidElement(Fraction(p[0]), int(p[1])) for p in pairs]
