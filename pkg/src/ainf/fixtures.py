"""Named example structures: small DGAs, their deformations, and T*-modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Any

from .ainfty import AInftyStructure, Operations, from_dga
from .errors import UnknownFixture
from .grading import Bidegree, GradedMatrix, GradedModule, parity_sign, vadd
from .novikov import GappedMonoid, MonoidElement

BETA_E = MonoidElement(Fraction(1), 2)
BETA_O = MonoidElement(Fraction(1), 1)
BETA_C = MonoidElement(Fraction(1), 0)


@dataclass
class FixtureBundle:
    name: str
    structure: AInftyStructure
    d: GradedMatrix
    product: dict
    integral: dict
    tstar: Any = None
    notes: dict = field(default_factory=dict)


def _unit_products(names, unit="1") -> dict:
    prod = {}
    for n in names:
        prod[(unit, n)] = {n: 1}
        prod[(n, unit)] = {n: 1}
    return prod


def _point():
    mod = GradedModule([("1", Bidegree(0, 0))])
    d = GradedMatrix.zero(mod, mod, Bidegree(1, 0))
    return mod, d, _unit_products(mod.names), {"1": 1}


def _circle():
    mod = GradedModule([("e0", Bidegree(0, 0)), ("e1", Bidegree(1, 0))])
    d = GradedMatrix.zero(mod, mod, Bidegree(1, 0))
    return mod, d, _unit_products(mod.names, "e0"), {"e1": 1}


def _m6():
    mod = GradedModule([("1", (0, 0)), ("a", (1, 0)), ("b", (2, 0)),
                        ("p", (0, 1)), ("q", (1, 1)), ("w", (2, 1))])
    d = GradedMatrix(mod, mod, Bidegree(1, 0), {("b", "a"): 1, ("q", "p"): 1})
    prod = _unit_products(mod.names)
    prod[("a", "q")] = {"w": 1}
    prod[("q", "a")] = {"w": -1}
    # forced by the Leibniz rule on a*p (and needed for a non-degenerate pairing)
    prod[("b", "p")] = {"w": 1}
    prod[("p", "b")] = {"w": 1}
    return mod, d, prod, {"w": 1}


_N3_GENS = ("x1", "x2", "y")
_N3_NAMES = ("1", "x1", "x2", "y", "x1x2", "x1y", "x2y", "x1x2y")


def _n3_monomial(name: str) -> tuple:
    if name == "1":
        return ()
    out, i = [], 0
    while i < len(name):
        if name[i] == "x":
            out.append(name[i:i + 2])
            i += 2
        else:
            out.append(name[i])
            i += 1
    return tuple(out)


def _n3_name(gens: tuple) -> str:
    return "".join(gens) or "1"


def _wedge(u: tuple, v: tuple):
    """Sign and sorted monomial of u*v in the exterior algebra, or (0, None)."""
    seq = list(u + v)
    if len(set(seq)) != len(seq):
        return 0, None
    order = [_N3_GENS.index(g) for g in seq]
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return parity_sign(inversions), tuple(sorted(seq, key=_N3_GENS.index))


def _n3():
    mod = GradedModule([(n, Bidegree(len(_n3_monomial(n)), 0)) for n in _N3_NAMES])
    prod = {}
    for x, y in cartesian(_N3_NAMES, repeat=2):
        s, mono = _wedge(_n3_monomial(x), _n3_monomial(y))
        if s:
            prod[(x, y)] = {_n3_name(mono): s}
    gen_d = {"x1": {}, "x2": {}, "y": {"x1x2": 1}}
    cols = {}
    for n in _N3_NAMES:
        mono = _n3_monomial(n)
        out: dict = {}
        # d is a derivation: sum over positions with the Koszul sign of the prefix
        for i, g in enumerate(mono):
            for target, c in gen_d[g].items():
                s1, left = _wedge(mono[:i], _n3_monomial(target))
                if not s1:
                    continue
                s2, full = _wedge(left, mono[i + 1:])
                if s2:
                    vadd(out, {_n3_name(full): c * s1 * s2 * parity_sign(i)})
        cols[n] = out
    d = GradedMatrix.from_columns(mod, mod, Bidegree(1, 0), cols)
    return mod, d, prod, {"x1x2y": 1}


def _bundle(name, raw, unit, monoid=None, cutoff=0, extra=None) -> FixtureBundle:
    mod, d, prod, integral = raw
    A = from_dga(d, prod, integral, unit=unit, monoid=monoid, cutoff=cutoff, extra=extra, name=name)
    return FixtureBundle(name, A, d, prod, integral)


def build_pt() -> FixtureBundle:
    from .equivariant import TStarModule
    b = _bundle("PT", _point(), "1")
    b.tstar = TStarModule.trivial(b.d, 1)
    return b


def build_s1() -> FixtureBundle:
    from .equivariant import TStarModule
    b = _bundle("S1", _circle(), "e0")
    mod = b.d.source
    iota = GradedMatrix(mod, mod, Bidegree(-1, 0), {("e0", "e1"): 1})
    b.tstar = TStarModule(b.d, [iota])
    return b


def build_m6() -> FixtureBundle:
    return _bundle("M6", _m6(), "1")


def build_m6_iota() -> FixtureBundle:
    from .equivariant import TStarModule
    b = _bundle("M6i", _m6(), "1")
    mod = b.d.source
    iota = GradedMatrix(mod, mod, Bidegree(-1, 0), {("1", "a"): 1, ("q", "w"): 1})
    b.tstar = TStarModule(b.d, [iota])
    return b


def build_m6_iota_curved() -> FixtureBundle:
    """M6 with only m_{1,0} and m_{0,beta} = T*b: iota-invariant and cyclic, but not unital."""
    b = build_m6_iota()
    A = b.structure
    table = {(beta, w): v for w, beta, v in A.ops.items() if len(w) == 1}
    table[(BETA_C, ())] = {"b": 1}
    b.structure = AInftyStructure(A.module, Operations(table), GappedMonoid([BETA_C]), 2, None,
                                  A.pairing, "M6i-C")
    b.name = "M6i-C"
    b.product = {}
    b.notes["beta"] = BETA_C
    return b


def build_n3() -> FixtureBundle:
    return _bundle("N3", _n3(), "1")


def build_def_e() -> FixtureBundle:
    b = _bundle("DEF-E", _point(), "1", GappedMonoid([BETA_E]), 2, {(BETA_E, ()): {"1": 1}})
    b.notes["beta"] = BETA_E
    return b


def build_def_o() -> FixtureBundle:
    b = _bundle("DEF-O", _m6(), "1", GappedMonoid([BETA_O]), 2, {(BETA_O, ()): {"q": 1}})
    b.notes["beta"] = BETA_O
    return b


CATALOG = {
    "PT": build_pt,
    "S1": build_s1,
    "M6": build_m6,
    "M6i": build_m6_iota,
    "M6i-C": build_m6_iota_curved,
    "N3": build_n3,
    "DEF-E": build_def_e,
    "DEF-O": build_def_o,
}
ALIASES = {"M6ι": "M6i", "M6I": "M6i", "DEFE": "DEF-E", "DEFO": "DEF-O"}


def build_fixture(name: str) -> FixtureBundle:
    key = ALIASES.get(name, name)
    if key not in CATALOG:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(CATALOG)}")
    return CATALOG[key]()


def fixture_names() -> list[str]:
    return list(CATALOG)
