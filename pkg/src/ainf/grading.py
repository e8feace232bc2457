"""Bidegrees, exact coefficient rings, graded modules and graded matrices.

Every coefficient is either a ``Fraction`` (the rationals) or a ``Poly``
(rational polynomials in alpha_1..alpha_n, each of bidegree (2, 0)).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import NotNilpotent, NotUnipotent, ParseError


def parity_sign(exponent: int) -> int:
    return -1 if exponent & 1 else 1


@dataclass(frozen=True, order=True)
class Bidegree:
    codim: int
    ls: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ls", self.ls % 2)

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.codim + other.codim, self.ls + other.ls)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.codim - other.codim, self.ls - other.ls)

    def __neg__(self) -> "Bidegree":
        return Bidegree(-self.codim, -self.ls)

    def shift(self, p: int, q: int = 0) -> "Bidegree":
        return Bidegree(self.codim + p, self.ls + q)

    def __str__(self) -> str:
        return f"({self.codim},{self.ls})"


def koszul_sign(d: int, degrees: Iterable[Bidegree]) -> int:
    """Sign (-1)^(d * sum(codim - 1)) for moving a degree-d map past ``degrees``."""
    return parity_sign(d * sum(g.codim - 1 for g in degrees))


# ---------------------------------------------------------------- polynomials

class Poly:
    """Sparse polynomial with rational coefficients, keyed by exponent vectors."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, Fraction] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if c:
                    clean[tuple(exps)] = Fraction(c)
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "Poly":
        exps = [0] * nvars
        exps[j - 1] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    def _lift(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(self.nvars, {e: c / other for e, c in self.terms.items()})
        if isinstance(other, Poly) and other.is_constant() and other:
            return self / other.constant_term()
        return NotImplemented

    def __pow__(self, n: int):
        out = Poly.constant(self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_term())
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int | None:
        """Total degree if homogeneous (None for zero); raises if inhomogeneous."""
        degs = {sum(e) for e in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous polynomial {self}")
        return degs.pop()

    def min_degree(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def evaluate(self, values: Mapping[int, Fraction] | None = None):
        """Substitute alpha_j -> values[j] (1-based); missing variables are kept."""
        values = values or {}
        out: dict = {}
        for e, c in self.terms.items():
            coeff = c
            rest = list(e)
            for j, v in values.items():
                coeff *= Fraction(v) ** e[j - 1]
                rest[j - 1] = 0
            key = tuple(rest)
            out[key] = out.get(key, 0) + coeff
        return Poly(self.nvars, out)

    def __str__(self):
        return format_poly(self)

    __repr__ = __str__


def _format_monomial(exps: tuple) -> str:
    parts = []
    for j, e in enumerate(exps, start=1):
        if e == 1:
            parts.append(f"a{j}")
        elif e > 1:
            parts.append(f"a{j}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    out = []
    for i, (exps, c) in enumerate(items):
        mono = _format_monomial(exps)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


_TERM = re.compile(r"[+-]?[^+-]+")
_VAR = re.compile(r"a(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, nvars: int) -> Poly:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial literal")
    if s[0] not in "+-":
        s = "+" + s
    # split keeps the sign attached to each term
    pieces = re.findall(r"[+-][^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"bad polynomial literal {text!r}")
    total = Poly(nvars)
    for piece in pieces:
        sign = -1 if piece[0] == "-" else 1
        coeff = Fraction(sign)
        exps = [0] * nvars
        for factor in piece[1:].split("*"):
            m = _VAR.match(factor)
            if m:
                j = int(m.group(1))
                if not 1 <= j <= nvars:
                    raise ValueError(f"variable a{j} outside a1..a{nvars}")
                exps[j - 1] += int(m.group(2) or 1)
            else:
                coeff *= Fraction(factor)
        total = total + Poly(nvars, {tuple(exps): coeff})
    return total


# ---------------------------------------------------------------- rings

@dataclass(frozen=True)
class CoefficientRing:
    """The rationals (num_alphas == 0) or Q[alpha_1..alpha_n]."""

    num_alphas: int = 0

    @property
    def kind(self) -> str:
        return "rationals" if self.num_alphas == 0 else "polynomial-ring"

    @property
    def is_field(self) -> bool:
        return self.num_alphas == 0

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        if self.num_alphas == 0:
            if isinstance(x, Poly):
                if not x.is_constant():
                    raise ValueError(f"{x} is not a rational number")
                return x.constant_term()
            return Fraction(x)
        if isinstance(x, Poly):
            if x.nvars != self.num_alphas:
                raise ValueError("polynomial has the wrong number of variables")
            return x
        return Poly.constant(self.num_alphas, x)

    def alpha(self, j: int) -> Poly:
        return Poly.variable(self.num_alphas, j)

    def alpha_degree(self, c) -> int:
        """Polynomial degree of a homogeneous coefficient (0 for rationals)."""
        if isinstance(c, Poly):
            deg = c.degree()
            return 0 if deg is None else deg
        return 0

    def specialize(self, c) -> Fraction:
        """Reduction modulo the ideal generated by the alphas."""
        if isinstance(c, Poly):
            return c.constant_term()
        return Fraction(c)

    def parse(self, text: str):
        text = text.strip()
        if self.num_alphas == 0:
            return Fraction(text.replace(" ", ""))
        return parse_poly(text, self.num_alphas)

    def format(self, c) -> str:
        if isinstance(c, Poly):
            return format_poly(c)
        return str(Fraction(c))

    def describe(self) -> str:
        return "rationals" if self.num_alphas == 0 else f"polynomial {self.num_alphas}"

    @classmethod
    def from_description(cls, text: str) -> "CoefficientRing":
        parts = text.split()
        if parts == ["rationals"]:
            return cls(0)
        if len(parts) == 2 and parts[0] == "polynomial":
            return cls(int(parts[1]))
        raise ValueError(f"unknown ring {text!r}")


RATIONALS = CoefficientRing(0)


# ---------------------------------------------------------------- vectors
# A vector is a dict basis-name -> nonzero coefficient.

def vadd(acc: dict, vec: Mapping, scale=1) -> dict:
    for k, c in vec.items():
        v = acc.get(k, 0) + c * scale
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def vscale(vec: Mapping, scale) -> dict:
    out = {}
    for k, c in vec.items():
        v = c * scale
        if v:
            out[k] = v
    return out


def vclean(vec: Mapping) -> dict:
    return {k: c for k, c in vec.items() if c}


def vsub(u: Mapping, v: Mapping) -> dict:
    return vadd(dict(u), v, -1)


# ---------------------------------------------------------------- modules

class GradedModule:
    """Finite free module with an ordered basis of (name, Bidegree) pairs."""

    def __init__(self, basis: Iterable[tuple[str, Bidegree]], ring: CoefficientRing = RATIONALS):
        self.basis = [(n, g if isinstance(g, Bidegree) else Bidegree(*g)) for n, g in basis]
        self.ring = ring
        self.names = [n for n, _ in self.basis]
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")
        self._deg = dict(self.basis)
        self._index = {n: i for i, n in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def __contains__(self, name) -> bool:
        return name in self._deg

    def __eq__(self, other):
        return isinstance(other, GradedModule) and self.basis == other.basis and self.ring == other.ring

    def __hash__(self):
        return hash((tuple(self.basis), self.ring))

    def degree(self, name: str) -> Bidegree:
        return self._deg[name]

    def index(self, name: str) -> int:
        return self._index[name]

    def names_of_degree(self, g: Bidegree) -> list[str]:
        return [n for n, h in self.basis if h == g]

    def degrees(self) -> list[Bidegree]:
        return sorted(set(self._deg.values()))

    def with_ring(self, ring: CoefficientRing) -> "GradedModule":
        return GradedModule(self.basis, ring)

    def element_degree(self, vec: Mapping) -> Bidegree | None:
        """Total bidegree of a homogeneous vector, counting alpha-degrees; None for zero."""
        found = None
        for name, c in vec.items():
            g = self._deg[name].shift(2 * self.ring.alpha_degree(c))
            if found is None:
                found = g
            elif found != g:
                raise ValueError(f"inhomogeneous vector {vec}")
        return found

    def format_vector(self, vec: Mapping) -> str:
        if not vec:
            return "0"
        parts = []
        for name in self.names:
            if name in vec:
                c = vec[name]
                if isinstance(c, Poly):
                    parts.append(f"({format_poly(c)})*{name}")
                else:
                    parts.append(f"{c}*{name}")
        return " + ".join(parts)

    def parse_vector(self, text: str) -> dict:
        text = text.strip()
        if text in ("", "0"):
            return {}
        out: dict = {}
        for term in _split_top_level(text):
            term = term.strip()
            if not term:
                continue
            coeff_text, sep, name = term.rpartition("*")
            if not sep:
                coeff_text, name = "1", term
            name = name.strip()
            if name not in self:
                raise ValueError(f"unknown basis element {name!r}")
            coeff_text = coeff_text.strip()
            if coeff_text.startswith("(") and coeff_text.endswith(")"):
                coeff_text = coeff_text[1:-1]
            if coeff_text in ("", "+"):
                coeff_text = "1"
            elif coeff_text == "-":
                coeff_text = "-1"
            vadd(out, {name: self.ring.parse(coeff_text)})
        return out


def _split_top_level(text: str) -> list[str]:
    """Split on ' + ' outside parentheses."""
    parts, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(" + ", i):
            parts.append("".join(cur))
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------- matrices

class GradedMatrix:
    """Sparse linear map between graded modules of a fixed bidegree.

    Degrees are checked at construction: a nonzero entry (row, col) with
    coefficient c must satisfy deg(row) = deg(col) + degree + (2*deg_alpha(c), 0).
    """

    def __init__(self, source: GradedModule, target: GradedModule, degree: Bidegree,
                 entries: Mapping[tuple[str, str], object], check: bool = True):
        self.source = source
        self.target = target
        self.degree = degree
        ring = target.ring
        cols: dict[str, dict] = {}
        for (row, col), c in entries.items():
            if not c:
                continue
            c = ring.coerce(c)
            if check:
                if row not in target or col not in source:
                    raise ValueError(f"entry ({row}, {col}) outside the modules")
                expected = source.degree(col) + degree
                got = target.degree(row).shift(2 * ring.alpha_degree(c))
                if got != expected:
                    raise ValueError(
                        f"entry ({row}, {col}) = {ring.format(c)} breaks degree {degree}: "
                        f"{got} != {expected}")
            cols.setdefault(col, {})[row] = c
        self.cols = cols

    @classmethod
    def identity(cls, module: GradedModule) -> "GradedMatrix":
        return cls(module, module, Bidegree(0, 0), {(n, n): 1 for n in module.names})

    @classmethod
    def zero(cls, source, target, degree=Bidegree(0, 0)) -> "GradedMatrix":
        return cls(source, target, degree, {})

    @classmethod
    def from_columns(cls, source, target, degree, columns: Mapping[str, Mapping], check=True):
        entries = {}
        for col, vec in columns.items():
            for row, c in vec.items():
                entries[(row, col)] = c
        return cls(source, target, degree, entries, check=check)

    @classmethod
    def from_function(cls, source, target, degree, fn: Callable[[str], Mapping]):
        return cls.from_columns(source, target, degree, {n: fn(n) for n in source.names})

    @property
    def entries(self) -> dict:
        return {(r, c): v for c, col in self.cols.items() for r, v in col.items()}

    def entry(self, row: str, col: str):
        return self.cols.get(col, {}).get(row, self.target.ring.zero)

    def column(self, col: str) -> dict:
        return self.cols.get(col, {})

    def apply(self, vec: Mapping) -> dict:
        out: dict = {}
        for name, c in vec.items():
            col = self.cols.get(name)
            if col:
                vadd(out, col, c)
        return out

    __call__ = apply

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        cols = {n: self.apply(other.column(n)) for n in other.source.names}
        return GradedMatrix.from_columns(other.source, self.target, self.degree + other.degree,
                                         cols, check=False)

    def _combine(self, other: "GradedMatrix", scale) -> "GradedMatrix":
        cols = {}
        for n in self.source.names:
            v = vadd(dict(self.column(n)), other.column(n), scale)
            if v:
                cols[n] = v
        degree = self.degree if self.cols else other.degree
        return GradedMatrix.from_columns(self.source, self.target, degree, cols, check=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "GradedMatrix":
        cols = {n: vscale(col, c) for n, col in self.cols.items()}
        return GradedMatrix.from_columns(self.source, self.target, self.degree, cols, check=False)

    def is_zero(self) -> bool:
        return not any(self.cols.values())

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (self.source.names == other.source.names and self.target.names == other.target.names
                and (self - other).is_zero())

    def __hash__(self):
        return id(self)

    def twisted(self) -> "GradedMatrix":
        """x -> (-1)^{codim x} M x, the sign-twisted version used for m_{1,0}."""
        cols = {n: vscale(col, parity_sign(self.source.degree(n).codim))
                for n, col in self.cols.items()}
        return GradedMatrix.from_columns(self.source, self.target, self.degree, cols, check=False)

    def map_coefficients(self, fn, source=None, target=None) -> "GradedMatrix":
        source = source or self.source
        target = target or self.target
        cols = {n: vclean({r: fn(c) for r, c in col.items()}) for n, col in self.cols.items()}
        return GradedMatrix.from_columns(source, target, self.degree, cols)

    def __repr__(self):
        rows = []
        for col in self.source.names:
            if self.cols.get(col):
                rows.append(f"{col} -> {self.target.format_vector(self.cols[col])}")
        return "GradedMatrix(" + "; ".join(rows) + ")"


def unipotent_inverse(M: GradedMatrix) -> GradedMatrix:
    """Inverse of Identity + N with N alpha-positive, by the finite Neumann series."""
    if M.source.names != M.target.names:
        raise ValueError("unipotent_inverse needs a square matrix")
    if M.degree != Bidegree(0, 0):
        raise ValueError("unipotent_inverse needs a degree (0,0) matrix")
    ident = GradedMatrix.identity(M.source)
    nil = ident - M
    ring = M.target.ring
    for (row, col), c in nil.entries.items():
        if ring.specialize(c) != 0:
            raise NotUnipotent(f"entry ({row}, {col}) of Identity - M has a nonzero constant term")
    codims = [g.codim for _, g in M.source.basis] + [g.codim for _, g in M.target.basis]
    span = (max(codims) - min(codims)) if codims else 0
    bound = span // 2 + 1
    total = ident
    power = ident
    for _ in range(bound):
        power = power @ nil
        if power.is_zero():
            break
        total = total + power
    else:
        if not (power @ nil).is_zero():
            raise NotNilpotent(f"Neumann series did not terminate within {bound + 1} terms")
    assert (M @ total) == ident and (total @ M) == ident
    return total
