"""Plain-text structure files.

A file is a list of keyed sections::

    [name]     FREE-TEXT
    [ring]     rationals | polynomial <n>
    [basis]    <name> <codim> <ls>          (one per line)
    [monoid]   <E>,<mu>                     (one generator per line)
    [cutoff]   <E>
    [unit]     <name>
    [pairing]  shift <p> <q>, then lines  <u> , <v> -> <coeff>
    [ops]      <k> ; <E>,<mu> ; <in1>,...,<ink> -> <vector>
    [iota_a]   <name> -> <vector>           (T*-module contraction a, a = 1..n)
    [lie_a]    <name> -> <vector>           (optional; defaults to d iota + iota d)

Blank lines and text after '#' are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .ainfty import AInftyStructure, Operations, Pairing
from .errors import ParseError
from .grading import RATIONALS, Bidegree, CoefficientRing, GradedMatrix, GradedModule
from .novikov import ZERO, GappedMonoid, parse_element

_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)(?:_(\d+))?\s*\]$")
_KNOWN = {"name", "ring", "basis", "monoid", "cutoff", "unit", "pairing", "ops", "iota", "lie"}


@dataclass
class Document:
    structure: AInftyStructure
    tstar: object = None        # TStarModule when [iota_a] sections are present


def _sections(text: str, source: str | None) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            key, idx = m.group(1).lower(), m.group(2)
            if key not in _KNOWN:
                raise ParseError(f"unknown section [{line[1:-1]}]", lineno, source)
            if key in ("iota", "lie") and idx is None:
                raise ParseError(f"section [{key}] needs an index, e.g. [{key}_1]", lineno, source)
            current = (key, int(idx)) if idx else (key, None)
            if current in sections:
                raise ParseError(f"duplicate section {line}", lineno, source)
            sections[current] = []
            continue
        if current is None:
            raise ParseError("content before the first section", lineno, source)
        sections[current].append((lineno, line))
    return sections


def _single(sections, key, source):
    lines = sections.get((key, None), [])
    if len(lines) > 1:
        raise ParseError(f"[{key}] takes a single line", lines[1][0], source)
    return lines[0] if lines else None


def _vector(module: GradedModule, text: str, lineno: int, source):
    try:
        return module.parse_vector(text)
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        raise ParseError(f"bad vector {text!r}: {exc}", lineno, source) from None


def _matrix(sections, key, module, degree, source) -> GradedMatrix:
    cols: dict = {}
    for lineno, line in sections[key]:
        name, sep, rhs = line.partition("->")
        name = name.strip()
        if not sep or name not in module:
            raise ParseError(f"expected '<basis name> -> <vector>', got {line!r}", lineno, source)
        cols[name] = _vector(module, rhs, lineno, source)
    try:
        return GradedMatrix.from_columns(module, module, degree, cols)
    except ValueError as exc:
        raise ParseError(f"[{key[0]}_{key[1]}]: {exc}", sections[key][0][0], source) from None


def loads(text: str, source: str | None = None) -> Document:
    sections = _sections(text, source)
    ring = RATIONALS
    entry = _single(sections, "ring", source)
    if entry:
        try:
            ring = CoefficientRing.from_description(entry[1])
        except ValueError as exc:
            raise ParseError(str(exc), entry[0], source) from None

    basis = []
    for lineno, line in sections.get(("basis", None), []):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"basis line needs '<name> <codim> <ls>', got {line!r}", lineno, source)
        try:
            basis.append((parts[0], Bidegree(int(parts[1]), int(parts[2]))))
        except ValueError:
            raise ParseError(f"bad degree in {line!r}", lineno, source) from None
    if not basis:
        raise ParseError("missing or empty [basis] section", None, source)
    try:
        module = GradedModule(basis, ring)
    except ValueError as exc:
        raise ParseError(str(exc), sections[("basis", None)][0][0], source) from None

    gens = []
    for lineno, line in sections.get(("monoid", None), []):
        try:
            gens.append(parse_element(line))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
    try:
        monoid = GappedMonoid(gens)
    except Exception as exc:
        raise ParseError(str(exc), None, source) from None

    cutoff = Fraction(0)
    entry = _single(sections, "cutoff", source)
    if entry:
        try:
            cutoff = Fraction(entry[1])
        except ValueError:
            raise ParseError(f"bad cutoff {entry[1]!r}", entry[0], source) from None

    unit = None
    entry = _single(sections, "unit", source)
    if entry:
        unit = entry[1]
        if unit not in module:
            raise ParseError(f"unit {unit!r} is not a basis element", entry[0], source)

    name_entry = _single(sections, "name", source)
    name = name_entry[1] if name_entry else ""

    pairing = None
    if ("pairing", None) in sections:
        lines = sections[("pairing", None)]
        shift = None
        entries = {}
        for lineno, line in lines:
            if line.startswith("shift"):
                parts = line.split()
                if len(parts) != 3:
                    raise ParseError("expected 'shift <p> <q>'", lineno, source)
                shift = (int(parts[1]), int(parts[2]))
                continue
            lhs, sep, rhs = line.partition("->")
            pair = [s.strip() for s in lhs.split(",")]
            if not sep or len(pair) != 2 or any(p not in module for p in pair):
                raise ParseError(f"expected '<u> , <v> -> <coeff>', got {line!r}", lineno, source)
            try:
                entries[tuple(pair)] = ring.parse(rhs)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient {rhs.strip()!r}", lineno, source) from None
        if shift is None:
            raise ParseError("[pairing] needs a 'shift <p> <q>' line", lines[0][0] if lines else None, source)
        pairing = Pairing(module, shift, entries)

    table = {}
    for lineno, line in sections.get(("ops", None), []):
        parts = line.split(";")
        if len(parts) != 3:
            raise ParseError("ops line needs 'k ; E,mu ; inputs -> vector'", lineno, source)
        try:
            k = int(parts[0])
            beta = parse_element(parts[1])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
        inputs, sep, rhs = parts[2].partition("->")
        if not sep:
            raise ParseError("missing '->' in ops line", lineno, source)
        word = tuple(s.strip() for s in inputs.split(",") if s.strip())
        if len(word) != k:
            raise ParseError(f"arity {k} but {len(word)} inputs", lineno, source)
        for x in word:
            if x not in module:
                raise ParseError(f"unknown basis element {x!r}", lineno, source)
        if (beta, word) in table:
            raise ParseError(f"duplicate component {k};{beta};{','.join(word)}", lineno, source)
        table[(beta, word)] = _vector(module, rhs, lineno, source)

    A = AInftyStructure(module, Operations(table), monoid, cutoff, unit, pairing, name)

    iota_keys = sorted(i for key, i in sections if key == "iota")
    lie_keys = sorted(i for key, i in sections if key == "lie")
    tstar = None
    if iota_keys:
        from .equivariant import TStarModule
        if iota_keys != list(range(1, len(iota_keys) + 1)):
            raise ParseError("[iota_a] sections must be numbered 1..n", None, source)
        if lie_keys and lie_keys != iota_keys:
            raise ParseError("[lie_a] sections must match the [iota_a] sections", None, source)
        d = A.linear_part().twisted()
        iota = [_matrix(sections, ("iota", a), module, Bidegree(-1, 0), source) for a in iota_keys]
        lie = [_matrix(sections, ("lie", a), module, Bidegree(0, 0), source) for a in lie_keys] or None
        tstar = TStarModule(d, iota, lie)
    elif lie_keys:
        raise ParseError("[lie_a] without [iota_a]", None, source)
    return Document(A, tstar)


def load(path) -> Document:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))


def _word_key(module: GradedModule, word: tuple) -> tuple:
    return tuple(module.index(x) for x in word)


def dumps(A: AInftyStructure, tstar=None, k_max: int = 4) -> str:
    """Serialize a structure (lazy ones up to arity k_max), optionally with its T*-module."""
    mod = A.module
    ring = mod.ring
    out = []
    if A.name:
        out += ["[name]", A.name, ""]
    out += ["[ring]", ring.describe(), "", "[basis]"]
    out += [f"{n} {g.codim} {g.ls}" for n, g in mod.basis]
    out.append("")
    if A.monoid.generators:
        out.append("[monoid]")
        out += [f"{g.E},{g.mu}" for g in A.monoid.generators]
        out.append("")
    if A.cutoff:
        out += ["[cutoff]", str(A.cutoff), ""]
    if A.unit is not None:
        out += ["[unit]", A.unit, ""]
    if A.pairing is not None:
        p, q = A.pairing.shift
        out += ["[pairing]", f"shift {p} {q}"]
        for (u, v) in sorted(A.pairing.entries, key=lambda t: (mod.index(t[0]), mod.index(t[1]))):
            out.append(f"{u} , {v} -> {ring.format(A.pairing.entries[(u, v)])}")
        out.append("")
    out.append("[ops]")
    rows = sorted(A.entries(k_max), key=lambda t: (len(t[0]), t[1], _word_key(mod, t[0])))
    for word, beta, vec in rows:
        out.append(f"{len(word)} ; {beta.E},{beta.mu} ; {','.join(word)} -> {mod.format_vector(vec)}")
    if tstar is not None:
        for a, (iota, lie) in enumerate(zip(tstar.iota, tstar.lie), start=1):
            for label, M in ((f"iota_{a}", iota), (f"lie_{a}", lie)):
                out += ["", f"[{label}]"]
                for n in mod.names:
                    col = M.column(n)
                    if col:
                        out.append(f"{n} -> {mod.format_vector(col)}")
    return "\n".join(out) + "\n"


def dump(A: AInftyStructure, path, tstar=None, k_max: int = 4) -> None:
    Path(path).write_text(dumps(A, tstar, k_max), encoding="utf-8")
