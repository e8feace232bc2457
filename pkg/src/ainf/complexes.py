"""Splitting a finite complex over the rationals as C = H + B + O with B = d(O)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import NotAField
from .grading import GradedMatrix, GradedModule, vclean


@dataclass
class Splitting:
    module: GradedModule
    dmat: GradedMatrix
    harmonic: list      # closed representatives spanning a complement of the image
    exact: list         # exact[i] = d(complement[i])
    complement: list    # O, a complement of the cycles
    labels: list        # one name per harmonic vector

    def cohomology_module(self) -> GradedModule:
        return GradedModule([(lab, self.module.element_degree(v)) for lab, v in zip(self.labels, self.harmonic)],
                            self.module.ring)

    def coordinates(self) -> dict:
        """name -> (H-coords, B-coords, O-coords) as lists of Fractions, per basis element."""
        out = {}
        groups = {}
        for kind, vecs in (("h", self.harmonic), ("b", self.exact), ("o", self.complement)):
            for i, v in enumerate(vecs):
                g = self.module.element_degree(v)
                groups.setdefault(g, []).append((kind, i, v))
        for g, items in groups.items():
            names = self.module.names_of_degree(g)
            cols = [[Fraction(v.get(n, 0)) for n in names] for _, _, v in items]
            # matrix with the chosen vectors as columns
            mat = [[cols[j][i] for j in range(len(items))] for i in range(len(names))]
            inv = linalg.inverse(mat)
            if inv is None:
                raise ValueError(f"splitting vectors do not form a basis in degree {g}")
            for i, n in enumerate(names):
                coords = {"h": {}, "b": {}, "o": {}}
                for j, (kind, idx, _) in enumerate(items):
                    if inv[j][i]:
                        coords[kind][idx] = inv[j][i]
                out[n] = coords
        for n in self.module.names:
            out.setdefault(n, {"h": {}, "b": {}, "o": {}})
        return out


def _vec(names, values) -> dict:
    return vclean({n: Fraction(c) for n, c in zip(names, values)})


def split_complex(module: GradedModule, dmat: GradedMatrix, unit: str | None = None) -> Splitting:
    """Greedy, deterministic splitting; the unit (if given and closed) is kept as a representative."""
    if not module.ring.is_field:
        raise NotAField("splitting needs field coefficients")
    harmonic, exact, complement, labels = [], [], [], []
    images: dict = {}
    degrees = module.degrees()
    for g in degrees:
        names = module.names_of_degree(g)
        target = module.names_of_degree(g + dmat.degree)
        mat = [[Fraction(dmat.entry(r, c)) for c in names] for r in target]
        cycles = [_vec(names, v) for v in linalg.nullspace(mat, len(names))] if target else \
            [{n: Fraction(1)} for n in names]
        as_rows = lambda vs: [[Fraction(v.get(n, 0)) for n in names] for v in vs]
        standard = [{n: Fraction(1)} for n in names]
        picked = linalg.independent_subset(as_rows(standard), as_rows(cycles))
        comp = [standard[i] for i in picked]
        complement.extend(comp)
        for o in comp:
            b = vclean(dmat.apply(o))
            exact.append(b)
            images.setdefault(g + dmat.degree, []).append(b)
    for g in degrees:
        names = module.names_of_degree(g)
        as_rows = lambda vs: [[Fraction(v.get(n, 0)) for n in names] for v in vs]
        bdry = images.get(g, [])
        target = module.names_of_degree(g + dmat.degree)
        mat = [[Fraction(dmat.entry(r, c)) for c in names] for r in target]
        cycles = [_vec(names, v) for v in linalg.nullspace(mat, len(names))] if target else \
            [{n: Fraction(1)} for n in names]
        candidates = []
        if unit is not None and unit in names and not dmat.column(unit):
            candidates.append({unit: Fraction(1)})
        candidates += [{n: Fraction(1)} for n in names if not dmat.column(n)]
        candidates += cycles
        picked = linalg.independent_subset(as_rows(candidates), as_rows(bdry))
        for i in picked:
            v = candidates[i]
            harmonic.append(v)
            lead = next(n for n in names if n in v)
            label = f"[{lead}]"
            while label in labels:
                label += "'"
            labels.append(label)
    return Splitting(module, dmat, harmonic, exact, complement, labels)


def cohomology_ranks(module: GradedModule, dmat: GradedMatrix) -> dict:
    """Bidegree -> dimension of cohomology."""
    sp = split_complex(module, dmat)
    out: dict = {}
    for v in sp.harmonic:
        g = module.element_degree(v)
        out[g] = out.get(g, 0) + 1
    return out


def has_even_cohomology(module: GradedModule, dmat: GradedMatrix) -> bool:
    return all(g.codim % 2 == 0 for g in cohomology_ranks(module, dmat))

