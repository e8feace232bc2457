"""Dense exact linear algebra over the rationals (row-reduction based)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns (reduced rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(matrix: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : matrix x = 0}, one vector per free column (RREF normalized)."""
    if not matrix:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence, ncols: int) -> list[Fraction] | None:
    """One solution of matrix x = rhs (free variables set to zero), or None."""
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]] | None:
    n = len(matrix)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(matrix)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]


def independent_subset(vectors: Sequence[Sequence], base: Sequence[Sequence] = ()) -> list[int]:
    """Indices of a greedy maximal subset of ``vectors`` independent modulo span(base)."""
    chosen: list[int] = []
    current = [list(b) for b in base]
    r = rank(current)
    for i, v in enumerate(vectors):
        trial = current + [list(v)]
        rr = rank(trial)
        if rr > r:
            current, r = trial, rr
            chosen.append(i)
    return chosen


def determinant(matrix: Sequence[Sequence]):
    """Division-free determinant (Laplace expansion memoized on column subsets).

    Works for any commutative ring elements supporting +, -, *.
    """
    n = len(matrix)
    if n == 0:
        return 1
    memo: dict[int, object] = {0: 1}
    # memo[mask] = det of the minor formed by the last popcount(mask) rows and columns in mask
    for size in range(1, n + 1):
        row = n - size
        new: dict[int, object] = {}
        for mask, sub in memo.items():
            if bin(mask).count("1") != size - 1:
                continue
            for c in range(n):
                if mask & (1 << c):
                    continue
                a = matrix[row][c]
                if not a or not sub:
                    continue
                # sign: number of columns in mask left of c
                left = bin(mask & ((1 << c) - 1)).count("1")
                term = a * sub if left % 2 == 0 else -(a * sub)
                key = mask | (1 << c)
                new[key] = new[key] + term if key in new else term
        memo = new
        if not memo:
            return 0
    return memo.get((1 << n) - 1, 0)
