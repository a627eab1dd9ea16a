"""Exact rational linear algebra: Gaussian elimination, rank, null spaces.

Matrices are lists of row lists with ``Fraction`` (or int) entries.  All
routines are fraction-exact; nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]


def _clone(m: Matrix) -> Matrix:
    return [[Fraction(x) for x in row] for row in m]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = _clone(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def nullspace(m: Matrix) -> list[list[Fraction]]:
    """Basis of the right null space (vectors x with m @ x = 0)."""
    if not m:
        return []
    cols = len(m[0])
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fc]
        basis.append(v)
    return basis


def solve(m: Matrix, rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of m @ x = rhs, or None when inconsistent."""
    if not m:
        return [] if all(x == 0 for x in rhs) else None
    cols = len(m[0])
    aug = [row + [b] for row, b in zip(_clone(m), rhs)]
    a, pivots = rref(aug)
    for r in range(len(a)):
        if all(a[r][c] == 0 for c in range(cols)) and a[r][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        if pc == cols:
            return None
        x[pc] = a[r][cols]
    return x


def in_span(basis_cols: Matrix, vec: list[Fraction]) -> bool:
    """Whether ``vec`` lies in the column span of ``basis_cols`` (a matrix
    whose columns generate the subspace)."""
    return solve(basis_cols, vec) is not None
