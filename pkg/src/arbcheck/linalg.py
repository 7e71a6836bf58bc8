"""Exact Gaussian elimination utilities over Fraction vectors."""

from __future__ import annotations

from fractions import Fraction

from .rationals import Vec, ZERO, is_zero_vec


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (reduced rows, pivot columns)."""
    mat = [list(row) for row in rows]
    if not mat:
        return [], []
    n = len(mat[0])
    pivots: list[int] = []
    r = 0
    for col in range(n):
        pivot_row = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [a * inv for a in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows) -> int:
    reduced, _ = rref([list(r) for r in rows])
    return len(reduced)


def row_space_basis(rows) -> list[Vec]:
    reduced, _ = rref([list(r) for r in rows])
    return [tuple(r) for r in reduced]


def nullspace_basis(n: int, rows) -> list[Vec]:
    """Basis of {x in Q^n : row . x = 0 for every row}."""
    reduced, pivots = rref([list(r) for r in rows])
    free_cols = [c for c in range(n) if c not in pivots]
    basis: list[Vec] = []
    for fc in free_cols:
        x = [ZERO] * n
        x[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -reduced[r][fc]
        basis.append(tuple(x))
    return basis


def solve_linear(rows, rhs) -> Vec | None:
    """One solution of A x = b, or None when inconsistent."""
    mat = [list(r) + [b] for r, b in zip(rows, rhs, strict=True)]
    if not mat:
        return ()
    n = len(rows[0])
    reduced, pivots = rref(mat)
    for row in reduced:
        if is_zero_vec(tuple(row[:n])) and row[n] != 0:
            return None
    x = [ZERO] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = reduced[r][n]
    return tuple(x)


def independent_subset(vectors: list[Vec]) -> list[int]:
    """Indices of a maximal linearly independent subset, scanned in order."""
    chosen: list[int] = []
    stack: list[list[Fraction]] = []
    for idx, v in enumerate(vectors):
        if is_zero_vec(v):
            continue
        trial = stack + [list(v)]
        if rank(trial) == len(trial):
            stack = trial
            chosen.append(idx)
    return chosen


def in_span(vectors: list[Vec], target: Vec) -> bool:
    if is_zero_vec(target):
        return True
    if not vectors:
        return False
    base = rank(vectors)
    return rank(list(vectors) + [target]) == base
