"""Tiny exact linear algebra over the Gaussian rationals."""

from __future__ import annotations

from typing import List, Sequence

from .scalars import Scalar


def nullspace(rows: Sequence[Sequence[Scalar]], n_vars: int) -> List[List[Scalar]]:
    """Basis of the solution space of rows . x = 0, by Gaussian elimination."""
    mat = [list(row) for row in rows if any(not c.is_zero() for c in row)]
    pivots: List[int] = []
    r = 0
    for col in range(n_vars):
        pivot_row = None
        for k in range(r, len(mat)):
            if not mat[k][col].is_zero():
                pivot_row = k
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = mat[r][col].inverse()
        mat[r] = [c * inv for c in mat[r]]
        for k in range(len(mat)):
            if k != r and not mat[k][col].is_zero():
                factor = mat[k][col]
                mat[k] = [a - factor * b for a, b in zip(mat[k], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(n_vars) if c not in pivots]
    basis = []
    for f in free:
        vec = [Scalar.zero()] * n_vars
        vec[f] = Scalar.one()
        for row_idx, p in enumerate(pivots):
            vec[p] = -mat[row_idx][f]
        basis.append(vec)
    return basis
