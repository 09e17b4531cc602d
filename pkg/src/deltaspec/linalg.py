"""Exact linear solving over the field backends.

PrimeField uses ordinary Gaussian elimination, CyclotomicField uses
fraction-free (Bareiss) elimination, ComplexField uses partial pivoting with
the field tolerance and reports rank decisions that were close to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import PreconditionError

# pivots within this factor of the tolerance count as "near" a rank decision
NEAR_FACTOR = 1e3


@dataclass
class LinearSolution:
    solution: Optional[list]
    rank: int
    rank_augmented: int
    near_tolerance: bool = False

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def _check_dims(M, rhs):
    rows = len(M)
    if rows != len(rhs):
        raise PreconditionError(f"matrix has {rows} rows but rhs has {len(rhs)} entries")
    cols = len(M[0]) if rows else 0
    if any(len(row) != cols for row in M):
        raise PreconditionError("ragged matrix")
    return rows, cols


def solve_linear(field, M, rhs) -> LinearSolution:
    """Solve M v = rhs. Returns a solution iff rank(M) == rank([M | rhs])."""
    rows, cols = _check_dims(M, rhs)
    aug = [list(row) + [b] for row, b in zip(M, rhs)]
    if field.backend == "cyclo":
        pivots, near = _bareiss_echelon(field, aug, cols + 1), False
    else:
        pivots, near = _gauss_echelon(field, aug, cols + 1)
    rank = sum(1 for _, c in pivots if c < cols)
    rank_aug = len(pivots)
    if rank_aug > rank:
        return LinearSolution(None, rank, rank_aug, near)
    return LinearSolution(_back_substitute(field, aug, pivots, cols), rank, rank_aug, near)


def rank(field, M) -> int:
    if not M:
        return 0
    return solve_linear(field, M, [field.zero] * len(M)).rank


def _gauss_echelon(field, A, ncols):
    """Row echelon form in place; returns (pivot list [(row, col)], near flag)."""
    n = len(A)
    pivots = []
    near = False
    approx = not field.exact
    tol = getattr(field, "tolerance", 0.0)
    r = 0
    for c in range(ncols):
        if r == n:
            break
        if approx:
            best = max(range(r, n), key=lambda i: abs(A[i][c]))
            mag = abs(A[best][c])
            if mag <= tol * NEAR_FACTOR and mag > tol / NEAR_FACTOR:
                near = True
            if mag <= tol:
                continue
            piv = best
        else:
            piv = next((i for i in range(r, n) if not field.is_zero(A[i][c])), None)
            if piv is None:
                continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.inv(A[r][c])
        A[r] = [field.mul(x, inv) for x in A[r]]
        for i in range(r + 1, n):
            f = A[i][c]
            if not field.is_zero(f):
                A[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append((r, c))
        r += 1
    return pivots, near


def _bareiss_echelon(field, A, ncols):
    """Fraction-free echelon form: each step divides exactly by the previous pivot."""
    n = len(A)
    pivots = []
    prev = field.one
    r = 0
    for c in range(ncols):
        if r == n:
            break
        piv = next((i for i in range(r, n) if not field.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        prev_inv = field.inv(prev)
        for i in range(r + 1, n):
            a = A[i][c]
            row = A[i]
            prow = A[r]
            new = [field.zero] * len(row)
            for j in range(c + 1, len(row)):
                v = field.sub(field.mul(p, row[j]), field.mul(a, prow[j]))
                new[j] = field.mul(v, prev_inv) if not field.is_zero(v) else v
            A[i] = new
        # entries left of the pivot in rows below are exactly zero now
        prev = p
        pivots.append((r, c))
        r += 1
    return pivots


def _back_substitute(field, A, pivots, cols):
    x = [field.zero] * cols
    for r, c in reversed([(r, c) for r, c in pivots if c < cols]):
        s = A[r][cols]
        for j in range(c + 1, cols):
            if not field.is_zero(A[r][j]) and not field.is_zero(x[j]):
                s = field.sub(s, field.mul(A[r][j], x[j]))
        x[c] = field.div(s, A[r][c])
    return x


def matvec(field, M, v) -> list:
    return [field.sum(field.mul(a, b) for a, b in zip(row, v)) for row in M]


def nullspace(field, M) -> list:
    """Basis of {v : M v = 0} (exact backends)."""
    rows, cols = _check_dims(M, [None] * len(M))
    A = [list(row) for row in M]
    pivots, _ = _gauss_echelon(field, A, cols)
    pivot_cols = {c: r for r, c in pivots}
    basis = []
    for free in range(cols):
        if free in pivot_cols:
            continue
        v = [field.zero] * cols
        v[free] = field.one
        # rows are normalised to pivot 1 by _gauss_echelon
        for r, c in reversed(pivots):
            s = field.zero
            for j in range(c + 1, cols):
                if not field.is_zero(A[r][j]):
                    s = field.add(s, field.mul(A[r][j], v[j]))
            v[c] = field.neg(s)
        basis.append(v)
    return basis
