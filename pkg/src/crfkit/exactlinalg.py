"""Exact linear algebra over Q(i): rank, echelon forms, kernels, inverses.

Matrices are lists of lists of GaussRational.  Rank uses fraction-free
(Bareiss) elimination after clearing denominators; pivoting is deterministic,
first nonzero entry scanning rows top to bottom, columns left to right, so
identical inputs give identical eliminations.
"""

from __future__ import annotations

from fractions import Fraction

from .scalar import GR_ONE, GR_ZERO, GaussRational

Matrix = list[list[GaussRational]]


def mat_copy(m: Matrix) -> Matrix:
    return [list(row) for row in m]


def clear_denominators(m: Matrix) -> Matrix:
    """Scale each row by the lcm of its entry denominators (rank-preserving)."""
    out = []
    for row in m:
        lcm = 1
        for e in row:
            for d in (e.re.denominator, e.im.denominator):
                lcm = lcm * d // _gcd(lcm, d)
        out.append([e * lcm for e in row])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rank(m: Matrix) -> int:
    """Exact rank by single-step fraction-free elimination."""
    if not m or not m[0]:
        return 0
    a = clear_denominators(m)
    rows, cols = len(a), len(a[0])
    r = 0
    prev = GR_ONE
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not a[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev
            a[i][c] = GR_ZERO
        prev = a[r][c]
        r += 1
        if r == rows:
            break
    return r


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (field operations) and pivot column list."""
    a = mat_copy(m)
    if not a or not a[0]:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not a[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [e / inv for e in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def kernel_basis(m: Matrix, cols: int) -> list[list[GaussRational]]:
    """Basis of the right kernel; deterministic, one vector per free column.

    Each basis vector has entry 1 at its free column, making the basis the
    lexicographically-least echelon kernel basis.
    """
    if not m:
        return [[GR_ONE if i == j else GR_ZERO for i in range(cols)]
                for j in range(cols)]
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [GR_ZERO] * cols
        v[fc] = GR_ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(m: Matrix, rhs: list[GaussRational]) -> list[GaussRational] | None:
    """One solution of M x = rhs, or None if inconsistent."""
    if not m:
        return None if any(not e.is_zero() for e in rhs) else []
    rows, cols = len(m), len(m[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    for r in range(len(pivots) if pivots else 0, rows):
        if all(red[r][c].is_zero() for c in range(cols)) and not red[r][cols].is_zero():
            return None
    # also catch a pivot landing in the rhs column
    if pivots and pivots[-1] == cols:
        return None
    x = [GR_ZERO] * cols
    for r, pc in enumerate(pivots):
        if pc < cols:
            x[pc] = red[r][cols]
    return x


def invert(m: Matrix) -> Matrix | None:
    """Inverse of a square matrix, or None if singular."""
    n = len(m)
    aug = [list(row) + [GR_ONE if i == j else GR_ZERO for j in range(n)]
           for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in red[:n]]


def column_space_basis(m: Matrix) -> list[list[GaussRational]]:
    """Deterministic basis of the column space (pivot columns of m)."""
    if not m or not m[0]:
        return []
    _, pivots = rref(m)
    return [[m[r][c] for r in range(len(m))] for c in pivots]
