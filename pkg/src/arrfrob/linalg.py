"""Exact linear algebra over ``fractions.Fraction``.

Matrices are plain lists of row lists. Everything here stays exact; float
and complex work elsewhere goes through numpy. Dimensions in this package
are tiny (at most a few hundred rows), so Gauss-Jordan is plenty.
"""

from __future__ import annotations

from fractions import Fraction


def identity(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a]


def mat_mul(a, b):
    cols = len(b[0])
    return [
        [sum((row[m] * b[m][j] for m in range(len(b))), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def rref(rows, ncols=None):
    """Reduced row echelon form over the first ``ncols`` columns.

    Returns ``(reduced_rows, pivot_columns)``. Columns past ``ncols`` ride
    along (used for augmented systems).
    """
    m = [list(r) for r in rows]
    if not m:
        return m, []
    if ncols is None:
        ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv_p = Fraction(1) / m[r][c]
        m[r] = [x * inv_p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols):
    """Basis of the right kernel of the row list, in ``ncols`` unknowns.

    Each free column contributes one basis vector with a 1 in that slot.
    An empty row list yields the standard basis.
    """
    if rows:
        red, pivots = rref(rows, ncols)
    else:
        red, pivots = [], []
    basis = []
    for fc in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def det(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result *= m[c][c]
        inv_p = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv_p
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result if sign == 1 else -result


def solve(a, b):
    """Exact solution of ``a x = b``; raises ValueError when there is none
    or it is not unique."""
    ncols = len(a[0])
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug, ncols=ncols)
    if len(pivots) < ncols:
        raise ValueError("system is underdetermined or singular")
    for i in range(len(pivots), len(red)):
        if red[i][ncols] != 0:
            raise ValueError("system is inconsistent")
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def inv(a):
    n = len(a)
    aug = [list(row) + ident for row, ident in zip(a, identity(n))]
    red, pivots = rref(aug, ncols=n)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]
