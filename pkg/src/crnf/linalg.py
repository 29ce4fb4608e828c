"""Dense exact linear algebra over Gaussian rationals.

Plain Gaussian elimination with exact pivoting; sizes here are tiny (4x4
step matrices) or moderate (the stacked oracle systems), so no fraction-free
tricks are needed.
"""

from __future__ import annotations

from .rationals import GaussRat, ONE, ZERO

__all__ = ["gauss_solve", "det", "det_expansion", "mat_mul", "mat_vec"]


def gauss_solve(matrix, rhs, inverse=False):
    """Solve matrix @ x = rhs exactly, or invert the matrix.

    matrix: list of rows of GaussRat. rhs: list (vector) or list of columns
    stacked as a matrix (list of rows); with inverse=True rhs is ignored and
    the inverse matrix is returned. Returns None when the matrix is singular.
    """
    n = len(matrix)
    a = [list(row) for row in matrix]
    if inverse:
        b = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        width = n
    elif rhs and isinstance(rhs[0], (list, tuple)):
        b = [list(row) for row in rhs]
        width = len(b[0])
    else:
        b = [[x] for x in rhs]
        width = 1

    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            return None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        b[col] = [x * inv for x in b[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = [x - f * y for x, y in zip(b[r], b[col])]

    if inverse or width > 1:
        return b
    return [row[0] for row in b]


def det(matrix):
    """Exact determinant by elimination."""
    n = len(matrix)
    a = [list(row) for row in matrix]
    out = ONE
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            return ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            out = -out
        out = out * a[col][col]
        inv = a[col][col].inverse()
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return out


def det_expansion(matrix):
    """Determinant by cofactor expansion.

    Works for entries of any commutative ring supporting +, -, * (e.g.
    polynomial MultiSeries), where elimination's divisions are unavailable.
    """
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * det_expansion(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), ZERO) for j in range(m)]
            for i in range(n)]


def mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v))), ZERO) for row in a]
