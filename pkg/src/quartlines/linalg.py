"""Dense linear algebra over a field (scalars with +, -, *, / and truthiness)."""
from __future__ import annotations


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None, one=None):
    """Basis of {v : rows * v = 0}; ``one`` supplies the field's unit if rows is empty."""
    if rows:
        ncols = len(rows[0])
        unit = next((v for r in rows for v in r if v), None)
        one = unit / unit if unit is not None else one
    zero = one * 0
    m, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][f]
        basis.append(v)
    return basis


def inverse(rows):
    n = len(rows)
    one = next(v for r in rows for v in r if v)
    one = one / one
    zero = one * 0
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


def matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), A[0][0] * 0) for j in range(len(B[0]))]
            for i in range(len(A))]


def matvec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), A[0][0] * 0) for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


def complete_basis(vectors, n: int, one):
    """Extend independent vectors to a basis of the n-space with standard vectors."""
    zero = one * 0
    basis = [list(v) for v in vectors]
    for i in range(n):
        if len(basis) == n:
            break
        e = [zero] * n
        e[i] = one
        if rank(basis + [e]) > len(basis):
            basis.append(e)
    return basis
