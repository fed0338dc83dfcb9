"""Small dense matrix helpers over K = F_q(t) and over A = F_q[t].

Matrices are tuples of row tuples.  Sizes here are r x r for r <= a handful,
so plain Gaussian elimination over the fraction field is exact and fast
enough.  Nothing in this module mutates its inputs.
"""

from __future__ import annotations

from .gf import GF
from .rfunc import Poly, Rat, rat_one, rat_zero


def freeze(mat):
    return tuple(tuple(row) for row in mat)


def kmat_zero(K: GF, rows: int, cols: int):
    z = rat_zero(K)
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def kmat_identity(K: GF, r: int):
    one, z = rat_one(K), rat_zero(K)
    return tuple(tuple(one if i == j else z for j in range(r)) for i in range(r))


def kmat_mul(A, B):
    n, m = len(A), len(B[0])
    inner = len(B)
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(m):
            acc = None
            for k in range(inner):
                a = Ai[k]
                b = B[k][j]
                if a.is_zero() or b.is_zero():
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else rat_zero(A[0][0].K))
        out.append(tuple(row))
    return tuple(out)


def kmat_vec(A, v):
    out = []
    for row in A:
        acc = rat_zero(row[0].K)
        for a, x in zip(row, v):
            if not (a.is_zero() or x.is_zero()):
                acc = acc + a * x
        out.append(acc)
    return tuple(out)


def kmat_det(A) -> Rat:
    n = len(A)
    K = A[0][0].K
    M = [list(row) for row in A]
    det = rat_one(K)
    sign = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not M[i][c].is_zero():
                piv = i
                break
        if piv is None:
            return rat_zero(K)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        det = det * M[c][c]
        inv = M[c][c].inv()
        for i in range(c + 1, n):
            if M[i][c].is_zero():
                continue
            f = M[i][c] * inv
            M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    if sign < 0:
        det = -det
    return det


def kmat_inv(A):
    n = len(A)
    K = A[0][0].K
    M = [list(row) + list(idrow) for row, idrow in zip(A, kmat_identity(K, n))]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not M[i][c].is_zero():
                piv = i
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix over K")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inv()
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return freeze(row[n:] for row in M)


def lower_tri_solve(H, x):
    """Solve H y = x for lower triangular H with nonzero diagonal."""
    n = len(H)
    y = []
    for i in range(n):
        acc = x[i]
        for j in range(i):
            if not (H[i][j].is_zero() or y[j].is_zero()):
                acc = acc - H[i][j] * y[j]
        y.append(acc / H[i][i])
    return tuple(y)


def kmat_from_poly(mat):
    """Lift a matrix of Poly entries to Rat entries."""
    return freeze(tuple(Rat(e) for e in row) for row in mat)


# --- matrices over A = F_q[t] ----------------------------------------------

def pmat_identity(K: GF, r: int):
    one = Poly(K, (1,))
    z = Poly(K)
    return tuple(tuple(one if i == j else z for j in range(r)) for i in range(r))


def pmat_mul(A, B):
    n, m = len(A), len(B[0])
    inner = len(B)
    K = A[0][0].K
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Poly(K)
            for k in range(inner):
                a, b = A[i][k], B[k][j]
                if a.coeffs and b.coeffs:
                    acc = acc + a * b
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def pmat_add(A, B):
    return freeze(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def pmat_scale(A, c: Poly):
    return freeze(tuple(c * a for a in row) for row in A)


def pmat_det(A) -> Poly:
    """Determinant over A by cofactor expansion (matrix sizes are tiny)."""
    n = len(A)
    if n == 1:
        return A[0][0]
    K = A[0][0].K
    acc = Poly(K)
    for j in range(n):
        if not A[0][j].coeffs:
            continue
        minor = tuple(tuple(row[k] for k in range(n) if k != j) for row in A[1:])
        term = A[0][j] * pmat_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def pmat_inv_unit_det(A):
    """Inverse of a matrix over A whose determinant is a nonzero constant.
    The inverse has entries in A again (computed via adjugate)."""
    n = len(A)
    K = A[0][0].K
    det = pmat_det(A)
    if det.is_zero() or not det.is_constant():
        raise ValueError("matrix is not invertible over A")
    dinv = K.inv(det.coeffs[0])
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(
                tuple(A[a][b] for b in range(n) if b != i) for a in range(n) if a != j
            )
            cof = pmat_det(minor) if n > 1 else Poly(K, (1,))
            if (i + j) % 2:
                cof = -cof
            row.append(cof.scale(dinv))
        out.append(tuple(row))
    return tuple(out)
