"""Dense linear algebra over GF(q): echelon forms, kernels, named-unknown systems.

Vectors and matrix rows are tuples/lists of field elements (ints).  Everything
is deterministic: pivots are chosen left to right, kernel bases come out in
reduced row echelon form.
"""

from __future__ import annotations

from .gf import GF


def rref(K: GF, rows) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form.  Returns (rows, pivot column list); zero rows
    are dropped."""
    mat = [list(r) for r in rows]
    if mat:
        width = len(mat[0])
        for r in mat:
            if len(r) != width:
                raise ValueError("ragged matrix")
    pivots: list[int] = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = K.inv(mat[r][c])
        mat[r] = [K.mul(inv, x) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def kernel_basis(K: GF, rows, ncols: int) -> list[tuple[int, ...]]:
    """Basis of the right kernel {x : rows @ x = 0}, as RREF rows of the
    solution space (deterministic given input order)."""
    red, pivots = rref(K, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in zip(red, pivots):
            v[pc] = K.neg(r[fc])
        basis.append(v)
    out, _ = rref(K, basis)
    return [tuple(r) for r in out]


def solve_affine(K: GF, rows, rhs, ncols: int):
    """Solve rows @ x = rhs.  Returns (particular, kernel_basis) or None if
    inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(K, aug)
    for r, pc in zip(red, pivots):
        if pc == ncols:
            return None
    part = [0] * ncols
    for r, pc in zip(red, pivots):
        part[pc] = r[ncols]
    kern = kernel_basis(K, [r[:ncols] for r in red], ncols)
    return tuple(part), kern


class LinearSystem:
    """Homogeneous (optionally inhomogeneous) F_q-linear system in named
    unknowns.  Unknown order is first-appearance order unless declared up
    front with add_unknown, which makes results deterministic given input
    order."""

    def __init__(self, K: GF):
        self.K = K
        self.names: list = []
        self._index: dict = {}
        self.rows: list[dict] = []
        self.rhs: list[int] = []

    def add_unknown(self, name) -> int:
        if name in self._index:
            raise ValueError(f"duplicate unknown {name!r}")
        self._index[name] = len(self.names)
        self.names.append(name)
        return self._index[name]

    def _idx(self, name, create: bool) -> int:
        if name not in self._index:
            if not create:
                raise ValueError(f"unknown variable {name!r} in equation")
            self.add_unknown(name)
        return self._index[name]

    def add_equation(self, terms, rhs: int = 0, create: bool = True):
        """terms: iterable of (name, coeff).  Represents sum coeff*name = rhs."""
        row: dict[int, int] = {}
        K = self.K
        for name, c in terms:
            if c == 0:
                continue
            i = self._idx(name, create)
            row[i] = K.add(row.get(i, 0), c)
        self.rows.append(row)
        self.rhs.append(rhs)

    def _dense(self):
        ncols = len(self.names)
        return [[row.get(j, 0) for j in range(ncols)] for row in self.rows], ncols

    def kernel(self) -> list[tuple[int, ...]]:
        """Basis of the homogeneous solution space, vectors aligned with
        self.names.  The rhs values are ignored."""
        dense, ncols = self._dense()
        return kernel_basis(self.K, dense, ncols)

    def solve(self):
        """Particular solution + kernel for the inhomogeneous system, or None."""
        dense, ncols = self._dense()
        return solve_affine(self.K, dense, self.rhs, ncols)


def solve_fq(K: GF, equations, unknowns=None) -> list[tuple[int, ...]]:
    """Basis of the solution space of homogeneous equations over F_q.

    equations: list of mappings {unknown_name: coeff}.  unknowns: optional
    explicit ordered list of names; equations naming anything outside it are
    a dimension-mismatch error.  With no equations the identity basis on the
    unknowns is returned.
    """
    sys = LinearSystem(K)
    if unknowns is not None:
        for u in unknowns:
            sys.add_unknown(u)
    for eq in equations:
        try:
            sys.add_equation(eq.items(), create=unknowns is None)
        except ValueError as e:
            raise ValueError(f"malformed constraint: {e}") from None
    if unknowns is None and not sys.names:
        return []
    return sys.kernel()
