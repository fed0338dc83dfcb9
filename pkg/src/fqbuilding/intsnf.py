"""Sparse integer matrices and Smith normal form over Z.

All arithmetic is on Python ints (arbitrary precision, so no overflow class of
errors).  The SNF routine records every elementary row/column operation it
performs and self-verifies by replaying the log against a fresh copy of the
input: the replayed product of elementary (hence unimodular) transforms must
reproduce the returned diagonal exactly, and the diagonal must satisfy the
divisibility chain.  Pivoting prefers entries of minimal absolute value with
a minimal-fill tie-break to limit entry growth.
"""

from __future__ import annotations


class IntMatrix:
    """Immutable sparse integer matrix stored as {(i, j): value}, no zeros."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: dict | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        clean = {}
        for (i, j), v in (data or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i},{j}) out of bounds")
            if v:
                clean[(i, j)] = int(v)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", clean)

    def __setattr__(self, *a):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples) -> "IntMatrix":
        data = {}
        for i, j, v in triples:
            if (i, j) in data:
                raise ValueError(f"duplicate entry at ({i},{j})")
            data[(i, j)] = v
        return cls(rows, cols, data)

    @classmethod
    def from_dense(cls, dense) -> "IntMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, r in enumerate(dense)
                                for j, v in enumerate(r) if v})

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def nnz(self) -> int:
        return len(self.data)

    def get(self, i: int, j: int) -> int:
        return self.data.get((i, j), 0)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         {(j, i): v for (i, j), v in self.data.items()})

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        by_row: dict[int, list] = {}
        for (i, j), v in other.data.items():
            by_row.setdefault(i, []).append((j, v))
        acc: dict[tuple[int, int], int] = {}
        for (i, k), v in self.data.items():
            for j, w in by_row.get(k, ()):
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        return IntMatrix(self.rows, other.cols, acc)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.data.items())))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={len(self.data)})"


class SnfResult:
    __slots__ = ("diag", "rank", "torsion")

    def __init__(self, diag, rank, torsion):
        self.diag = list(diag)
        self.rank = rank
        self.torsion = list(torsion)

    def __repr__(self):
        return f"SnfResult(diag={self.diag}, rank={self.rank}, torsion={self.torsion})"


class _Work:
    """Mutable sparse matrix with an elementary-operation log."""

    def __init__(self, m: IntMatrix):
        self.nrows = m.rows
        self.ncols = m.cols
        self.rows: dict[int, dict[int, int]] = {}
        self.colsets: dict[int, set[int]] = {}
        for (i, j), v in m.data.items():
            self.rows.setdefault(i, {})[j] = v
            self.colsets.setdefault(j, set()).add(i)
        self.log: list[tuple] = []

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    def _set(self, i, j, v):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.colsets.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
                cs = self.colsets[j]
                cs.discard(i)
                if not cs:
                    del self.colsets[j]

    # elementary operations (each logged)

    def row_swap(self, a, b):
        if a == b:
            return
        self.log.append(("rswap", a, b))
        ra = self.rows.pop(a, {})
        rb = self.rows.pop(b, {})
        for j in ra:
            self.colsets[j].discard(a)
        for j in rb:
            self.colsets[j].discard(b)
        if rb:
            self.rows[a] = rb
            for j in rb:
                self.colsets.setdefault(j, set()).add(a)
        if ra:
            self.rows[b] = ra
            for j in ra:
                self.colsets.setdefault(j, set()).add(b)

    def col_swap(self, a, b):
        if a == b:
            return
        self.log.append(("cswap", a, b))
        ca = [i for i in self.colsets.get(a, ())]
        cb = [i for i in self.colsets.get(b, ())]
        vals_a = {i: self.rows[i][a] for i in ca}
        vals_b = {i: self.rows[i][b] for i in cb}
        for i in ca:
            self._set(i, a, 0)
        for i in cb:
            self._set(i, b, 0)
        for i, v in vals_a.items():
            self._set(i, b, v)
        for i, v in vals_b.items():
            self._set(i, a, v)

    def row_add(self, target, src, mult):
        if not mult:
            return
        self.log.append(("radd", target, src, mult))
        for j, v in list(self.rows.get(src, {}).items()):
            self._set(target, j, self.get(target, j) + mult * v)

    def col_add(self, target, src, mult):
        if not mult:
            return
        self.log.append(("cadd", target, src, mult))
        for i in list(self.colsets.get(src, ())):
            v = self.rows[i][src]
            self._set(i, target, self.get(i, target) + mult * v)

    def row_neg(self, i):
        self.log.append(("rneg", i))
        for j, v in list(self.rows.get(i, {}).items()):
            self.rows[i][j] = -v


def _replay(m: IntMatrix, log) -> dict:
    """Apply the op log to a fresh dense-dict copy; return final {(i,j): v}."""
    rows: dict[int, dict[int, int]] = {}
    for (i, j), v in m.data.items():
        rows.setdefault(i, {})[j] = v

    def set_(i, j, v):
        if v:
            rows.setdefault(i, {})[j] = v
        else:
            r = rows.get(i)
            if r and j in r:
                del r[j]
                if not r:
                    del rows[i]

    for op in log:
        kind = op[0]
        if kind == "rswap":
            _, a, b = op
            ra, rb = rows.pop(a, {}), rows.pop(b, {})
            if rb:
                rows[a] = rb
            if ra:
                rows[b] = ra
        elif kind == "cswap":
            _, a, b = op
            for r in rows.values():
                va, vb = r.pop(a, None), r.pop(b, None)
                if vb is not None:
                    r[a] = vb
                if va is not None:
                    r[b] = va
        elif kind == "radd":
            _, t, s, mlt = op
            for j, v in list(rows.get(s, {}).items()):
                cur = rows.get(t, {}).get(j, 0) + mlt * v
                set_(t, j, cur)
        elif kind == "cadd":
            _, t, s, mlt = op
            for i in list(rows):
                v = rows[i].get(s)
                if v is not None:
                    set_(i, t, rows[i].get(t, 0) + mlt * v)
        elif kind == "rneg":
            _, i = op
            for j in list(rows.get(i, {})):
                rows[i][j] = -rows[i][j]
        else:  # pragma: no cover
            raise AssertionError(f"unknown op {kind}")
    flat = {}
    for i, r in rows.items():
        for j, v in r.items():
            flat[(i, j)] = v
    return flat


def _sym_div(a: int, b: int) -> int:
    """Quotient with symmetric remainder: a - q*b in (-|b|/2, |b|/2]."""
    q, r = divmod(a, b)
    if 2 * r > abs(b):
        q += 1
    elif 2 * r < -abs(b):
        q -= 1
    return q


def _pick_pivot(w: _Work, k: int):
    """Deterministic pivot choice in the active region i, j >= k: prefer
    units, then minimal fill (Markowitz), then minimal |value|, then index.
    Taking the min of a total order makes the result independent of dict
    iteration order."""
    best = None
    for j, cs in w.colsets.items():
        if j < k or not cs:
            continue
        clen = len(cs)
        for i in cs:
            v = w.rows[i][j]
            av = -v if v < 0 else v
            key = (av != 1, (len(w.rows[i]) - 1) * (clen - 1), av, i, j)
            if best is None or key < best[0]:
                best = (key, i, j)
    if best is None:
        return None
    return best[1], best[2]


def _eliminate_at(w: _Work, k: int):
    """Clear row k and column k against the pivot at (k, k)."""
    while True:
        piv = w.get(k, k)
        assert piv != 0
        if piv < 0:
            w.row_neg(k)
            piv = -piv
        # reduce column k
        restart = False
        for i in sorted(w.colsets.get(k, ())):
            if i == k:
                continue
            q = _sym_div(w.rows[i][k], piv)
            w.row_add(i, k, -q)
            r = w.get(i, k)
            if r:
                w.row_swap(i, k)  # strictly smaller |pivot|
                restart = True
                break
        if restart:
            continue
        for j in sorted(w.rows.get(k, {})):
            if j == k:
                continue
            q = _sym_div(w.rows[k][j], piv)
            w.col_add(j, k, -q)
            r = w.get(k, j)
            if r:
                w.col_swap(j, k)
                restart = True
                break
        if restart:
            continue
        if set(w.colsets.get(k, ())) == {k} and set(w.rows.get(k, {})) == {k}:
            return


def _fix_chain(w: _Work, rank: int):
    """Restore d_i | d_{i+1} along the diagonal via logged 2x2 reductions."""
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = w.get(i, i), w.get(i + 1, i + 1)
            if b % a == 0:
                continue
            changed = True
            w.col_add(i, i + 1, 1)  # puts b at (i+1, i)
            # euclid in column i via row ops; terminates with gcd at (i, i)
            while w.get(i + 1, i):
                q = w.get(i, i) // w.get(i + 1, i)
                w.row_add(i, i + 1, -q)
                w.row_swap(i, i + 1)
            # clear the fill at (i, i+1)
            r = w.get(i, i + 1)
            if r:
                assert r % w.get(i, i) == 0
                w.col_add(i + 1, i, -(r // w.get(i, i)))
            if w.get(i, i) < 0:
                w.row_neg(i)
            if w.get(i + 1, i + 1) < 0:
                w.row_neg(i + 1)


def snf(m: IntMatrix) -> SnfResult:
    """Smith normal form diagonal, rank and torsion (invariant factors > 1).

    The diagonal is padded with zeros to length min(rows, cols) and satisfies
    d_1 | d_2 | ... ; verified internally by replaying the recorded unimodular
    operation log against the input.
    """
    w = _Work(m)
    k = 0
    limit = min(m.rows, m.cols)
    while k < limit:
        piv = _pick_pivot(w, k)
        if piv is None:
            break
        i, j = piv
        w.row_swap(i, k)
        w.col_swap(j, k)
        _eliminate_at(w, k)
        k += 1
    rank = k
    _fix_chain(w, rank)
    diag = [w.get(i, i) for i in range(rank)] + [0] * (limit - rank)

    final = _replay(m, w.log)
    expect = {(i, i): diag[i] for i in range(rank)}
    if final != expect:
        raise AssertionError("SNF self-check failed: op replay does not match diagonal")
    for i in range(rank - 1):
        if diag[i + 1] % diag[i]:
            raise AssertionError("SNF self-check failed: divisibility chain broken")
    torsion = [d for d in diag[:rank] if d > 1]
    return SnfResult(diag, rank, torsion)


def snf_with_transforms(m: IntMatrix):
    """SNF plus dense unimodular U (rows x rows) and V (cols x cols) with
    U @ m @ V = diag.  Intended for small matrices and tests."""
    w = _Work(m)
    k = 0
    limit = min(m.rows, m.cols)
    while k < limit:
        piv = _pick_pivot(w, k)
        if piv is None:
            break
        i, j = piv
        w.row_swap(i, k)
        w.col_swap(j, k)
        _eliminate_at(w, k)
        k += 1
    _fix_chain(w, k)
    diag = [w.get(i, i) for i in range(k)] + [0] * (limit - k)

    U = [[int(i == j) for j in range(m.rows)] for i in range(m.rows)]
    V = [[int(i == j) for j in range(m.cols)] for i in range(m.cols)]
    for op in w.log:
        kind = op[0]
        if kind == "rswap":
            _, a, b = op
            U[a], U[b] = U[b], U[a]
        elif kind == "radd":
            _, t, s, mlt = op
            U[t] = [x + mlt * y for x, y in zip(U[t], U[s])]
        elif kind == "rneg":
            _, i = op
            U[i] = [-x for x in U[i]]
        elif kind == "cswap":
            _, a, b = op
            for row in V:
                row[a], row[b] = row[b], row[a]
        elif kind == "cadd":
            _, t, s, mlt = op
            for row in V:
                row[t] += mlt * row[s]
    torsion = [d for d in diag[:k] if d > 1]
    return SnfResult(diag, k, torsion), U, V


def rank_z(m: IntMatrix) -> int:
    return snf(m).rank
