"""Full-rank R-lattices in K^r, their canonical forms, relative position and
section spaces.

R is the valuation ring at infinity of K = F_q(t) with uniformizer pi = 1/t
(see rfunc).  A `Lattice` is a concrete R-lattice given by its canonical
Hermite basis: a lower triangular column basis H with H[i][i] = pi^(a_i) and,
below the diagonal, finite pi-Laurent polynomials reduced modulo pi^(a_i)
(exponents strictly below a_i).  The canonical matrix depends only on the
lattice, not on the presenting basis, so Lattice equality is matrix equality.

A `LatticeClass` is a homothety class: the canonical representative is the
unique scaling of the lattice whose minimal diagonal exponent is 0.  Classes
are the vertices of the building; concrete lattices form the poset on which
the contraction machinery (congruence module) acts.  Vertex type is
(-v(det H)) mod r on the normalized representative; the base class <R^r> has
type 0 and adjacent classes always differ in type.

Relative position of M with respect to L is the sorted exponent list
(a_1 <= ... <= a_r) with M = (+) pi^(a_i) f_i R for a common basis {f_i} of L;
building distance is a_r - a_1.  Sign convention: M "larger" in the pi^(-1)
direction gives negative exponents, e.g. rel_position(R^2, t^2 R (+) R) =
(-2, 0).
"""

from __future__ import annotations

from math import inf

from .gf import GF
from .fqlinalg import LinearSystem
from .matrices import freeze, kmat_vec, lower_tri_solve
from .rfunc import (
    Poly,
    Rat,
    laurent_coeffs,
    poly_one,
    rat_from_laurent,
    rat_one,
    rat_pi,
    rat_truncate,
    rat_zero,
)


class SingularBasisError(ValueError):
    """Raised when a presented basis does not span a full-rank lattice."""


def hermite_form(K: GF, mat):
    """Canonical lower-triangular Hermite form over R by column operations.

    mat: k x m (m >= k) matrix over Rat whose columns span a rank-k R-module.
    Returns the k x k canonical matrix; raises SingularBasisError on rank
    deficiency.  Pivot choice per row: column of minimal valuation, ties by
    column index.
    """
    M = [list(row) for row in mat]
    k = len(M)
    m = len(M[0]) if k else 0
    if m < k:
        raise SingularBasisError("fewer columns than ambient dimension")
    exps = []
    for i in range(k):
        piv_j, piv_v = None, inf
        for j in range(i, m):
            v = M[i][j].valuation
            if v < piv_v:
                piv_j, piv_v = j, v
        if piv_j is None or piv_v == inf:
            raise SingularBasisError("basis does not have full rank")
        if piv_j != i:
            for row in M:
                row[i], row[piv_j] = row[piv_j], row[i]
        a = piv_v
        exps.append(a)
        u = rat_pi(K, a) / M[i][i]  # unit of R; makes the pivot exactly pi^a
        for r in range(i, k):
            if not M[r][i].is_zero():
                M[r][i] = M[r][i] * u
        piv_inv = rat_pi(K, -a)
        for j in range(i + 1, m):
            if M[i][j].is_zero():
                continue
            c = M[i][j] * piv_inv  # in R by pivot minimality
            for r in range(i, k):
                if not M[r][i].is_zero():
                    M[r][j] = M[r][j] - c * M[r][i]
    # reduce below-diagonal entries modulo the diagonal of their row
    for j in range(k):
        for i in range(j + 1, k):
            x = M[i][j]
            if x.is_zero():
                continue
            red = rat_truncate(x, exps[i])
            if red == x:
                continue
            c = (x - red) * rat_pi(K, -exps[i])  # in R
            for r in range(i, k):
                if not M[r][i].is_zero():
                    M[r][j] = M[r][j] - c * M[r][i]
    return freeze(row[:k] for row in M)


class Lattice:
    """Concrete full-rank R-lattice, held by its canonical Hermite basis."""

    __slots__ = ("K", "dim", "mat", "diag_exps", "_inv", "_hash")

    def __init__(self, K: GF, mat, _canonical: bool = False):
        if not _canonical:
            mat = hermite_form(K, mat)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dim", len(mat))
        object.__setattr__(
            self, "diag_exps", tuple(mat[i][i].valuation for i in range(len(mat)))
        )
        object.__setattr__(self, "_inv", None)
        object.__setattr__(self, "_hash", hash((K.p, K.n, mat)))

    def __setattr__(self, *a):
        raise AttributeError("Lattice is immutable")

    @classmethod
    def from_columns(cls, K: GF, mat) -> "Lattice":
        return cls(K, mat)

    @classmethod
    def standard(cls, K: GF, r: int) -> "Lattice":
        one, z = rat_one(K), rat_zero(K)
        mat = freeze(tuple(one if i == j else z for j in range(r)) for i in range(r))
        return cls(K, mat, _canonical=True)

    @property
    def det_valuation(self) -> int:
        return sum(self.diag_exps)

    def scale(self, k: int) -> "Lattice":
        """pi^k * L; exact on the canonical form."""
        if k == 0:
            return self
        pk = rat_pi(self.K, k)
        mat = freeze(
            tuple(e if e.is_zero() else e * pk for e in row) for row in self.mat
        )
        return Lattice(self.K, mat, _canonical=True)

    def basis_inverse(self):
        """H^{-1}, cached (columns solve H x = e_i)."""
        if self._inv is None:
            K = self.K
            n = self.dim
            one, z = rat_one(K), rat_zero(K)
            cols = []
            for j in range(n):
                e = tuple(one if i == j else z for i in range(n))
                cols.append(lower_tri_solve(self.mat, e))
            inv = freeze(tuple(cols[j][i] for j in range(n)) for i in range(n))
            object.__setattr__(self, "_inv", inv)
        return self._inv

    def coords(self, vec):
        """Coordinates of an ambient vector with respect to the basis."""
        return lower_tri_solve(self.mat, vec)

    def contains_vector(self, vec) -> bool:
        return all(c.valuation >= 0 for c in self.coords(vec))

    def contains(self, other: "Lattice") -> bool:
        cols = [tuple(other.mat[i][j] for i in range(other.dim)) for j in range(other.dim)]
        return all(self.contains_vector(c) for c in cols)

    def sum_columns(self, cols) -> "Lattice":
        """Lattice generated by self together with extra column vectors."""
        joined = [list(row) + [c[i] for c in cols] for i, row in enumerate(self.mat)]
        return Lattice(self.K, joined)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.mat == other.mat and self.K == other.K

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Lattice(diag pi^{list(self.diag_exps)})"

    # --- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        sub = []
        for i in range(1, self.dim):
            row = []
            for j in range(i):
                e = self.mat[i][j]
                if e.is_zero():
                    row.append([0, []])
                else:
                    lo, cs = laurent_coeffs(e, self.diag_exps[i])
                    while cs and cs[-1] == 0:
                        cs.pop()
                    row.append([lo, cs])
            sub.append(row)
        return {"diag_exponents": list(self.diag_exps), "subdiagonal": sub}

    @classmethod
    def from_json_dict(cls, K: GF, d: dict) -> "Lattice":
        exps = list(d["diag_exponents"])
        r = len(exps)
        z = rat_zero(K)
        mat = [[z] * r for _ in range(r)]
        for i in range(r):
            mat[i][i] = rat_pi(K, exps[i])
        for i in range(1, r):
            for j in range(i):
                lo, cs = d["subdiagonal"][i - 1][j]
                mat[i][j] = rat_from_laurent(K, lo, cs)
        lat = cls(K, freeze(mat))
        if lat.to_json_dict() != {"diag_exponents": exps,
                                  "subdiagonal": d["subdiagonal"]}:
            raise ValueError("serialized lattice data is not in canonical form")
        return lat

    def sort_key(self):
        d = self.to_json_dict()
        return (
            tuple(d["diag_exponents"]),
            tuple(
                (lo, tuple(cs)) for row in d["subdiagonal"] for lo, cs in row
            ),
        )


class LatticeClass:
    """Homothety class of lattices; vertex of the building."""

    __slots__ = ("lattice", "vtype")

    def __init__(self, lattice: Lattice):
        shift = -min(lattice.diag_exps)
        if shift:
            lattice = lattice.scale(shift)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(
            self, "vtype", (-lattice.det_valuation) % lattice.dim
        )

    def __setattr__(self, *a):
        raise AttributeError("LatticeClass is immutable")

    @classmethod
    def from_columns(cls, K: GF, mat) -> "LatticeClass":
        return cls(Lattice(K, mat))

    @classmethod
    def standard(cls, K: GF, r: int) -> "LatticeClass":
        return cls(Lattice.standard(K, r))

    @property
    def K(self) -> GF:
        return self.lattice.K

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def __eq__(self, other):
        return isinstance(other, LatticeClass) and self.lattice == other.lattice

    def __hash__(self):
        return hash(("cls", self.lattice._hash))

    def __repr__(self):
        return f"<{self.lattice!r}, type {self.vtype}>"

    def to_json_dict(self) -> dict:
        return self.lattice.to_json_dict()

    @classmethod
    def from_json_dict(cls, K: GF, d: dict) -> "LatticeClass":
        return cls(Lattice.from_json_dict(K, d))

    def sort_key(self):
        return self.lattice.sort_key()


def canonical_class(K: GF, mat) -> LatticeClass:
    """Canonical homothety class of the column span of mat."""
    return LatticeClass.from_columns(K, mat)


def _as_lattice(x) -> Lattice:
    return x.lattice if isinstance(x, LatticeClass) else x


def rel_position(L, M) -> tuple[int, ...]:
    """Elementary-divisor exponents of M relative to L, sorted ascending.

    Computed from the Smith form over the DVR R of the transition matrix
    H_L^{-1} H_M; the sum equals v(det M) - v(det L)."""
    L, M = _as_lattice(L), _as_lattice(M)
    if L.dim != M.dim:
        raise ValueError("lattices live in different ambient spaces")
    n = L.dim
    cols = [L.coords(tuple(M.mat[i][j] for i in range(n))) for j in range(n)]
    T = [[cols[j][i] for j in range(n)] for i in range(n)]
    exps = []
    for step in range(n):
        bi, bj, bv = None, None, inf
        for i in range(step, n):
            for j in range(step, n):
                v = T[i][j].valuation
                if v < bv:
                    bi, bj, bv = i, j, v
        if bv == inf:
            raise SingularBasisError("singular transition matrix")
        T[step], T[bi] = T[bi], T[step]
        for row in T:
            row[step], row[bj] = row[bj], row[step]
        piv = T[step][step]
        for i in range(step + 1, n):
            if not T[i][step].is_zero():
                c = T[i][step] / piv
                T[i] = [x - c * y for x, y in zip(T[i], T[step])]
        for j in range(step + 1, n):
            if not T[step][j].is_zero():
                c = T[step][j] / piv
                for i in range(step, n):
                    T[i][j] = T[i][j] - c * T[i][step]
        exps.append(bv)
    out = tuple(sorted(exps))
    assert sum(out) == M.det_valuation - L.det_valuation
    return out


def distance(a, b) -> int:
    """Building distance between homothety classes: a_r - a_1 of the relative
    position (taken on any representatives; the value is scale-invariant)."""
    exps = rel_position(_as_lattice(a), _as_lattice(b))
    return exps[-1] - exps[0]


def adjacent(a, b) -> bool:
    return distance(a, b) == 1


# --- section spaces ---------------------------------------------------------


class SectionSpace:
    """F_q-basis of a space of matrices over A cut out by lattice and ideal
    conditions.  Basis matrices are tuples of tuples of Poly; `meta` records
    the degree-bound data that defined the search space."""

    __slots__ = ("K", "shape", "basis", "meta")

    def __init__(self, K: GF, shape, basis, meta):
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "shape", tuple(shape))
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "meta", meta)

    def __setattr__(self, *a):
        raise AttributeError("SectionSpace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _window(self, others=()):
        degs = {}
        mats = list(self.basis)
        for o in others:
            mats.extend(o)
        for mat in mats:
            for i, row in enumerate(mat):
                for j, e in enumerate(row):
                    d = degs.get((i, j), -1)
                    if e.coeffs and len(e.coeffs) - 1 > d:
                        degs[(i, j)] = len(e.coeffs) - 1
        slots = []
        for (i, j) in sorted(degs):
            for d in range(degs[(i, j)] + 1):
                slots.append((i, j, d))
        return slots

    def _vec(self, mat, slots):
        out = []
        for (i, j, d) in slots:
            cs = mat[i][j].coeffs
            out.append(cs[d] if d < len(cs) else 0)
        return out

    def contains_matrix(self, mat) -> bool:
        """Is mat in the F_q-span of the basis?"""
        from .fqlinalg import rref

        slots = self._window([ [mat] ])
        rows = [self._vec(b, slots) for b in self.basis]
        red, pivots = rref(self.K, rows)
        v = self._vec(mat, slots)
        for r, pc in zip(red, pivots):
            if v[pc]:
                f = v[pc]
                v = [self.K.sub(x, self.K.mul(f, y)) for x, y in zip(v, r)]
        return not any(v)

    def contains_space(self, other: "SectionSpace") -> bool:
        return all(self.contains_matrix(b) for b in other.basis)

    def intersect(self, other: "SectionSpace") -> "SectionSpace":
        """Intersection as F_q-subspaces of the common coefficient window."""
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        from .fqlinalg import kernel_basis

        slots = self._window([other.basis])
        a = [self._vec(b, slots) for b in self.basis]
        b = [self._vec(bb, slots) for bb in other.basis]
        if not a or not b:
            return SectionSpace(self.K, self.shape, (),
                                {"intersection": True})
        # x = u.a = w.b  <=>  (u, w) in kernel of [a^T | -b^T]
        rows = []
        for s in range(len(slots)):
            row = [ai[s] for ai in a] + [self.K.neg(bi[s]) for bi in b]
            rows.append(row)
        kern = kernel_basis(self.K, rows, len(a) + len(b))
        mats = []
        for vec in kern:
            m = _zero_pmat(self.K, self.shape)
            for coef, bm in zip(vec[: len(a)], self.basis):
                if coef:
                    m = [[x + y.scale(coef) for x, y in zip(r1, r2)]
                         for r1, r2 in zip(m, bm)]
            mats.append(freeze(m))
        mats = _echelonize_pmats(self.K, self.shape, mats)
        return SectionSpace(self.K, self.shape, mats, {"intersection": True})

    def to_json_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "basis": [
                [[list(e.coeffs) for e in row] for row in mat] for mat in self.basis
            ],
            "meta": {k: v for k, v in self.meta.items() if k != "src" and k != "tgt"},
        }


def _zero_pmat(K: GF, shape):
    z = Poly(K)
    return [[z for _ in range(shape[1])] for _ in range(shape[0])]


def _echelonize_pmats(K: GF, shape, mats):
    """Deterministic RREF of a list of Poly matrices viewed as coefficient
    vectors; drops dependent ones."""
    from .fqlinalg import rref

    degs = [[0] * shape[1] for _ in range(shape[0])]
    for m in mats:
        for i, row in enumerate(m):
            for j, e in enumerate(row):
                if e.coeffs:
                    degs[i][j] = max(degs[i][j], len(e.coeffs) - 1)
    slots = [(i, j, d) for i in range(shape[0]) for j in range(shape[1])
             for d in range(degs[i][j] + 1)]
    rows = []
    for m in mats:
        row = []
        for (i, j, d) in slots:
            cs = m[i][j].coeffs
            row.append(cs[d] if d < len(cs) else 0)
        rows.append(row)
    red, _ = rref(K, rows)
    out = []
    for rv in red:
        m = _zero_pmat(K, shape)
        for (slot, c) in zip(slots, rv):
            if c:
                i, j, d = slot
                cs = list(m[i][j].coeffs)
                while len(cs) <= d:
                    cs.append(0)
                cs[d] = c
                m[i][j] = Poly(K, cs)
        out.append(freeze(m))
    return out


def _neg_val_max(entries) -> int:
    """max(-v(e)) over nonzero entries; -inf if all zero (as a large negative)."""
    best = None
    for e in entries:
        if not e.is_zero():
            nv = -e.valuation
            if best is None or nv > best:
                best = nv
    return best


def matrix_sections(K: GF, shape, ideal_gen: Poly, conditions,
                    kill_vectors=()) -> SectionSpace:
    """F_q-basis of the matrices g over A, of the given shape, with all
    entries in (ideal_gen), satisfying g . src <= pi^(-m) . tgt for every
    condition (src, tgt, m) and g . w = 0 for every kill vector w.

    Degree bounds per entry come from the canonical matrices: a solution of a
    single condition is g = pi^(-m) H'' X H'^(-1) with X over R (H' = src
    basis, H'' = tgt basis), hence
    deg g_ij <= m + max_k(-v(H''_ik)) + max_l(-v(H'^(-1)_lj)); with several
    conditions the entrywise minimum applies.  The bounds are recorded in
    meta["deg_bounds"] and their maximum in meta["deg_bound"], the degree a
    brute-force search must reach for set equality.
    """
    if ideal_gen.is_zero() or ideal_gen.is_constant():
        raise ValueError("ideal generator must be nonzero and nonconstant")
    if not conditions:
        raise ValueError("at least one lattice condition is required")
    f = ideal_gen.monic()
    degf = len(f.coeffs) - 1
    rows_n, cols_n = shape
    bounds = [[None] * cols_n for _ in range(rows_n)]
    conds = []
    for (src, tgt, m) in conditions:
        if src.dim != cols_n or tgt.dim != rows_n:
            raise ValueError("condition lattice dimensions do not match shape")
        rowmax = [_neg_val_max(tgt.mat[i]) for i in range(rows_n)]
        src_inv = src.basis_inverse()
        colmax = [_neg_val_max([src_inv[l][j] for l in range(cols_n)])
                  for j in range(cols_n)]
        for i in range(rows_n):
            for j in range(cols_n):
                b = m + rowmax[i] + colmax[j]
                if bounds[i][j] is None or b < bounds[i][j]:
                    bounds[i][j] = b
        conds.append((src, tgt, m))

    sys = LinearSystem(K)
    slots = []
    for i in range(rows_n):
        for j in range(cols_n):
            dmax = bounds[i][j] - degf
            for d in range(dmax + 1):
                sys.add_unknown((i, j, d))
                slots.append((i, j, d))

    frat = Rat(f)
    if slots:
        for (src, tgt, m) in conds:
            tgt_inv = tgt.basis_inverse()
            pim = rat_pi(K, m)
            for a in range(rows_n):
                for b in range(cols_n):
                    # X = pi^m tgt^-1 (f delta) src must have X_ab in R
                    terms = {}
                    for i in range(rows_n):
                        if tgt_inv[a][i].is_zero():
                            continue
                        for j in range(cols_n):
                            if src.mat[j][b].is_zero():
                                continue
                            dmax = bounds[i][j] - degf
                            if dmax < 0:
                                continue
                            base = pim * frat * tgt_inv[a][i] * src.mat[j][b]
                            if base.is_zero():
                                continue
                            lo, cs = laurent_coeffs(base, dmax)
                            terms[(i, j)] = (lo, cs, dmax)
                    if not terms:
                        continue
                    emin = min(lo - dmax for (lo, cs, dmax) in terms.values())
                    for e in range(emin, 0):
                        eq = []
                        for (i, j), (lo, cs, dmax) in terms.items():
                            for d in range(dmax + 1):
                                idx = e + d - lo
                                if 0 <= idx < len(cs) and cs[idx]:
                                    eq.append(((i, j, d), cs[idx]))
                        if eq:
                            sys.add_equation(eq, create=False)
        for w in kill_vectors:
            # g . w = 0 row by row; clear denominators so the coefficient of
            # each unknown is a polynomial, then equate all t-coefficients
            den = poly_one(K)
            for x in w:
                den = den * x.den
            wpolys = []
            for x in w:
                num = x.num * (den // x.den)
                wpolys.append(num)
            for i in range(rows_n):
                coefpolys = {}
                maxdeg = -1
                for j in range(cols_n):
                    if wpolys[j].is_zero():
                        continue
                    dmax = bounds[i][j] - degf
                    for d in range(dmax + 1):
                        cp = (f * wpolys[j]).shift(d)
                        coefpolys[(i, j, d)] = cp
                        if not cp.is_zero():
                            maxdeg = max(maxdeg, len(cp.coeffs) - 1)
                for e in range(maxdeg + 1):
                    eq = []
                    for slot, cp in coefpolys.items():
                        c = cp.coeffs[e] if e < len(cp.coeffs) else 0
                        if c:
                            eq.append((slot, c))
                    if eq:
                        sys.add_equation(eq, create=False)

    kern = sys.kernel() if slots else []
    basis = []
    for vec in kern:
        delta = _zero_pmat(K, shape)
        for (i, j, d), c in zip(slots, vec):
            if c:
                cs = list(delta[i][j].coeffs)
                while len(cs) <= d:
                    cs.append(0)
                cs[d] = c
                delta[i][j] = Poly(K, cs)
        g = freeze(tuple(f * e for e in row) for row in delta)
        basis.append(g)
    meta = {
        "deg_bounds": bounds,
        "deg_bound": max((bounds[i][j] for i in range(rows_n)
                          for j in range(cols_n)), default=0),
        "ideal": list(f.coeffs),
        "conditions": [(src, tgt, m) for (src, tgt, m) in conds],
        "kills": len(tuple(kill_vectors)),
    }
    space = SectionSpace(K, shape, basis, meta)
    _verify_section_space(space, f, conds, kill_vectors)
    return space


def _verify_section_space(space: SectionSpace, f: Poly, conds, kill_vectors):
    """Re-check the defining conditions on every basis element."""
    for g in space.basis:
        for row in g:
            for e in row:
                if not f.divides(e):
                    raise AssertionError("section entry escapes the ideal")
        glift = tuple(tuple(Rat(e) for e in row) for row in g)
        for (src, tgt, m) in conds:
            target = tgt.scale(-m)
            for b in range(src.dim):
                col = tuple(src.mat[i][b] for i in range(src.dim))
                if not target.contains_vector(kmat_vec(glift, col)):
                    raise AssertionError("section does not map src into the target")
        for w in kill_vectors:
            if any(not x.is_zero() for x in kmat_vec(glift, tuple(w))):
                raise AssertionError("section does not kill the marked subspace")


def hom_sections(src: Lattice, tgt: Lattice, ideal_gen: Poly,
                 twist_m: int) -> SectionSpace:
    """F_q-basis of {g : (dim tgt) x (dim src) over A, entries in (ideal_gen),
    g . src <= pi^(-twist_m) . tgt}; see matrix_sections for the bound data
    recorded in meta."""
    space = matrix_sections(src.K, (tgt.dim, src.dim), ideal_gen,
                            [(src, tgt, twist_m)])
    meta = dict(space.meta)
    meta["twist"] = twist_m
    return SectionSpace(space.K, space.shape, space.basis, meta)


def global_sections(L: Lattice) -> SectionSpace:
    """F_q-basis of A^r intersected with L (sections of the associated
    vector bundle); returned as r x 1 matrices over A."""
    K = L.K
    r = L.dim
    H = L.mat
    Hinv = L.basis_inverse()
    degree_caps = [_neg_val_max(H[j]) for j in range(r)]  # deg w_j <= cap_j
    sys = LinearSystem(K)
    slots = []
    for j in range(r):
        cap = degree_caps[j]
        for d in range(cap + 1):
            sys.add_unknown((j, d))
            slots.append((j, d))
    for a in range(r):
        terms = {}
        for j in range(r):
            if Hinv[a][j].is_zero() or degree_caps[j] < 0:
                continue
            lo, cs = laurent_coeffs(Hinv[a][j], degree_caps[j])
            terms[j] = (lo, cs, degree_caps[j])
        if not terms:
            continue
        emin = min(lo - cap for (lo, cs, cap) in terms.values())
        for e in range(emin, 0):
            eq = []
            for j, (lo, cs, cap) in terms.items():
                for d in range(cap + 1):
                    idx = e + d - lo
                    if 0 <= idx < len(cs) and cs[idx]:
                        eq.append(((j, d), cs[idx]))
            if eq:
                sys.add_equation(eq, create=False)
    kern = sys.kernel() if slots else []
    basis = []
    for vec in kern:
        w = [[Poly(K)] for _ in range(r)]
        for (j, d), c in zip(slots, vec):
            if c:
                cs = list(w[j][0].coeffs)
                while len(cs) <= d:
                    cs.append(0)
                cs[d] = c
                w[j][0] = Poly(K, cs)
        wf = freeze(w)
        vecK = tuple(Rat(w[j][0]) for j in range(r))
        if not L.contains_vector(vecK):
            raise AssertionError("global section escapes the lattice")
        basis.append(wf)
    meta = {"deg_bounds": [[c] for c in degree_caps],
            "deg_bound": max(degree_caps, default=0), "twist": 0, "ideal": None,
            "src": None, "tgt": L}
    return SectionSpace(K, (r, 1), basis, meta)
