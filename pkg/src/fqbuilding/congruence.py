"""Principal congruence subgroups acting on the building.

For a proper nonzero ideal I = (f) of A and P = A^r, the level group is
Gamma = ker(Aut_A(P) -> Aut_A(P/IP)): matrices over A, determinant in F_q^*,
congruent to 1 mod f.  The stabilizer of a simplex s with vertex classes
<L_0>, ..., <L_d> is exactly 1 + H_s where

    H_s = {h over A : all entries of h in (f), h L_i <= L_i for all i},

a finite F_q-vector space of nilpotent matrices; the stabilizer has order
q^dim(H_s) and is a p-group.  This linear description is exact: no truncation
is involved even when the simplex comes from a finite ball, which is why
stability classification downstream carries no window error.

Any two congruence subgroups of GL(W) are commensurable (their intersection
has finite index in both: both contain the principal level of the product
ideal); this package only ever works with the principal levels themselves.

A simplex is Gamma-unstable when its stabilizer is nontrivial.  The unstable
region is tiled by sigma-regions indexed by proper nonzero subspaces W_1 of
W = K^r: a simplex lies in the region of W_1 when some nontrivial stabilizer
element acts as the identity on W_1, i.e. when {h in H_s : h W_1 = 0} != 0.
The contraction machinery on a region consists of
  * project_lattice: L -> image of L in W/W_1 along a fixed splitting,
  * augmentation: minimal twist making Hom-sections from a quotient lattice
    into the reference lattice appear, plus one,
  * lift_lattice: a section of the projection built from the augmentation,
  * deform_lattice: L -> L + pi^(-n-aug) Ltilde, which only deepens the
    W_1-direction and never shrinks the pointwise-fixing stabilizer.
All of these act on concrete lattices (the poset), not homothety classes:
scaling by pi shifts the augmentation by one.
"""

from __future__ import annotations

from itertools import product

from .budgets import budget
from .building import BudgetError, Simplex
from .fqlinalg import LinearSystem
from .gf import GF
from .lattices import (
    Lattice,
    LatticeClass,
    SectionSpace,
    distance,
    hom_sections,
    matrix_sections,
)
from .matrices import (
    freeze,
    kmat_mul,
    pmat_det,
    pmat_identity,
    pmat_inv_unit_det,
    pmat_mul,
)
from .rfunc import Poly, Rat, laurent_coeffs, poly_one, rat_pi, rat_zero, v_inf

DEBUG_CHECKS = False  # when True, apply_elt asserts the displacement/type laws


class Level:
    """Principal congruence level: ideal generator f (monic, nonconstant)
    plus the group parameters (r, q)."""

    __slots__ = ("K", "r", "ideal_gen")

    def __init__(self, K: GF, r: int, ideal_gen):
        if r < 2:
            raise ValueError("rank must be >= 2")
        if not isinstance(ideal_gen, Poly):
            ideal_gen = Poly(K, ideal_gen)
        if ideal_gen.is_zero() or ideal_gen.is_constant():
            raise ValueError("level ideal must be proper and nonzero "
                             "(nonconstant generator)")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "ideal_gen", ideal_gen.monic())

    def __setattr__(self, *a):
        raise AttributeError("Level is immutable")

    def contains_level(self, finer: "Level") -> bool:
        """(f_finer) <= (f_self), i.e. f_self divides f_finer."""
        return self.K == finer.K and self.r == finer.r and \
            self.ideal_gen.divides(finer.ideal_gen)

    def __eq__(self, other):
        return (isinstance(other, Level) and self.K == other.K
                and self.r == other.r and self.ideal_gen == other.ideal_gen)

    def __hash__(self):
        return hash((self.K.p, self.K.n, self.r, self.ideal_gen.coeffs))

    def __repr__(self):
        return f"Level(r={self.r}, I=({self.ideal_gen!r}))"


def _classes(s) -> tuple[LatticeClass, ...]:
    if isinstance(s, Simplex):
        return s.classes
    if isinstance(s, LatticeClass):
        return (s,)
    if isinstance(s, Lattice):
        return (LatticeClass(s),)
    return tuple(c if isinstance(c, LatticeClass) else LatticeClass(c) for c in s)


class GroupElt:
    """Matrix over A with determinant in F_q^*; optionally flagged as lying
    in a principal congruence level (gamma = 1 mod f, checked)."""

    __slots__ = ("K", "mat", "level", "_lift")

    def __init__(self, K: GF, mat, level: Level | None = None):
        mat = freeze(mat)
        r = len(mat)
        if any(len(row) != r for row in mat):
            raise ValueError("group element must be square")
        det = pmat_det(mat)
        if det.is_zero() or not det.is_constant():
            raise ValueError("determinant must be a nonzero constant")
        if level is not None:
            if level.r != r:
                raise ValueError("rank mismatch with level")
            f = level.ideal_gen
            for i in range(r):
                for j in range(r):
                    e = mat[i][j]
                    if i == j:
                        e = e - poly_one(K)
                    if not f.divides(e):
                        raise ValueError("element is not congruent to 1 mod the level")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "_lift", None)

    def __setattr__(self, *a):
        raise AttributeError("GroupElt is immutable")

    @classmethod
    def identity(cls, K: GF, r: int, level: Level | None = None) -> "GroupElt":
        return cls(K, pmat_identity(K, r), level)

    @property
    def r(self) -> int:
        return len(self.mat)

    def is_identity(self) -> bool:
        return self.mat == pmat_identity(self.K, self.r)

    def det_constant(self) -> int:
        return pmat_det(self.mat).coeffs[0]

    def lift(self):
        if self._lift is None:
            object.__setattr__(
                self, "_lift",
                freeze(tuple(Rat(e) for e in row) for row in self.mat))
        return self._lift

    def __mul__(self, other: "GroupElt") -> "GroupElt":
        lv = self.level if self.level == other.level else None
        return GroupElt(self.K, pmat_mul(self.mat, other.mat), lv)

    def inverse(self) -> "GroupElt":
        return GroupElt(self.K, pmat_inv_unit_det(self.mat), self.level)

    def act_lattice(self, L: Lattice) -> Lattice:
        return Lattice(self.K, kmat_mul(self.lift(), L.mat))

    def act_class(self, c: LatticeClass) -> LatticeClass:
        return LatticeClass(self.act_lattice(c.lattice))

    def __eq__(self, other):
        return isinstance(other, GroupElt) and self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    def __repr__(self):
        return f"GroupElt({self.mat!r})"

    def to_json_dict(self) -> dict:
        return {"matrix": [[list(e.coeffs) for e in row] for row in self.mat]}


def apply_elt(g: GroupElt, s) -> Simplex:
    """Image simplex g.s (canonical classes, type-sorted).  With DEBUG_CHECKS
    on and g a nontrivial level element, asserts d(v, gv) != 1 and type
    preservation vertex by vertex."""
    classes = _classes(s)
    out = []
    nontrivial = g.level is not None and not g.is_identity()
    for c in classes:
        nc = g.act_class(c)
        if DEBUG_CHECKS and nontrivial:
            assert nc.vtype == c.vtype, "level element changed a vertex type"
            assert distance(c, nc) != 1, "level element displaced a vertex by 1"
        out.append(nc)
    return Simplex(out)


class StabilizerSpace:
    """The F_q-space H_s for a simplex at a level; the stabilizer is 1 + H_s."""

    __slots__ = ("level", "classes", "space")

    def __init__(self, level: Level, classes, space: SectionSpace):
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "classes", tuple(classes))
        object.__setattr__(self, "space", space)
        self._verify()

    def __setattr__(self, *a):
        raise AttributeError("StabilizerSpace is immutable")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self):
        return self.space.basis

    def _verify(self):
        r = self.level.r
        for h in self.space.basis:
            power = h
            for _ in range(r - 1):
                power = pmat_mul(power, h)
            if any(e.coeffs for row in power for e in row):
                raise AssertionError("stabilizer space element is not nilpotent")
        # spot-check closure of 1 + H under multiplication: h+h'+hh' must stay in H
        b = self.space.basis
        for i in range(min(2, len(b))):
            for j in range(min(2, len(b))):
                prod = pmat_mul(b[i], b[j])
                s = freeze(tuple(x + y + z for x, y, z in zip(r1, r2, r3))
                           for r1, r2, r3 in zip(b[i], b[j], prod))
                if not self.space.contains_matrix(s):
                    raise AssertionError("stabilizer space not closed under the group law")

    def __repr__(self):
        return f"StabilizerSpace(dim={self.dim})"

    def to_json_dict(self) -> dict:
        return {
            "level": list(self.level.ideal_gen.coeffs),
            "dim": self.dim,
            "basis": [[[list(e.coeffs) for e in row] for row in h] for h in self.basis],
            "deg_bounds": self.space.meta.get("deg_bounds"),
        }


def stabilizer_space(s, lv: Level) -> StabilizerSpace:
    """H_s as one joint linear system over all vertex conditions
    h L_i <= L_i (entries in the level ideal); equals the intersection of the
    per-vertex spaces."""
    classes = _classes(s)
    K = lv.K
    r = lv.r
    conds = [(c.lattice, c.lattice, 0) for c in classes]
    space = matrix_sections(K, (r, r), lv.ideal_gen, conds)
    return StabilizerSpace(lv, classes, space)


def vertex_stab_space(c: LatticeClass, lv: Level) -> StabilizerSpace:
    return stabilizer_space((c,), lv)


def stabilizer_order(H: StabilizerSpace) -> int:
    """|1 + H| = q^dim, always a power of p."""
    return H.level.K.q ** H.dim


def is_unstable(s, lv: Level) -> bool:
    return stabilizer_space(s, lv).dim > 0


class _FixChecker:
    """Fast exact test 'g L = L' in cleared-denominator polynomial
    arithmetic: with B = t^s H over A, g fixes L iff det(g) is a unit and
    every entry of adj(B) g B has degree <= deg det(B)."""

    def __init__(self, L: Lattice):
        K = L.K
        s = max(0, max(L.diag_exps))
        ts = poly_one(K).shift(s)
        B = []
        for row in L.mat:
            prow = []
            for e in row:
                cleared = e * Rat(ts)
                if not cleared.is_polynomial():
                    raise AssertionError("clearing exponent too small")
                prow.append(cleared.num)
            B.append(tuple(prow))
        self.B = tuple(B)
        det = pmat_det(self.B)
        self.det_deg = len(det.coeffs) - 1
        n = len(self.B)
        K_ = K
        adj = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = tuple(
                    tuple(self.B[a][b] for b in range(n) if b != i)
                    for a in range(n) if a != j
                )
                cof = pmat_det(minor) if n > 1 else poly_one(K_)
                if (i + j) % 2:
                    cof = -cof
                row.append(cof)
            adj.append(tuple(row))
        self.adjB = tuple(adj)

    def maps_into(self, g) -> bool:
        """Entry degrees of adj(B) g B stay <= deg det(B), i.e. g L <= L."""
        prod = pmat_mul(pmat_mul(self.adjB, g), self.B)
        for row in prod:
            for e in row:
                if e.coeffs and len(e.coeffs) - 1 > self.det_deg:
                    return False
        return True


def enumerate_stab(H: StabilizerSpace, cap: int | None = None) -> list[GroupElt]:
    """All q^dim elements 1 + h of the stabilizer, each re-verified to fix
    every vertex of the defining simplex.  Deterministic order."""
    cap = budget("FQBUILDING_ENUM_CAP", cap)
    if H.dim > cap:
        raise BudgetError(f"stabilizer dimension {H.dim} exceeds enumeration cap {cap}")
    K = H.level.K
    r = H.level.r
    checkers = [_FixChecker(c.lattice) for c in H.classes]
    ident = pmat_identity(K, r)
    out = []
    for coeffs in product(K.elements(), repeat=H.dim):
        mat = [list(row) for row in ident]
        for c, h in zip(coeffs, H.basis):
            if c:
                for i in range(r):
                    for j in range(r):
                        if h[i][j].coeffs:
                            mat[i][j] = mat[i][j] + h[i][j].scale(c)
        g = GroupElt(K, mat, H.level)
        for chk in checkers:
            if not chk.maps_into(g.mat):
                raise AssertionError("enumerated stabilizer element fails to fix a vertex")
        out.append(g)
    return out


def brute_stab(s, lv: Level, deg_bound: int, budget_override: int | None = None) -> list[GroupElt]:
    """Independent stabilizer oracle: exhaust all gamma = 1 + f*delta with
    deg(gamma entries) <= deg_bound, keep those with unit determinant fixing
    every vertex lattice.  Matches enumerate_stab(stabilizer_space(s)) as a
    set whenever deg_bound >= the recorded solver bound."""
    cap = budget("FQBUILDING_BRUTE_BUDGET", budget_override)
    classes = _classes(s)
    K = lv.K
    r = lv.r
    f = lv.ideal_gen
    degf = len(f.coeffs) - 1
    dmax = deg_bound - degf
    ident = pmat_identity(K, r)
    if dmax < 0:
        return [GroupElt.identity(K, r, lv)]
    nslots = r * r * (dmax + 1)
    if K.q ** nslots > cap:
        raise BudgetError(
            f"brute-force space q^{nslots} exceeds budget {cap}")
    checkers = [_FixChecker(c.lattice) for c in classes]
    out = []
    slots = [(i, j) for i in range(r) for j in range(r)]
    for coeffs in product(K.elements(), repeat=nslots):
        mat = [list(row) for row in ident]
        idx = 0
        for (i, j) in slots:
            cs = coeffs[idx: idx + dmax + 1]
            idx += dmax + 1
            if any(cs):
                mat[i][j] = mat[i][j] + f * Poly(K, cs)
        det = pmat_det(mat)
        if det.is_zero() or not det.is_constant():
            continue
        if all(chk.maps_into(mat) for chk in checkers):
            out.append(GroupElt(K, mat, lv))
    return out


def random_element(lv: Level, rng, factors: int = 3, coeff_deg: int = 1) -> GroupElt:
    """Random nontrivial element of the level group: a product of elementary
    congruence matrices 1 + f c t^k E_ij (determinant 1)."""
    K = lv.K
    r = lv.r
    while True:
        g = GroupElt.identity(K, r, lv)
        for _ in range(factors):
            i = rng.randrange(r)
            j = rng.randrange(r - 1)
            if j >= i:
                j += 1
            c = rng.randrange(1, K.q)
            k = rng.randrange(coeff_deg + 1)
            mat = [list(row) for row in pmat_identity(K, r)]
            mat[i][j] = (lv.ideal_gen * Poly(K, (c,)).shift(k))
            g = g * GroupElt(K, mat, lv)
        if not g.is_identity():
            return g


# --- K-subspaces -------------------------------------------------------------


def _krref(rows):
    """Reduced row echelon form over K; returns (rows, pivots)."""
    mat = [list(r) for r in rows]
    pivots = []
    r_i = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        piv = None
        for i in range(r_i, len(mat)):
            if not mat[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        mat[r_i], mat[piv] = mat[piv], mat[r_i]
        inv = mat[r_i][c].inv()
        mat[r_i] = [x * inv for x in mat[r_i]]
        for i in range(len(mat)):
            if i != r_i and not mat[i][c].is_zero():
                fct = mat[i][c]
                mat[i] = [x - fct * y for x, y in zip(mat[i], mat[r_i])]
        pivots.append(c)
        r_i += 1
        if r_i == len(mat):
            break
    return mat[:r_i], pivots


def _kkernel(rows, ncols: int, K: GF):
    red, pivots = _krref(rows)
    z = rat_zero(K)
    one = Rat(poly_one(K))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [z] * ncols
        v[fc] = one
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    out, _ = _krref(basis)
    return [tuple(r) for r in out]


class SubspaceK:
    """K-subspace of K^r held by its reduced row-echelon basis."""

    __slots__ = ("K", "ambient", "rows")

    def __init__(self, K: GF, ambient: int, rows):
        red, _ = _krref(rows)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "rows", freeze(red))

    def __setattr__(self, *a):
        raise AttributeError("SubspaceK is immutable")

    @classmethod
    def from_vectors(cls, K: GF, ambient: int, vectors) -> "SubspaceK":
        return cls(K, ambient, [list(v) for v in vectors])

    @classmethod
    def full(cls, K: GF, ambient: int) -> "SubspaceK":
        one = Rat(poly_one(K))
        z = rat_zero(K)
        return cls(K, ambient,
                   [[one if i == j else z for j in range(ambient)]
                    for i in range(ambient)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains_vector(self, v) -> bool:
        v = list(v)
        red, pivots = _krref(self.rows)
        for row, pc in zip(red, pivots):
            if not v[pc].is_zero():
                fct = v[pc]
                v = [x - fct * y for x, y in zip(v, row)]
        return all(x.is_zero() for x in v)

    def contains(self, other: "SubspaceK") -> bool:
        return all(self.contains_vector(r) for r in other.rows)

    def intersect(self, other: "SubspaceK") -> "SubspaceK":
        if self.ambient != other.ambient:
            raise ValueError("ambient dimension mismatch")
        if self.dim == 0 or other.dim == 0:
            return SubspaceK(self.K, self.ambient, [])
        # x = u A = w B  <=>  (u, w) in ker [A^T | -B^T]
        rows = []
        for c in range(self.ambient):
            rows.append([a[c] for a in self.rows] + [-b[c] for b in other.rows])
        kern = _kkernel(rows, self.dim + other.dim, self.K)
        vecs = []
        z = rat_zero(self.K)
        for kv in kern:
            v = [z] * self.ambient
            for coef, row in zip(kv[: self.dim], self.rows):
                if not coef.is_zero():
                    v = [x + coef * y for x, y in zip(v, row)]
            vecs.append(v)
        return SubspaceK(self.K, self.ambient, vecs)

    def __eq__(self, other):
        return (isinstance(other, SubspaceK) and self.ambient == other.ambient
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"SubspaceK(dim={self.dim} of {self.ambient})"

    def to_json_dict(self) -> dict:
        return {
            "ambient": self.ambient,
            "rows": [[{"num": list(x.num.coeffs), "den": list(x.den.coeffs)}
                      for x in row] for row in self.rows],
        }


def fixed_space(H: StabilizerSpace) -> SubspaceK:
    """W^(1+H) = common kernel over K of the basis of H (kernel of the
    stacked matrix).  For H = 0 this is all of W."""
    K = H.level.K
    r = H.level.r
    rows = []
    for h in H.basis:
        for prow in h:
            rows.append([Rat(e) for e in prow])
    if not rows:
        return SubspaceK.full(K, r)
    kern = _kkernel(rows, r, K)
    return SubspaceK.from_vectors(K, r, kern)


# --- splittings and the contraction maps ------------------------------------


def _min_degree_entry(D, start):
    best = None
    for i in range(start, len(D)):
        for j in range(start, len(D[0])):
            e = D[i][j]
            if e.coeffs:
                key = (len(e.coeffs) - 1, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
    return best


def smith_poly(K: GF, M):
    """Smith form over A = F_q[t]: returns (P, D, Q) with D = P M Q diagonal
    (monic entries), P and Q unimodular over A.  Verified by re-multiplying."""
    D = [list(row) for row in M]
    rm = len(D)
    cm = len(D[0])
    P = [list(row) for row in pmat_identity(K, rm)]
    Q = [list(row) for row in pmat_identity(K, cm)]

    def row_add(t, s, c: Poly):
        D[t] = [x + c * y for x, y in zip(D[t], D[s])]
        P[t] = [x + c * y for x, y in zip(P[t], P[s])]

    def col_add(t, s, c: Poly):
        for row in D:
            row[t] = row[t] + c * row[s]
        for row in Q:
            row[t] = row[t] + c * row[s]

    def row_swap(a, b):
        D[a], D[b] = D[b], D[a]
        P[a], P[b] = P[b], P[a]

    def col_swap(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        for row in Q:
            row[a], row[b] = row[b], row[a]

    def row_scale(i, c: int):
        D[i] = [x.scale(c) for x in D[i]]
        P[i] = [x.scale(c) for x in P[i]]

    for step in range(min(rm, cm)):
        while True:
            found = _min_degree_entry(D, step)
            if found is None:
                break
            _, bi, bj = found
            row_swap(step, bi)
            col_swap(step, bj)
            piv = D[step][step]
            dirty = False
            for i in range(step + 1, rm):
                if D[i][step].coeffs:
                    q, r_ = divmod(D[i][step], piv)
                    row_add(i, step, -q)
                    if r_.coeffs:
                        dirty = True
            for j in range(step + 1, cm):
                if D[step][j].coeffs:
                    q, r_ = divmod(D[step][j], piv)
                    col_add(j, step, -q)
                    if r_.coeffs:
                        dirty = True
            if not dirty:
                break
        if D[step][step].coeffs and D[step][step].lead() != 1:
            row_scale(step, K.inv(D[step][step].lead()))
    Pf, Df, Qf = freeze(P), freeze(D), freeze(Q)
    if pmat_mul(pmat_mul(Pf, freeze(M)), Qf) != Df:
        raise AssertionError("polynomial Smith form self-check failed")
    return Pf, Df, Qf


class Splitting:
    """A Tits-building vertex W_1 < W with a saturated basis of
    P_1 = A^r cap W_1, a complement splitting P = P_1 (+) P/P_1, and a
    reference lattice Ltilde inside W_1 (in P_1 coordinates; defaults to the
    R-span of the P_1 basis, i.e. the standard lattice)."""

    __slots__ = ("K", "r", "w1", "k", "U", "U_inv", "ltilde")

    def __init__(self, w1: SubspaceK, ltilde: Lattice | None = None):
        K = w1.K
        r = w1.ambient
        k = w1.dim
        if not (0 < k < r):
            raise ValueError("W_1 must be proper and nonzero")
        # clear denominators row by row to get A-vectors spanning W_1
        cols = []
        for row in w1.rows:
            den = poly_one(K)
            for x in row:
                den = den * x.den
            cols.append([x.num * (den // x.den) for x in row])
        M = [[cols[j][i] for j in range(k)] for i in range(r)]  # r x k over A
        P, D, Q = smith_poly(K, M)
        for i in range(k):
            if not D[i][i].coeffs:
                raise AssertionError("subspace basis lost rank during saturation")
        U = pmat_inv_unit_det(P)
        # saturation check: the chosen P_1 basis has unit elementary divisors
        p1 = tuple(tuple(U[i][j] for j in range(k)) for i in range(r))
        _, D1, _ = smith_poly(K, p1)
        for i in range(k):
            if not (D1[i][i].is_constant() and not D1[i][i].is_zero()):
                raise AssertionError("P_1 basis is not saturated")
        lifted = freeze(tuple(Rat(e) for e in row) for row in U)
        for j in range(k):
            col = tuple(lifted[i][j] for i in range(r))
            if not w1.contains_vector(col):
                raise AssertionError("P_1 basis does not span W_1")
        if ltilde is None:
            ltilde = Lattice.standard(K, k)
        elif ltilde.dim != k:
            raise ValueError("reference lattice has the wrong rank")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "U", lifted)
        object.__setattr__(self, "U_inv",
                           freeze(tuple(Rat(e) for e in row) for row in P))
        object.__setattr__(self, "ltilde", ltilde)

    def __setattr__(self, *a):
        raise AttributeError("Splitting is immutable")

    @classmethod
    def from_vectors(cls, K: GF, ambient: int, vectors,
                     ltilde: Lattice | None = None) -> "Splitting":
        return cls(SubspaceK.from_vectors(K, ambient, vectors), ltilde)

    def w1_vectors(self):
        return self.w1.rows

    def __repr__(self):
        return f"Splitting(dim W_1 = {self.k} in K^{self.r})"


def sigma_fixing_space(s, split: Splitting, lv: Level) -> SectionSpace:
    """{h in H_s : h W_1 = 0}: the stabilizer system plus the linear
    constraints h . w = 0 for w spanning W_1."""
    classes = _classes(s)
    conds = [(c.lattice, c.lattice, 0) for c in classes]
    return matrix_sections(lv.K, (lv.r, lv.r), lv.ideal_gen, conds,
                           kill_vectors=split.w1_vectors())


def in_sigma_region(s, split: Splitting, lv: Level) -> bool:
    """Membership in the contractible region attached to W_1: some nontrivial
    level element fixes s and restricts to the identity on W_1."""
    return sigma_fixing_space(s, split, lv).dim > 0


def project_lattice(L: Lattice, split: Splitting) -> Lattice:
    """Image of L in W/W_1 along the fixed splitting (quotient coordinates),
    canonicalized.  Z-equivariant: project(pi^k L) = pi^k project(L)."""
    r, k = split.r, split.k
    rows = [split.U_inv[i] for i in range(k, r)]
    proj = kmat_mul(tuple(rows), L.mat)  # (r-k) x r
    return Lattice(split.K, proj)


def augmentation(Lq: Lattice, split: Splitting, lv: Level) -> int:
    """min{m : Hom-sections from Lq into Ltilde at the level, twisted by m,
    are nonzero} + 1.  Ascends from the degree-data lower bound; an explicit
    rank-one section bounds the search from above."""
    K = split.K
    f = lv.ideal_gen
    degf = len(f.coeffs) - 1
    Lt = split.ltilde
    Hq_inv = Lq.basis_inverse()
    rowmax = []
    for i in range(Lt.dim):
        rowmax.append(max(-v_inf(e) for e in Lt.mat[i] if not e.is_zero()))
    colmax = []
    for j in range(Lq.dim):
        col = [Hq_inv[l][j] for l in range(Lq.dim)]
        colmax.append(max(-v_inf(e) for e in col if not e.is_zero()))
    m = degf - max(rowmax) - max(colmax)
    c1 = min(v_inf(e) for e in Lq.mat[0] if not e.is_zero())
    Lt_inv = Lt.basis_inverse()
    c2 = min(v_inf(Lt_inv[i][0]) for i in range(Lt.dim)
             if not Lt_inv[i][0].is_zero())
    cap = degf - c1 - c2
    while True:
        if hom_sections(Lq, Lt, f, m).dim > 0:
            return m + 1
        m += 1
        if m > cap:
            raise AssertionError("augmentation search passed its provable cap")


def _ltilde_cols_in_w(split: Splitting, shift: int):
    """Columns of pi^shift Ltilde embedded into W through the splitting."""
    K = split.K
    r, k = split.r, split.k
    pis = rat_pi(K, shift)
    Ht = split.ltilde.mat
    cols = []
    for j in range(k):
        col = []
        for i in range(r):
            acc = rat_zero(K)
            for l in range(k):
                if not (split.U[i][l].is_zero() or Ht[l][j].is_zero()):
                    acc = acc + split.U[i][l] * Ht[l][j]
            col.append(acc * pis if not acc.is_zero() else acc)
        cols.append(tuple(col))
    return cols


def lift_lattice(Lq: Lattice, split: Splitting, lv: Level) -> Lattice:
    """pi^(-aug(Lq)) Ltilde (+) (lift of Lq through the splitting): a lattice
    in W that always lies in the sigma-region of W_1."""
    K = split.K
    r, k = split.r, split.k
    eps = augmentation(Lq, split, lv)
    left = _ltilde_cols_in_w(split, -eps)
    right = []
    for j in range(r - k):
        col = []
        for i in range(r):
            acc = rat_zero(K)
            for l in range(r - k):
                u = split.U[i][k + l]
                h = Lq.mat[l][j]
                if not (u.is_zero() or h.is_zero()):
                    acc = acc + u * h
            col.append(acc)
        right.append(tuple(col))
    mat = [[left[j][i] for j in range(k)] + [right[j][i] for j in range(r - k)]
           for i in range(r)]
    return Lattice(K, mat)


def deform_lattice(L: Lattice, n: int, split: Splitting, lv: Level) -> Lattice:
    """L + pi^(-n - aug(project(L))) Ltilde.  Input must lie in the
    sigma-region of W_1 (enforced); when the added summand is already inside
    L (read off valuations of its coordinates) L is returned unchanged."""
    if not in_sigma_region(L, split, lv):
        raise ValueError("lattice is outside the region of this splitting")
    ehat = augmentation(project_lattice(L, split), split, lv)
    cols = _ltilde_cols_in_w(split, -n - ehat)
    if all(L.contains_vector(c) for c in cols):
        return L
    return L.sum_columns(cols)


# --- orbit search ------------------------------------------------------------


class OrbitSearchResult:
    """Outcome of a bounded-degree orbit-witness search.  A witness proves
    equivalence; absence at a bound proves nothing unless `conclusive`."""

    __slots__ = ("witness", "deg_bound", "conclusive", "reason")

    def __init__(self, witness: GroupElt | None, deg_bound: int,
                 conclusive: bool, reason: str):
        self.witness = witness
        self.deg_bound = deg_bound
        self.conclusive = conclusive
        self.reason = reason

    def __repr__(self):
        return (f"OrbitSearchResult(found={self.witness is not None}, "
                f"bound={self.deg_bound}, {self.reason})")

    def to_json_dict(self) -> dict:
        return {
            "found": self.witness is not None,
            "witness": self.witness.to_json_dict() if self.witness else None,
            "deg_bound": self.deg_bound,
            "conclusive": self.conclusive,
            "reason": self.reason,
        }


def orbit_witness(s1, s2, lv: Level, deg_bound: int,
                  budget_override: int | None = None) -> OrbitSearchResult:
    """Search for gamma = 1 mod f with entry degrees <= deg_bound mapping the
    vertex list of s1 to that of s2 (the type-respecting bijection is unique
    since types inside a simplex are distinct).  Affine solve over F_q, then
    unit-determinant filtering over the solution space."""
    cap = budget("FQBUILDING_SOLUTION_CAP", budget_override)
    a = _classes(s1)
    b = _classes(s2)
    if len(a) != len(b):
        return OrbitSearchResult(None, deg_bound, True, "dimension mismatch")
    if tuple(c.vtype for c in a) != tuple(c.vtype for c in b):
        return OrbitSearchResult(None, deg_bound, True, "type multiset mismatch")
    K = lv.K
    r = lv.r
    f = lv.ideal_gen
    degf = len(f.coeffs) - 1
    dmax = deg_bound - degf
    pairs = []
    for ca, cb in zip(a, b):
        diff = ca.lattice.det_valuation - cb.lattice.det_valuation
        if diff % r:
            return OrbitSearchResult(None, deg_bound, True,
                                     "determinant classes incompatible")
        pairs.append((ca.lattice, cb.lattice, diff // r))

    sys = LinearSystem(K)
    slots = []
    for i in range(r):
        for j in range(r):
            for d in range(dmax + 1):
                sys.add_unknown((i, j, d))
                slots.append((i, j, d))
    frat = Rat(f)
    for (L, M, k) in pairs:
        Minv = M.basis_inverse()
        pik = rat_pi(K, -k)
        for a_i in range(r):
            for b_j in range(r):
                const = rat_zero(K)
                for i in range(r):
                    if Minv[a_i][i].is_zero() or L.mat[i][b_j].is_zero():
                        continue
                    const = const + pik * Minv[a_i][i] * L.mat[i][b_j]
                terms = {}
                for i in range(r):
                    if Minv[a_i][i].is_zero():
                        continue
                    for j in range(r):
                        if L.mat[j][b_j].is_zero() or dmax < 0:
                            continue
                        base = pik * frat * Minv[a_i][i] * L.mat[j][b_j]
                        if base.is_zero():
                            continue
                        lo, cs = laurent_coeffs(base, dmax)
                        terms[(i, j)] = (lo, cs)
                lows = [lo - dmax for (lo, cs) in terms.values()]
                if not const.is_zero():
                    lows.append(const.valuation)
                if not lows:
                    continue
                emin = min(lows)
                if emin >= 0:
                    continue
                clo, ccs = laurent_coeffs(const, 0)
                for e in range(emin, 0):
                    eq = []
                    for (i, j), (lo, cs) in terms.items():
                        for d in range(dmax + 1):
                            idx = e + d - lo
                            if 0 <= idx < len(cs) and cs[idx]:
                                eq.append(((i, j, d), cs[idx]))
                    rhs = 0
                    cidx = e - clo
                    if 0 <= cidx < len(ccs):
                        rhs = K.neg(ccs[cidx])
                    if eq or rhs:
                        sys.add_equation(eq, rhs=rhs, create=False)
    sol = sys.solve()
    if sol is None:
        return OrbitSearchResult(None, deg_bound, False, "no witness at this bound")
    part, kern = sol
    if K.q ** len(kern) > cap:
        raise BudgetError(
            f"orbit witness solution space q^{len(kern)} exceeds cap {cap}")
    ident = pmat_identity(K, r)
    for combo in product(K.elements(), repeat=len(kern)):
        vec = list(part)
        for c, kv in zip(combo, kern):
            if c:
                vec = [K.add(x, K.mul(c, y)) for x, y in zip(vec, kv)]
        mat = [list(row) for row in ident]
        for (i, j, d), c in zip(slots, vec):
            if c:
                mat[i][j] = mat[i][j] + (f * Poly(K, (c,)).shift(d))
        det = pmat_det(mat)
        if det.is_zero() or not det.is_constant():
            continue
        g = GroupElt(K, mat, lv)
        image = apply_elt(g, s1)
        if image.classes != tuple(b):
            raise AssertionError("orbit witness verification failed")
        return OrbitSearchResult(g, deg_bound, True, "witness found")
    return OrbitSearchResult(None, deg_bound, False,
                             "no unit-determinant witness at this bound")


class StabilizerCache:
    """Memoized stabilizer spaces for one level (keyed by vertex classes)."""

    def __init__(self, lv: Level):
        self.level = lv
        self._spaces: dict[tuple, StabilizerSpace] = {}

    def space(self, s) -> StabilizerSpace:
        key = _classes(s)
        got = self._spaces.get(key)
        if got is None:
            got = stabilizer_space(key, self.level)
            self._spaces[key] = got
        return got

    def is_unstable(self, s) -> bool:
        return self.space(s).dim > 0
