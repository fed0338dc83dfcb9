import random
from itertools import product

import pytest

from fqbuilding.gf import gf
from fqbuilding.lattices import (
    Lattice,
    LatticeClass,
    SingularBasisError,
    canonical_class,
    distance,
    global_sections,
    hom_sections,
    rel_position,
)
from fqbuilding.matrices import kmat_mul, kmat_vec
from fqbuilding.rfunc import (
    Poly,
    Rat,
    poly_one,
    poly_t,
    rat,
    rat_from_laurent,
    rat_one,
    rat_pi,
    rat_zero,
)


def _diag_lattice(K, exps):
    """Lattice with basis diag(pi^e) for the given exponents."""
    z = rat_zero(K)
    r = len(exps)
    mat = [[rat_pi(K, exps[i]) if i == j else z for j in range(r)]
           for i in range(r)]
    return Lattice(K, mat)


def _rand_r_elt(K, rng, unit=False):
    """Random element of R as a finite pi-polynomial; unit forces v = 0."""
    coeffs = [rng.randrange(K.q) for _ in range(3)]
    if unit:
        coeffs[0] = rng.randrange(1, K.q)
    return rat_from_laurent(K, 0, coeffs)


def _rand_lattice_basis(K, r, rng):
    while True:
        mat = [[rat_from_laurent(K, rng.randrange(-2, 1),
                                 [rng.randrange(K.q) for _ in range(3)])
                for _ in range(r)] for _ in range(r)]
        try:
            Lattice(K, mat)
            return mat
        except SingularBasisError:
            continue


def _rand_glr(K, r, rng):
    """Random element of GL_r(R): elementary ops, diagonal units, permutation."""
    from fqbuilding.matrices import kmat_identity

    g = [list(row) for row in kmat_identity(K, r)]
    for _ in range(4):
        kind = rng.randrange(3)
        if kind == 0 and r > 1:
            i, j = rng.sample(range(r), 2)
            c = _rand_r_elt(K, rng)
            for row in g:
                row[j] = row[j] + c * row[i]
        elif kind == 1:
            i = rng.randrange(r)
            u = _rand_r_elt(K, rng, unit=True)
            for row in g:
                row[i] = row[i] * u
        else:
            i, j = rng.sample(range(r), 2) if r > 1 else (0, 0)
            for row in g:
                row[i], row[j] = row[j], row[i]
    return tuple(tuple(row) for row in g)


# --- canonical forms ---------------------------------------------------------

def test_identity_is_canonical():
    K = gf(2)
    c = LatticeClass.standard(K, 2)
    assert c.vtype == 0
    assert c.lattice.diag_exps == (0, 0)


def test_unipotent_action_preserves_class():
    K = gf(2)
    t = poly_t(K)
    z, o = rat_zero(K), rat_one(K)
    base = ((rat(t), z), (z, o))
    for c in range(K.q):
        u = ((o, Rat(Poly(K, (c,)))), (z, o))
        assert canonical_class(K, kmat_mul(base, u)) == canonical_class(K, base)


def test_homothety_diag():
    K = gf(2)
    t = poly_t(K)
    z, o = rat_zero(K), rat_one(K)
    a = canonical_class(K, ((o, z), (z, rat_pi(K, 1))))  # diag(1, 1/t)
    b = canonical_class(K, ((rat(t), z), (z, o)))        # diag(t, 1)
    assert a == b


@pytest.mark.parametrize("q,r", [(2, 2), (3, 2), (2, 3)])
def test_canonical_invariance_under_right_action(q, r):
    K = gf(q)
    rng = random.Random(100 * q + r)
    for _ in range(200):
        B = _rand_lattice_basis(K, r, rng)
        g = _rand_glr(K, r, rng)
        scaled = rng.randrange(-2, 3)
        Bg = kmat_mul(B, g)
        pk = rat_pi(K, scaled)
        Bg = tuple(tuple(e * pk for e in row) for row in Bg)
        assert canonical_class(K, Bg) == canonical_class(K, B)


def test_canonical_equality_iff_same_lattice():
    # independent oracle: two column spans agree iff mutually contained
    K = gf(2)
    rng = random.Random(59)
    lattices = [Lattice(K, _rand_lattice_basis(K, 2, rng)) for _ in range(25)]
    for A in lattices:
        for B in lattices:
            same = A.contains(B) and B.contains(A)
            assert (A.mat == B.mat) == same


def test_singular_basis_rejected():
    K = gf(2)
    z = rat_zero(K)
    o = rat_one(K)
    with pytest.raises(SingularBasisError):
        Lattice(K, ((o, o), (o, o)))
    with pytest.raises(SingularBasisError):
        Lattice(K, ((z, z), (z, z)))


def test_canonical_subdiagonal_is_reduced():
    K = gf(2)
    rng = random.Random(17)
    for _ in range(100):
        L = Lattice(K, _rand_lattice_basis(K, 2, rng))
        mat = L.mat
        assert mat[0][1].is_zero()
        a1 = mat[1][1].valuation
        e = mat[1][0]
        if not e.is_zero():
            # entry carries only exponents < a1
            from fqbuilding.rfunc import rat_truncate
            assert rat_truncate(e, a1) == e


# --- relative position and distance -----------------------------------------

def test_rel_position_examples():
    K = gf(2)
    L0 = Lattice.standard(K, 2)
    assert rel_position(L0, L0) == (0, 0)
    Lt2 = _diag_lattice(K, (-2, 0))  # diag(t^2, 1)
    assert rel_position(L0, Lt2) == (-2, 0)


def test_rel_position_antisymmetry():
    K = gf(2)
    rng = random.Random(23)
    for _ in range(40):
        A = Lattice(K, _rand_lattice_basis(K, 2, rng))
        B = Lattice(K, _rand_lattice_basis(K, 2, rng))
        ab = rel_position(A, B)
        ba = rel_position(B, A)
        assert tuple(sorted(-x for x in ab)) == ba


def test_rel_position_det_sum():
    K = gf(3)
    rng = random.Random(29)
    for _ in range(40):
        A = Lattice(K, _rand_lattice_basis(K, 2, rng))
        B = Lattice(K, _rand_lattice_basis(K, 2, rng))
        assert sum(rel_position(A, B)) == B.det_valuation - A.det_valuation


def test_distance_examples():
    K = gf(2)
    c0 = LatticeClass.standard(K, 2)
    assert distance(c0, c0) == 0
    ct = LatticeClass(_diag_lattice(K, (-1, 0)))
    assert distance(c0, ct) == 1
    ct2 = LatticeClass(_diag_lattice(K, (-2, 0)))
    assert distance(c0, ct2) == 2


def test_distance_is_metric_on_samples():
    K = gf(2)
    rng = random.Random(31)
    pts = [LatticeClass(Lattice(K, _rand_lattice_basis(K, 2, rng)))
           for _ in range(8)]
    for a in pts:
        assert distance(a, a) == 0
        for b in pts:
            assert distance(a, b) == distance(b, a)
            for c in pts:
                assert distance(a, c) <= distance(a, b) + distance(b, c)


# --- types -------------------------------------------------------------------

def test_vertex_types():
    K = gf(2)
    c0 = LatticeClass.standard(K, 2)
    assert c0.vtype == 0
    ct = LatticeClass(_diag_lattice(K, (-1, 0)))
    assert ct.vtype == 1
    # homothety invariance is baked in: scaling gives the same class
    assert LatticeClass(_diag_lattice(K, (-1, 0)).scale(5)) == ct


def test_adjacent_types_differ():
    from fqbuilding.building import ball

    K = gf(2)
    b = ball(LatticeClass.standard(K, 2), 2)
    for s in b.simplices(1):
        t0, t1 = s.types
        assert t0 != t1


# --- sections ----------------------------------------------------------------

def _brute_global_sections(L, maxdeg):
    """All vectors in A^r cap L with entries of degree <= maxdeg (oracle)."""
    K = L.K
    r = L.dim
    found = []
    for coeffs in product(range(K.q), repeat=r * (maxdeg + 1)):
        vec = []
        for j in range(r):
            cs = coeffs[j * (maxdeg + 1): (j + 1) * (maxdeg + 1)]
            vec.append(Rat(Poly(K, cs)))
        if L.contains_vector(tuple(vec)):
            found.append(tuple(vec))
    return found


def test_global_sections_standard():
    K = gf(2)
    assert global_sections(Lattice.standard(K, 2)).dim == 2
    assert global_sections(Lattice.standard(K, 3)).dim == 3


def test_global_sections_examples_with_oracle():
    K = gf(2)
    Lt2 = _diag_lattice(K, (-2, 0))  # t^2 R + R, bundle O(2) + O
    space = global_sections(Lt2)
    assert space.dim == 4
    brute = _brute_global_sections(Lt2, 2)
    assert len(brute) == K.q ** space.dim
    Linv = _diag_lattice(K, (1, 0))  # diag(1/t, 1)
    assert global_sections(Linv).dim == 1


def test_global_sections_split_bundle_formula():
    rng = random.Random(37)
    for q in (2, 3):
        K = gf(q)
        for _ in range(25):
            exps = [rng.randrange(-3, 3) for _ in range(rng.choice((2, 3)))]
            L = _diag_lattice(K, exps)
            want = sum(max(0, 1 - a) for a in exps)
            assert global_sections(L).dim == want


def _brute_hom_sections(src, tgt, f, m, maxdeg):
    """Oracle: all matrices over (f) with entry degrees <= maxdeg mapping
    src into pi^(-m) tgt."""
    K = src.K
    rows, cols = tgt.dim, src.dim
    degf = len(f.coeffs) - 1
    dmax = maxdeg - degf
    target = tgt.scale(-m)
    out = []
    if dmax < 0:
        z = Poly(K)
        return [tuple(tuple(z for _ in range(cols)) for _ in range(rows))]
    slots = rows * cols
    for coeffs in product(range(K.q), repeat=slots * (dmax + 1)):
        mat = []
        idx = 0
        for i in range(rows):
            row = []
            for j in range(cols):
                cs = coeffs[idx: idx + dmax + 1]
                idx += dmax + 1
                row.append(f * Poly(K, cs))
            mat.append(tuple(row))
        glift = tuple(tuple(Rat(e) for e in row) for row in mat)
        ok = True
        for b in range(cols):
            col = tuple(src.mat[i][b] for i in range(cols))
            if not target.contains_vector(kmat_vec(glift, col)):
                ok = False
                break
        if ok:
            out.append(tuple(mat))
    return out


def test_hom_sections_endomorphism_example():
    K = gf(2)
    t = poly_t(K)
    L = _diag_lattice(K, (-1, 0))  # diag(t, 1)
    space = hom_sections(L, L, t, 0)
    assert space.dim == 1
    h = space.basis[0]
    assert h[0][1] == t and all(
        h[i][j].is_zero() for i in range(2) for j in range(2) if (i, j) != (0, 1))
    # brute force over degree <= 2 confirms the whole space
    brute = _brute_hom_sections(L, L, t, 0, 2)
    assert len(brute) == K.q ** space.dim


def test_hom_sections_standard_lattice_trivial():
    K = gf(2)
    t = poly_t(K)
    L0 = Lattice.standard(K, 2)
    assert hom_sections(L0, L0, t, 0).dim == 0


def test_hom_sections_rank_one_twists():
    K = gf(2)
    t = poly_t(K)
    R1 = Lattice.standard(K, 1)
    s1 = hom_sections(R1, R1, t, 1)
    assert s1.dim == 1 and s1.basis[0][0][0] == t
    assert hom_sections(R1, R1, t, 0).dim == 0


def test_hom_sections_oracle_random():
    K = gf(2)
    t = poly_t(K)
    rng = random.Random(41)
    for _ in range(10):
        src = _diag_lattice(K, [rng.randrange(-1, 2) for _ in range(2)])
        tgt = _diag_lattice(K, [rng.randrange(-1, 2) for _ in range(2)])
        m = rng.randrange(0, 2)
        space = hom_sections(src, tgt, t, m)
        bound = space.meta["deg_bound"]
        if bound > 3 or K.q ** (4 * max(0, bound - 1 + 1)) > 2 ** 16:
            continue
        brute = _brute_hom_sections(src, tgt, t, m, max(bound, 0))
        assert len(brute) == K.q ** space.dim


def test_hom_sections_ring_closure_and_nilpotency():
    K = gf(2)
    t = poly_t(K)
    from fqbuilding.matrices import pmat_mul

    L = _diag_lattice(K, (-2, 0))
    space = hom_sections(L, L, t, 0)
    assert space.dim == 2
    for a in space.basis:
        for b in space.basis:
            prod = pmat_mul(a, b)
            assert space.contains_matrix(prod)  # closure under composition
        sq = pmat_mul(a, a)
        assert all(e.is_zero() for row in sq for e in row)  # nilpotent, r = 2


def test_hom_sections_rejects_bad_ideal():
    K = gf(2)
    L0 = Lattice.standard(K, 2)
    with pytest.raises(ValueError):
        hom_sections(L0, L0, poly_one(K), 0)
    with pytest.raises(ValueError):
        hom_sections(L0, L0, Poly(K), 0)


# --- serialization -----------------------------------------------------------

def test_lattice_json_roundtrip():
    K = gf(2)
    rng = random.Random(43)
    for _ in range(50):
        L = Lattice(K, _rand_lattice_basis(K, 2, rng))
        d = L.to_json_dict()
        assert Lattice.from_json_dict(K, d) == L
        c = LatticeClass(L)
        assert LatticeClass.from_json_dict(K, c.to_json_dict()) == c


def test_lattice_json_requires_canonical():
    K = gf(2)
    with pytest.raises(ValueError):
        # subdiagonal entry not reduced modulo pi^1
        Lattice.from_json_dict(
            K, {"diag_exponents": [0, 1], "subdiagonal": [[[1, [1]]]]})


def test_sort_key_orders_deterministically():
    K = gf(2)
    rng = random.Random(47)
    classes = [LatticeClass(Lattice(K, _rand_lattice_basis(K, 2, rng)))
               for _ in range(20)]
    keys = sorted(c.sort_key() for c in classes)
    assert keys == sorted(keys)
