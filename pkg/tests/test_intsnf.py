import random

import pytest

from fqbuilding.intsnf import IntMatrix, snf, snf_with_transforms


def naive_snf_diag(mat):
    """Textbook dense Smith normal form (independent oracle): returns the
    diagonal padded with zeros, divisibility enforced."""
    A = [list(row) for row in mat]
    m, n = len(A), len(A[0]) if A else 0
    res = []
    s = 0
    while s < min(m, n):
        best = None
        for i in range(s, m):
            for j in range(s, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[s], A[i] = A[i], A[s]
        for row in A:
            row[s], row[j] = row[j], row[s]
        while True:
            done = True
            for i in range(s + 1, m):
                if A[i][s]:
                    q = A[i][s] // A[s][s]
                    A[i] = [x - q * y for x, y in zip(A[i], A[s])]
                    if A[i][s]:
                        A[s], A[i] = A[i], A[s]
                        done = False
            for j in range(s + 1, n):
                if A[s][j]:
                    q = A[s][j] // A[s][s]
                    for row in A:
                        row[j] -= q * row[s]
                    if A[s][j]:
                        for row in A:
                            row[s], row[j] = row[j], row[s]
                        done = False
            if done:
                break
        piv = abs(A[s][s])
        offender = None
        for i in range(s + 1, m):
            if any(A[i][j] % piv for j in range(s + 1, n)):
                offender = i
                break
        if offender is not None:
            A[s] = [x + y for x, y in zip(A[s], A[offender])]
            continue
        res.append(piv)
        s += 1
    return res + [0] * (min(m, n) - len(res))


def test_already_diagonal():
    res = snf(IntMatrix.from_dense([[2, 0], [0, 4]]))
    assert res.diag == [2, 4]
    assert res.rank == 2
    assert res.torsion == [2, 4]


def test_rank_one_matrix():
    res = snf(IntMatrix.from_dense([[1, 1], [1, 1]]))
    assert res.diag == [1, 0]
    assert res.rank == 1
    assert res.torsion == []


def test_three_cycle_boundary():
    # vertices a,b,c; edges ab, bc, ca
    d1 = IntMatrix.from_dense([
        [-1, 0, 1],
        [1, -1, 0],
        [0, 1, -1],
    ])
    res = snf(d1)
    assert res.rank == 2
    assert res.torsion == []
    # downstream: H_1 = ker d1 has rank 3 - 2 = 1 and H_0 rank 3 - 2 = 1


def test_divisibility_chain_enforced():
    res = snf(IntMatrix.from_dense([[2, 0], [0, 3]]))
    assert res.diag == [1, 6]


def test_against_naive_oracle_random():
    rng = random.Random(42)
    for _ in range(60):
        m = rng.randrange(1, 7)
        n = rng.randrange(1, 7)
        dense = [[rng.randrange(-3, 4) for _ in range(n)] for _ in range(m)]
        got = snf(IntMatrix.from_dense(dense))
        want = naive_snf_diag(dense)
        assert got.diag == want, dense
        for a, b in zip(got.diag, got.diag[1:]):
            if a and b:
                assert b % a == 0


def test_transforms_unimodular():
    rng = random.Random(5)

    def det(mat):
        n = len(mat)
        if n == 1:
            return mat[0][0]
        return sum(
            (-1) ** j * mat[0][j] * det([r[:j] + r[j + 1:] for r in mat[1:]])
            for j in range(n)
        )

    for _ in range(25):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        dense = [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(m)]
        M = IntMatrix.from_dense(dense)
        res, U, V = snf_with_transforms(M)
        assert abs(det(U)) == 1
        assert abs(det(V)) == 1
        UM = IntMatrix.from_dense(U).mul(M).mul(IntMatrix.from_dense(V))
        expect = {(i, i): d for i, d in enumerate(res.diag) if d}
        assert UM.data == expect


def _bareiss_rank(dense):
    """Fraction-free Gaussian elimination rank (independent oracle)."""
    A = [list(row) for row in dense]
    m, n = len(A), len(A[0]) if A else 0
    rank = 0
    prev = 1
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if A[i][col]:
                piv = i
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(rank + 1, m):
            for j in range(col + 1, n):
                A[i][j] = (A[rank][col] * A[i][j] - A[i][col] * A[rank][j]) // prev
            A[i][col] = 0
        prev = A[rank][col]
        rank += 1
        if rank == m:
            break
    return rank


def test_rank_against_bareiss_on_sparse_random():
    rng = random.Random(99)
    for _ in range(20):
        m = rng.randrange(5, 30)
        n = rng.randrange(5, 30)
        dense = [[0] * n for _ in range(m)]
        for _ in range(2 * max(m, n)):
            dense[rng.randrange(m)][rng.randrange(n)] = rng.choice((-2, -1, 1, 2))
        assert snf(IntMatrix.from_dense(dense)).rank == _bareiss_rank(dense)


def test_big_entries_no_overflow():
    big = 10 ** 40
    res = snf(IntMatrix.from_dense([[big, 1], [0, big]]))
    assert res.diag == [1, big * big]


def test_intmatrix_validation():
    with pytest.raises(ValueError):
        IntMatrix.from_triples(2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(ValueError):
        IntMatrix(2, 2, {(2, 0): 1})
    m = IntMatrix.from_triples(2, 3, [(0, 0, 1), (1, 2, -5), (0, 1, 0)])
    assert m.nnz() == 2  # explicit zero dropped
    assert m.get(1, 2) == -5


def test_mul_and_transpose():
    a = IntMatrix.from_dense([[1, 2], [3, 4]])
    b = IntMatrix.from_dense([[0, 1], [1, 0]])
    assert a.mul(b).to_dense() == [[2, 1], [4, 3]]
    assert a.transpose().to_dense() == [[1, 3], [2, 4]]
    with pytest.raises(ValueError):
        a.mul(IntMatrix(3, 3, {}))


def test_projective_plane_torsion():
    # minimal 6-vertex triangulation of the projective plane: H_1 = Z/2
    faces = [(1, 2, 5), (1, 2, 6), (1, 3, 4), (1, 3, 6), (1, 4, 5),
             (2, 3, 4), (2, 3, 5), (2, 4, 6), (3, 5, 6), (4, 5, 6)]
    edges = {}
    for f in faces:
        a, b, c = sorted(f)
        for e in ((a, b), (a, c), (b, c)):
            edges[e] = edges.get(e, 0) + 1
    assert len(edges) == 15 and all(v == 2 for v in edges.values())
    edge_list = sorted(edges)
    ei = {e: i for i, e in enumerate(edge_list)}
    d1 = {}
    for j, (a, b) in enumerate(edge_list):
        d1[(b - 1, j)] = 1
        d1[(a - 1, j)] = -1
    D1 = IntMatrix(6, 15, d1)
    d2 = {}
    for j, f in enumerate(sorted(tuple(sorted(f)) for f in faces)):
        a, b, c = f
        for k, e in enumerate([(b, c), (a, c), (a, b)]):
            d2[(ei[e], j)] = 1 if k % 2 == 0 else -1
    D2 = IntMatrix(15, 10, d2)
    assert D1.mul(D2).is_zero()
    r1, r2 = snf(D1), snf(D2)
    assert (6 - r1.rank, 15 - r1.rank - r2.rank, 10 - r2.rank) == (1, 0, 0)
    assert r2.torsion == [2]


def test_zero_and_empty():
    assert snf(IntMatrix(3, 2, {})).diag == [0, 0]
    assert snf(IntMatrix(0, 5, {})).diag == []
