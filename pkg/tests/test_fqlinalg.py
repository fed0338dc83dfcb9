import random

import pytest

from fqbuilding.fqlinalg import LinearSystem, kernel_basis, rref, solve_fq
from fqbuilding.gf import gf


def test_solve_fq_one_equation():
    K = gf(2)
    basis = solve_fq(K, [{"x": 1, "y": 1}], unknowns=["x", "y"])
    assert basis == [(1, 1)]


def test_solve_fq_empty_constraints_identity_basis():
    K = gf(3)
    basis = solve_fq(K, [], unknowns=list("abcd"))
    assert len(basis) == 4
    for i, v in enumerate(basis):
        assert v[i] == 1 and sum(1 for x in v if x) == 1


def test_solve_fq_full_rank_empty():
    K = gf(5)
    eqs = [{"x": 1}, {"y": 2}]
    assert solve_fq(K, eqs, unknowns=["x", "y"]) == []


def test_solve_fq_unknown_name_rejected():
    K = gf(2)
    with pytest.raises(ValueError):
        solve_fq(K, [{"x": 1, "zz": 1}], unknowns=["x", "y"])


def test_rref_and_kernel_random():
    rng = random.Random(3)
    for q in (2, 3, 4):
        K = gf(q)
        for _ in range(100):
            m = rng.randrange(1, 5)
            n = rng.randrange(1, 6)
            rows = [[rng.randrange(q) for _ in range(n)] for _ in range(m)]
            red, pivots = rref(K, rows)
            assert len(red) == len(pivots)
            for r, pc in zip(red, pivots):
                assert r[pc] == 1
                for other in red:
                    if other is not r:
                        assert other[pc] == 0
            kern = kernel_basis(K, rows, n)
            assert len(kern) == n - len(pivots)
            for v in kern:
                for row in rows:
                    s = 0
                    for c, x in zip(row, v):
                        s = K.add(s, K.mul(c, x))
                    assert s == 0


def test_linear_system_affine():
    K = gf(3)
    sys = LinearSystem(K)
    sys.add_unknown("x")
    sys.add_unknown("y")
    sys.add_equation([("x", 1), ("y", 1)], rhs=2)
    sys.add_equation([("x", 1), ("y", 2)], rhs=0)
    part, kern = sys.solve()
    assert kern == []
    # x + y = 2, x + 2y = 0 over F_3: y = 1, x = 1
    assert part == (1, 1)


def test_linear_system_inconsistent():
    K = gf(2)
    sys = LinearSystem(K)
    sys.add_unknown("x")
    sys.add_equation([("x", 1)], rhs=0)
    sys.add_equation([("x", 1)], rhs=1)
    assert sys.solve() is None


def test_kernel_is_rref():
    K = gf(2)
    rows = [[1, 1, 0, 0], [0, 0, 1, 1]]
    kern = kernel_basis(K, rows, 4)
    red, _ = rref(K, [list(v) for v in kern])
    assert [tuple(r) for r in red] == list(kern)
