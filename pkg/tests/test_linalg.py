import pytest

from ofa.linalg import (
    KSolver, ModSolver, count_solutions_mod, k_det, k_mat_inv, k_matmul,
    k_identity, k_nullspace, k_solve, mulmat, nullspace_mod, snf_mod, solve_mod,
)
from ofa.coeff_ring import GaloisField, Product, StructureError, ZMod


def _matmul_int(A, B, m):
    return [[sum(a * b for a, b in zip(row, col)) % m for col in zip(*B)] for row in A]


def test_snf_mod_oracle():
    # [[2,4],[4,4]] mod 8 diagonalizes to diag(2,4): row1 -= 2*row0 then col1 -= 2*col0
    A = [[2, 4], [4, 4]]
    D, U, V = snf_mod(A, 8)
    assert D[0][1] == 0 and D[1][0] == 0
    assert sorted([D[0][0], D[1][1]]) == [2, 4]
    assert _matmul_int(_matmul_int(U, A, 8), V, 8) == D


def test_snf_random_consistency():
    import random
    rng = random.Random(7)
    for m in (2, 4, 6, 9):
        for _ in range(25):
            R = rng.randrange(1, 5)
            C = rng.randrange(1, 5)
            A = [[rng.randrange(m) for _ in range(C)] for _ in range(R)]
            D, U, V = snf_mod(A, m)
            assert _matmul_int(_matmul_int(U, A, m), V, m) == D
            for i in range(R):
                for j in range(C):
                    if i != j:
                        assert D[i][j] == 0


def test_solve_mod():
    assert solve_mod([[2]], [4], 8) in ([2], [6])
    assert solve_mod([[2]], [3], 8) is None
    assert count_solutions_mod([[2]], [4], 8) == 2
    assert count_solutions_mod([[2]], [3], 8) == 0
    assert count_solutions_mod([[1, 1]], [1], 2) == 2
    gens = nullspace_mod([[2]], 8)
    reach = {0}
    for g in gens:
        reach |= {(x + g[0]) % 8 for x in reach}
        reach |= {(x + 2 * g[0]) % 8 for x in reach}
        reach |= {(x + 3 * g[0]) % 8 for x in reach}
    assert reach == {0, 4}


def test_modsolver_tall_and_wide():
    ms = ModSolver([[1], [1]], 4)  # x = b0, x = b1
    assert ms.solve([3, 3]) == [3]
    assert ms.solve([1, 2]) is None
    wide = ModSolver([[1, 2, 0]], 4)
    x = wide.solve([3])
    assert (x[0] + 2 * x[1]) % 4 == 3
    assert wide.count([3]) == wide.null_count == 16


def test_k_solve_gf4():
    F4 = GaloisField(2, [1, 1, 1])
    x = F4.gen()
    M = [[x]]
    b = [F4.add(x, F4.one())]
    sol = k_solve(F4, M, b)
    assert F4.mul(x, sol[0]) == b[0]


def test_k_nullspace_zmod6():
    K = ZMod(6)
    gens = k_nullspace(K, [[(2,)]])
    reach = {(0,)}
    for _ in range(6):
        reach |= {K.add(a, g[0]) for a in reach for g in gens}
    assert reach == {(0,), (3,)}


def test_mulmat():
    K = GaloisField(3, [1, 0, 1])
    x = K.gen()
    M = mulmat(K, x)
    # x * 1 = x, x * x = 2
    assert [row[0] for row in M] == [0, 1]
    assert [row[1] for row in M] == [2, 0]


def test_k_det():
    K = ZMod(5)
    M = [[(1,), (2,)], [(3,), (4,)]]
    assert k_det(K, M) == (3,)
    anti = [[(0,), (0,), (1,)], [(0,), (1,), (0,)], [(1,), (0,), (0,)]]
    assert k_det(K, anti) == (4,)
    assert k_det(K, []) == (1,)


def test_k_mat_inv():
    K = ZMod(4)
    M = [[(1,), (2,)], [(0,), (1,)]]
    X = k_mat_inv(K, M)
    assert X == (((1,), (2,)), ((0,), (1,)))
    assert k_matmul(K, M, X) == k_identity(K, 2)
    assert k_mat_inv(K, [[(2,), (0,)], [(0,), (1,)]]) is None


def test_product_split_solver():
    P = Product([ZMod(2), ZMod(3)])
    a = P.join([(1,), (2,)])
    b = P.join([(1,), (1,)])
    sol = k_solve(P, [[a]], [b])
    assert P.mul(a, sol[0]) == b
    bad = P.join([(0,), (1,)])
    assert k_solve(P, [[bad]], [b]) is None
    ks = KSolver(P, [[bad]])
    assert ks.count([P.join([(0,), (2,)])]) == 2  # 0*x=0 over Z2 frees x there
    gens = ks.nullspace()
    assert all(P.mul(bad, g[0]) == P.zero() for g in gens)


def test_empty_system():
    K = ZMod(3)
    with pytest.raises(StructureError):
        KSolver(K, [])
    ks = KSolver(K, [], ncols=2)
    assert ks.count([]) == 9  # no equations, both unknowns free
    gens = ks.nullspace()
    assert len(gens) == 2
