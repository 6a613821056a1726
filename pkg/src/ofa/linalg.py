"""Exact linear algebra over the coefficient rings.

Integer matrices are diagonalized mod m by unimodular row and column
operations, entries reduced after every step so coefficients never grow.
Systems over a ring spec are expanded to integer systems through the
multiplication matrices of their entries; product rings split into
componentwise systems.
"""

import math

from .coeff_ring import Product, StructureError, _basis


def _identity_int(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_col(M, a, b):
    for row in M:
        row[a], row[b] = row[b], row[a]


def _row_addmul(M, i, t, q, m):
    Mt = M[t]
    M[i] = [(x + q * y) % m for x, y in zip(M[i], Mt)]


def _col_addmul(M, j, t, q, m):
    for row in M:
        row[j] = (row[j] + q * row[t]) % m


def snf_mod(A, m):
    """Diagonalize A mod m: returns (D, U, V) with U A V = D mod m.

    U and V are reductions of integer unimodular matrices, so they stay
    invertible mod m.  The diagonal is not forced into a divisor chain;
    solving and counting only need diagonality.
    """
    R = len(A)
    C = len(A[0]) if R else 0
    D = [[A[i][j] % m for j in range(C)] for i in range(R)]
    U = _identity_int(R)
    V = _identity_int(C)
    t = 0
    while t < min(R, C):
        best, br, bc = None, -1, -1
        for i in range(t, R):
            row = D[i]
            for j in range(t, C):
                v = row[j]
                if v and (best is None or v < best):
                    best, br, bc = v, i, j
        if best is None:
            break
        if br != t:
            D[t], D[br] = D[br], D[t]
            U[t], U[br] = U[br], U[t]
        if bc != t:
            _swap_col(D, t, bc)
            _swap_col(V, t, bc)
        while True:
            p = D[t][t]
            restart = False
            for i in range(t + 1, R):
                v = D[i][t]
                if v:
                    q = v // p
                    _row_addmul(D, i, t, -q, m)
                    _row_addmul(U, i, t, -q, m)
                    if D[i][t]:
                        # leftover remainder becomes the smaller pivot
                        D[t], D[i] = D[i], D[t]
                        U[t], U[i] = U[i], U[t]
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, C):
                v = D[t][j]
                if v:
                    q = v // p
                    _col_addmul(D, j, t, -q, m)
                    _col_addmul(V, j, t, -q, m)
                    if D[t][j]:
                        _swap_col(D, t, j)
                        _swap_col(V, t, j)
                        restart = True
                        break
            if restart:
                continue
            break
        t += 1
    return D, U, V


class ModSolver:
    """Reusable solver for A x = b mod m with the matrix fixed."""

    def __init__(self, A, m, ncols=None):
        assert m >= 2
        self.m = m
        self.rows = len(A)
        self.cols = len(A[0]) if self.rows else (ncols or 0)
        if self.rows:
            D, U, V = snf_mod(A, m)
        else:
            D, U, V = [], [], _identity_int(self.cols)
        self.U = U
        self.V = V
        self.diag = [D[j][j] if j < self.rows else 0 for j in range(self.cols)]
        self.null_count = 1
        for d in self.diag:
            self.null_count *= math.gcd(d, m)

    def _transform(self, b):
        assert len(b) == self.rows
        return [sum(u * x for u, x in zip(row, b)) % self.m for row in self.U]

    def _consistent(self, c):
        for j in range(min(self.rows, self.cols)):
            if c[j] % math.gcd(self.diag[j], self.m):
                return False
        for i in range(self.cols, self.rows):
            if c[i]:
                return False
        return True

    def solve(self, b):
        m = self.m
        c = self._transform(b)
        if not self._consistent(c):
            return None
        y = [0] * self.cols
        for j in range(min(self.rows, self.cols)):
            d = self.diag[j]
            if d:
                g = math.gcd(d, m)
                y[j] = (c[j] // g) * pow(d // g, -1, m // g) % (m // g)
        return [sum(row[j] * y[j] for j in range(self.cols)) % m for row in self.V]

    def count(self, b):
        return self.null_count if self._consistent(self._transform(b)) else 0

    def nullspace(self):
        """Vectors generating the solution set of A x = 0 additively."""
        m = self.m
        gens = []
        for j in range(self.cols):
            g = math.gcd(self.diag[j], m)
            if g == 1:
                continue
            s = m // g
            gens.append([row[j] * s % m for row in self.V])
        return gens


def solve_mod(A, b, m):
    return ModSolver(A, m).solve(b)


def nullspace_mod(A, m):
    return ModSolver(A, m).nullspace()


def count_solutions_mod(A, b, m):
    return ModSolver(A, m).count(b)


def mulmat(spec, a):
    """Integer matrix of y -> a*y on the spec's coordinate basis."""
    cols = [spec.mul(a, e) for e in _basis(spec)]
    return [[cols[j][i] for j in range(spec.rank)] for i in range(spec.rank)]


class KSolver:
    """Fixed-matrix solver for linear systems over a ring spec.

    M is a matrix of ring elements; unknowns and right-hand sides are
    vectors of ring elements.  Expansion over the Z-basis turns the
    system into an integer one; product specs recurse componentwise.
    Pass ncols when M has no rows.
    """

    def __init__(self, spec, M, ncols=None):
        self.spec = spec
        self.nrows = len(M)
        if self.nrows:
            self.ncols = len(M[0])
        else:
            if ncols is None:
                raise StructureError("empty system needs an unknown count")
            self.ncols = ncols
        if isinstance(spec, Product):
            self.parts = []
            for idx, sub in enumerate(spec.specs):
                Mi = [[sub.check_element(spec.split(e)[idx]) for e in row] for row in M]
                self.parts.append(KSolver(sub, Mi, ncols=self.ncols))
        else:
            self.parts = None
            m = spec.uniform_modulus()
            if m is None:
                raise StructureError("mixed moduli outside a product spec")
            self.m = m
            r = spec.rank
            big = [[0] * (self.ncols * r) for _ in range(self.nrows * r)]
            for i, row in enumerate(M):
                for j, e in enumerate(row):
                    if spec.is_zero(e):
                        continue
                    blk = mulmat(spec, e)
                    for a in range(r):
                        out = big[i * r + a]
                        for b in range(r):
                            out[j * r + b] = blk[a][b]
            self.ms = ModSolver(big, m, ncols=self.ncols * r)

    def _flat(self, v):
        return [x for e in v for x in e]

    def _unflat(self, flat):
        r = self.spec.rank
        return [tuple(flat[j * r:(j + 1) * r]) for j in range(self.ncols)]

    def solve(self, b):
        if self.parts is not None:
            per = []
            for idx, ks in enumerate(self.parts):
                bi = [self.spec.split(e)[idx] for e in b]
                xi = ks.solve(bi)
                if xi is None:
                    return None
                per.append(xi)
            return [self.spec.join([p[j] for p in per]) for j in range(self.ncols)]
        return None if (s := self.ms.solve(self._flat(b))) is None else self._unflat(s)

    def count(self, b):
        if self.parts is not None:
            total = 1
            for idx, ks in enumerate(self.parts):
                total *= ks.count([self.spec.split(e)[idx] for e in b])
            return total
        return self.ms.count(self._flat(b))

    def nullspace(self):
        if self.parts is not None:
            gens = []
            for idx, ks in enumerate(self.parts):
                zeros = [s.zero() for s in self.spec.specs]
                for g in ks.nullspace():
                    vec = []
                    for e in g:
                        parts = list(zeros)
                        parts[idx] = e
                        vec.append(self.spec.join(parts))
                    gens.append(vec)
            return gens
        return [self._unflat(g) for g in self.ms.nullspace()]


def k_solve(spec, M, b):
    return KSolver(spec, M).solve(b)


def k_nullspace(spec, M, ncols=None):
    return KSolver(spec, M, ncols=ncols).nullspace()


def k_identity(spec, n):
    one, zero = spec.one(), spec.zero()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def k_matmul(spec, A, B):
    n, k = len(A), len(B)
    p = len(B[0]) if k else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = spec.zero()
            for t in range(k):
                a = A[i][t]
                if not spec.is_zero(a):
                    acc = spec.add(acc, spec.mul(a, B[t][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def k_mat_vec(spec, A, v):
    out = []
    for row in A:
        acc = spec.zero()
        for a, x in zip(row, v):
            if not spec.is_zero(a):
                acc = spec.add(acc, spec.mul(a, x))
        out.append(acc)
    return tuple(out)


def k_dot(spec, u, v):
    acc = spec.zero()
    for a, b in zip(u, v):
        acc = spec.add(acc, spec.mul(a, b))
    return acc


def k_transpose(M):
    return tuple(tuple(r) for r in zip(*M))


def freeze_mat(M):
    return tuple(tuple(row) for row in M)


def k_det(spec, M):
    """Determinant by column expansion with a row-mask memo."""
    n = len(M)
    if n == 0:
        return spec.one()
    memo = {}

    def go(mask, col):
        if col == n:
            return spec.one()
        hit = memo.get(mask)
        if hit is not None:
            return hit
        acc = spec.zero()
        sign = 1
        for i in range(n):
            if mask & (1 << i):
                a = M[i][col]
                if not spec.is_zero(a):
                    term = spec.mul(a, go(mask & ~(1 << i), col + 1))
                    acc = spec.add(acc, term) if sign > 0 else spec.sub(acc, term)
                sign = -sign
        memo[mask] = acc
        return acc

    return go((1 << n) - 1, 0)


def k_mat_inv(spec, M):
    """Inverse of a square matrix over the spec, or None."""
    n = len(M)
    ks = KSolver(spec, M, ncols=n)
    cols = []
    for j in range(n):
        e = [spec.one() if i == j else spec.zero() for i in range(n)]
        x = ks.solve(e)
        if x is None:
            return None
        cols.append(x)
    X = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    ident = k_identity(spec, n)
    if k_matmul(spec, M, X) != ident or k_matmul(spec, X, M) != ident:
        return None
    return X
