"""Vectorized (pi, rho) arithmetic for axiom sweeps.

Requires a coefficient ring whose basis slots share one additive
modulus m; ring multiplication is the contraction of a structure
tensor.  A batch of N algebra elements is an int64 array (N, d, d, rk);
a Delta batch is the pair of its pi and rho arrays.  Element equality
in Delta is pair equality, which is what the coordinate read makes
faithful, so every axiom in the shared table becomes an array identity.
"""

import numpy as np

from .coeff_ring import StructureError
from .odd_form_param import herm_slots, _torsion_list, slot_sizes


class BatchOps:
    vectorized = True

    def __init__(self, shape):
        alg = shape.alg
        K = alg.K
        m = K.uniform_modulus()
        if m is None:
            raise StructureError("batch engine needs a uniform additive modulus")
        self.shape = shape
        self.alg = alg
        self.K = K
        self.m = m
        self.rk = K.rank
        idx = list(alg.indices)
        self.d = len(idx)
        self.pos = {i: t for t, i in enumerate(idx)}
        self.pos0 = self.pos.get(0)
        S = np.zeros((self.rk, self.rk, self.rk), dtype=np.int64)
        for a in range(self.rk):
            ea = tuple(1 if t == a else 0 for t in range(self.rk))
            for b in range(self.rk):
                eb = tuple(1 if t == b else 0 for t in range(self.rk))
                S[a, b] = K.mul(ea, eb)
        self.S = S % m
        E = np.ones((self.d, self.d), dtype=np.int64)
        if alg.kind == "symp":
            for i in idx:
                for j in idx:
                    if alg.eps(i) * alg.eps(j) < 0:
                        E[self.pos[i], self.pos[j]] = m - 1
        self.E = E
        self.ktab = np.array(list(K.elements()), dtype=np.int64).reshape(K.card, self.rk)
        self.ttab = np.array(_torsion_list(K), dtype=np.int64).reshape(-1, self.rk)
        self.maskpos = np.array([1 if i > 0 else 0 for i in idx], dtype=np.int64)
        self.uw = np.triu(np.full((self.d, self.d), 2, dtype=np.int64), 1) + np.eye(
            self.d, dtype=np.int64)
        self.hslots = herm_slots(alg)
        self.onevec = np.array(K.one(), dtype=np.int64)

    # ring and matrix primitives; the structure tensor is unrolled into
    # stacked integer matmuls, which are far faster than int einsum
    def kmul(self, x, y):
        if self.rk == 1:
            return (x * y) % self.m
        out = np.zeros_like(x)
        for a in range(self.rk):
            for b in range(self.rk):
                w = x[:, a] * y[:, b]
                for c in np.nonzero(self.S[a, b])[0]:
                    out[:, c] += self.S[a, b, c] * w
        return out % self.m

    def kscale(self, k, X):
        if self.rk == 1:
            return (k[:, 0, None, None, None] * X) % self.m
        out = np.zeros_like(X)
        for a in range(self.rk):
            ka = k[:, a, None, None]
            for b in range(self.rk):
                w = ka * X[..., b]
                for c in np.nonzero(self.S[a, b])[0]:
                    out[..., c] += self.S[a, b, c] * w
        return out % self.m

    def dmul(self, X, Y):
        if self.pos0 is not None:
            Y = Y.copy()
            Y[:, self.pos0] = (2 * Y[:, self.pos0]) % self.m
        if self.rk == 1:
            return np.matmul(X[..., 0], Y[..., 0])[..., None] % self.m
        out = np.zeros_like(X)
        for a in range(self.rk):
            Xa = X[..., a]
            for b in range(self.rk):
                w = np.matmul(Xa, Y[..., b])
                for c in np.nonzero(self.S[a, b])[0]:
                    out[..., c] += self.S[a, b, c] * w
        return out % self.m

    def conj(self, X):
        Z = (X * self.E[None, :, :, None]) % self.m
        return np.ascontiguousarray(np.swapaxes(Z[:, ::-1, ::-1, :], 1, 2))

    def fold_residue(self, P):
        DP = P * self.maskpos[None, :, None, None]
        R0 = (-self.dmul(self.conj(P), DP)) % self.m
        if self.pos0 is not None:
            kv = P[:, self.pos0]
            if self.rk == 1:
                M = (kv[:, :, None] * kv[:, None, :]) % self.m
            else:
                M = np.zeros((P.shape[0], self.d, self.d, self.rk), dtype=np.int64)
                for a in range(self.rk):
                    for b in range(self.rk):
                        w = kv[:, :, None, a] * kv[:, None, :, b]
                        for c in np.nonzero(self.S[a, b])[0]:
                            M[..., c] += self.S[a, b, c] * w
                M %= self.m
            corr = (M * self.uw[None, :, :, None]) % self.m
            R0 = (R0 - corr[:, ::-1]) % self.m
        return R0

    def read_aug_ok(self, S):
        """True where S lies in the span of the augmentation basis."""
        X = np.zeros_like(S)
        V = np.zeros_like(S)
        for key in self.shape.d_keys:
            if key[0] == "f":
                a, b = self.pos[key[1]], self.pos[key[2]]
                X[:, a, b] = S[:, a, b]
            else:
                a, b = self.pos[-key[1]], self.pos[key[1]]
                V[:, a, b] = S[:, a, b]
        rec = (X - self.conj(X) + V) % self.m
        return (rec == S).all(axis=(1, 2, 3))

    # factor materializers; idx is (N, nslots)
    def materialize(self, kind, idx):
        N = idx.shape[0]
        zeros = lambda: np.zeros((N, self.d, self.d, self.rk), dtype=np.int64)
        if kind == "delta":
            P = zeros()
            col = 0
            for (i, j) in self.shape.q_pairs:
                P[:, self.pos[i], self.pos[j]] = self.ktab[idx[:, col]]
                col += 1
            for i in self.shape.u_idx:
                P[:, self.pos0, self.pos[i]] = self.ktab[idx[:, col]]
                col += 1
            X, V = zeros(), zeros()
            for key in self.shape.d_keys:
                val = self.ktab[idx[:, col]]
                col += 1
                if key[0] == "f":
                    X[:, self.pos[key[1]], self.pos[key[2]]] = val
                else:
                    V[:, self.pos[-key[1]], self.pos[key[1]]] = val
            Sd = (X - self.conj(X) + V) % self.m
            return (P, (self.fold_residue(P) + Sd) % self.m)
        if kind == "alg":
            A = zeros()
            for col, (i, j) in enumerate(self.alg.pairs):
                A[:, self.pos[i], self.pos[j]] = self.ktab[idx[:, col]]
            return A
        if kind == "ualg":
            return (self.materialize("alg", idx[:, :-1]), self.ktab[idx[:, -1]])
        if kind == "scalar":
            return self.ktab[idx[:, 0]]
        if kind == "aug":
            X, V = zeros(), zeros()
            for col, key in enumerate(self.shape.d_keys):
                val = self.ktab[idx[:, col]]
                if key[0] == "f":
                    X[:, self.pos[key[1]], self.pos[key[2]]] = val
                else:
                    V[:, self.pos[-key[1]], self.pos[key[1]]] = val
            return (zeros(), (X - self.conj(X) + V) % self.m)
        if kind == "herm":
            A = zeros()
            for col, (stype, i, j, _) in enumerate(self.hslots):
                val = (self.ttab if stype == "tors" else self.ktab)[idx[:, col]]
                A[:, self.pos[i], self.pos[j]] = (
                    A[:, self.pos[i], self.pos[j]] + val) % self.m
                if stype == "rep":
                    sgn = 1 if self.alg.eps(i) * self.alg.eps(j) > 0 else self.m - 1
                    a, b = self.pos[-j], self.pos[-i]
                    A[:, a, b] = (A[:, a, b] + sgn * val) % self.m
            return A
        raise StructureError("unknown factor kind %r" % kind)

    # delta ops on (P, R) pairs
    def dadd(self, u, v):
        P = (u[0] + v[0]) % self.m
        R = (u[1] - self.dmul(self.conj(u[0]), v[0]) + v[1]) % self.m
        return (P, R)

    def dneg(self, u):
        return ((-u[0]) % self.m, self.conj(u[1]))

    def dzero_like(self, u):
        return (np.zeros_like(u[0]), np.zeros_like(u[1]))

    def deq(self, u, v):
        return (u[0] == v[0]).all(axis=(1, 2, 3)) & (u[1] == v[1]).all(axis=(1, 2, 3))

    def dis0(self, u):
        return (u[0] == 0).all(axis=(1, 2, 3)) & (u[1] == 0).all(axis=(1, 2, 3))

    def daug(self, u):
        return (u[0] == 0).all(axis=(1, 2, 3)) & self.read_aug_ok(u[1])

    def phi(self, A):
        return (np.zeros_like(A), (A - self.conj(A)) % self.m)

    def pi(self, u):
        return u[0]

    def rho(self, u):
        return u[1]

    def act(self, u, al):
        A, k = al
        P, R = u
        P2 = (self.dmul(P, A) + self.kscale(k, P)) % self.m
        left = self.dmul(self.conj(A), R)
        R2 = (self.dmul(left, A) + self.kscale(k, left)
              + self.kscale(k, self.dmul(R, A))
              + self.kscale(self.kmul(k, k), R)) % self.m
        return (P2, R2)

    def kact(self, k, v):
        return (v[0], self.kscale(k, v[1]))

    def both(self, a, b):
        return a & b

    # algebra ops
    def aadd(self, a, b):
        return (a + b) % self.m

    def asub(self, a, b):
        return (a - b) % self.m

    def aneg(self, a):
        return (-a) % self.m

    def abar(self, a):
        return self.conj(a)

    def amul(self, a, b):
        return self.dmul(a, b)

    def akmul(self, k, a):
        return self.kscale(k, a)

    def aeq(self, a, b):
        return (a == b).all(axis=(1, 2, 3))

    def ais0(self, a):
        return (a == 0).all(axis=(1, 2, 3))

    # unitalized ops
    def ual_add(self, al, be):
        return ((al[0] + be[0]) % self.m, (al[1] + be[1]) % self.m)

    def ualmul(self, al, be):
        body = (self.dmul(al[0], be[0]) + self.kscale(be[1], al[0])
                + self.kscale(al[1], be[0])) % self.m
        return (body, self.kmul(al[1], be[1]))

    def scalar_ual(self, k):
        return (np.zeros((k.shape[0], self.d, self.d, self.rk), dtype=np.int64), k)

    def _const_scalar(self, u, vec):
        n = u[0].shape[0]
        k = np.broadcast_to(np.asarray(vec, dtype=np.int64) % self.m, (n, self.rk))
        return (np.zeros((n, self.d, self.d, self.rk), dtype=np.int64),
                np.ascontiguousarray(k))

    def ual_one_like(self, u):
        return self._const_scalar(u, self.onevec)

    def ual_zero_like(self, u):
        return self._const_scalar(u, np.zeros(self.rk, dtype=np.int64))

    def ual_neg_one_like(self, u):
        return self._const_scalar(u, (-self.onevec) % self.m)

    def mul_right_ual(self, x, al):
        return (self.dmul(x, al[0]) + self.kscale(al[1], x)) % self.m

    def sandwich(self, al, x):
        A, k = al
        left = self.dmul(self.conj(A), x)
        return (self.dmul(left, A) + self.kscale(k, left)
                + self.kscale(k, self.dmul(x, A))
                + self.kscale(self.kmul(k, k), x)) % self.m

    def twosided(self, be, al, x):
        left = (self.dmul(self.conj(be[0]), x) + self.kscale(be[1], x)) % self.m
        return (self.dmul(left, al[0]) + self.kscale(al[1], left)) % self.m

    def evaluate(self, kinds, fn, idxmat):
        facs = []
        off = 0
        for kind in kinds:
            w = len(slot_sizes(self.shape, kind))
            facs.append(self.materialize(kind, idxmat[:, off:off + w]))
            off += w
        res = np.asarray(fn(self, *facs))
        if res.ndim == 0:
            res = np.broadcast_to(res, (idxmat.shape[0],))
        if bool(res.all()):
            return True, None
        return False, int(np.argmax(~res))
