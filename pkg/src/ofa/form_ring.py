"""Split form rings: matrix-type algebras with involution.

Four presets over a coefficient ring spec K.  The linear preset is a
pair of opposite matrix blocks swapped by the involution; the symplectic
and even orthogonal presets are full matrix types over signed indices;
the odd orthogonal preset keeps a middle index 0 whose through-products
are doubled, e_i0 e_0l = 2 e_il, which makes the ring non-unital
whenever 2 is not invertible.  Elements are sparse dicts over basis
pairs (i, j).
"""

import itertools

from .coeff_ring import CapacityError, StructureError
from .linalg import k_nullspace

_ENUM_CAP = 1 << 20
_N_CAP = 6


class El:
    """Sparse algebra element: dict (i, j) -> nonzero K coefficient."""

    __slots__ = ("alg", "c", "key")

    def __init__(self, alg, c):
        self.alg = alg
        self.c = c
        self.key = tuple(sorted(c.items()))

    def __eq__(self, other):
        return isinstance(other, El) and self.alg.tag == other.alg.tag and self.key == other.key

    def __hash__(self):
        return hash((self.alg.tag, self.key))

    def __bool__(self):
        return bool(self.c)

    def __add__(self, other):
        return self.alg.add(self, other)

    def __sub__(self, other):
        return self.alg.sub(self, other)

    def __neg__(self):
        return self.alg.neg(self)

    def __mul__(self, other):
        return self.alg.mul(self, other)

    def bar(self):
        return self.alg.conj(self)

    def coeff(self, i, j):
        return self.c.get((i, j), self.alg.K.zero())

    def __repr__(self):
        if not self.c:
            return "0"
        return " + ".join("%s*e(%d,%d)" % (v, i, j) for (i, j), v in self.key)


class SplitAlgebra:
    """One of the split presets; see the module docstring."""

    def __init__(self, kind, n, indices, pairs, K):
        self.kind = kind
        self.n = n
        self.indices = tuple(indices)
        self.pairs = tuple(pairs)
        self.pairset = frozenset(pairs)
        self.K = K
        self.rank = len(self.pairs)
        self.tag = "%s:%d:%s" % (kind, len(indices), K.name)

    def eps(self, i):
        if self.kind == "symp":
            return 1 if i > 0 else -1
        return 1

    def el(self, coeffs):
        K = self.K
        c = {}
        for key, v in coeffs.items():
            if key not in self.pairset:
                raise StructureError("pair %r not in %s" % (key, self.tag))
            if not K.is_zero(v):
                c[key] = v
        return El(self, c)

    def e(self, i, j, v=None):
        return self.el({(i, j): self.K.one() if v is None else v})

    def zero(self):
        return El(self, {})

    def add(self, a, b):
        K = self.K
        c = dict(a.c)
        for key, v in b.c.items():
            w = K.add(c.get(key, K.zero()), v)
            if K.is_zero(w):
                c.pop(key, None)
            else:
                c[key] = w
        return El(self, c)

    def neg(self, a):
        K = self.K
        return El(self, {key: K.neg(v) for key, v in a.c.items()})

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def kmul(self, k, a):
        K = self.K
        c = {}
        for key, v in a.c.items():
            w = K.mul(k, v)
            if not K.is_zero(w):
                c[key] = w
        return El(self, c)

    def smul(self, nint, a):
        return self.kmul(self.K.from_int(nint), a)

    def mul(self, a, b):
        K = self.K
        rows = {}
        for (k, l), v in b.c.items():
            rows.setdefault(k, []).append((l, v))
        c = {}
        for (i, j), u in a.c.items():
            hits = rows.get(j)
            if not hits:
                continue
            for l, v in hits:
                w = K.mul(u, v)
                if j == 0:
                    w = K.smul(2, w)
                if K.is_zero(w):
                    continue
                key = (i, l)
                t = K.add(c.get(key, K.zero()), w)
                if K.is_zero(t):
                    c.pop(key, None)
                else:
                    c[key] = t
        return El(self, c)

    def conj(self, a):
        K = self.K
        c = {}
        for (i, j), v in a.c.items():
            if self.eps(i) * self.eps(j) < 0:
                v = K.neg(v)
            c[(-j, -i)] = v
        return El(self, c)

    def unit(self):
        """Multiplicative unit, when the preset has one."""
        coeffs = {(i, i): self.K.one() for i in self.indices if i != 0}
        if 0 in self.indices:
            half = self.K.try_invert(self.K.from_int(2))
            if half is None:
                raise StructureError("no unit: 2 is not invertible in %s" % self.K.name)
            coeffs[(0, 0)] = half
        return self.el(coeffs)

    def coords(self, a):
        return tuple(a.coeff(i, j) for (i, j) in self.pairs)

    def from_coords(self, vec):
        return self.el({key: v for key, v in zip(self.pairs, vec)})

    def card(self):
        return self.K.card ** self.rank

    def elements(self):
        if self.card() > _ENUM_CAP:
            raise CapacityError("algebra enumeration over %d elements" % self.card())
        for vec in itertools.product(self.K.elements(), repeat=self.rank):
            yield self.from_coords(vec)

    def sample(self, rng):
        vec = [tuple(rng.randrange(m) for m in self.K.moduli) for _ in range(self.rank)]
        return self.from_coords(vec)

    def row(self, a, i):
        return El(self, {key: v for key, v in a.c.items() if key[0] == i})

    def col(self, a, j):
        return El(self, {key: v for key, v in a.c.items() if key[1] == j})

    def __repr__(self):
        return "<alg %s>" % self.tag


def ofalin(n, K):
    """Linear preset of block size n: two opposite blocks, swapped by conj."""
    if n < 0:
        raise StructureError("ofalin needs n >= 0")
    if n > _N_CAP:
        raise CapacityError("ofalin size %d over cap %d" % (n, _N_CAP))
    idx = list(range(-n, 0)) + list(range(1, n + 1))
    pairs = [(i, j) for i in idx for j in idx if i * j > 0]
    return SplitAlgebra("lin", n, idx, pairs, K)


def ofasymp(r, K):
    """Symplectic preset of even rank r."""
    if r < 0 or r % 2:
        raise StructureError("ofasymp needs even rank >= 0")
    n = r // 2
    if n > _N_CAP:
        raise CapacityError("ofasymp size %d over cap %d" % (r, 2 * _N_CAP))
    idx = list(range(-n, 0)) + list(range(1, n + 1))
    pairs = [(i, j) for i in idx for j in idx]
    return SplitAlgebra("symp", n, idx, pairs, K)


def ofaorth(r, K):
    """Orthogonal preset of rank r; odd rank keeps the doubled index 0."""
    if r < 0:
        raise StructureError("ofaorth needs rank >= 0")
    n = r // 2
    if r % 2:
        if r > 9:
            raise CapacityError("ofaorth odd rank %d over cap 9" % r)
        idx = list(range(-n, n + 1))
    else:
        if n > _N_CAP:
            raise CapacityError("ofaorth size %d over cap %d" % (r, 2 * _N_CAP))
        idx = list(range(-n, 0)) + list(range(1, n + 1))
    pairs = [(i, j) for i in idx for j in idx]
    return SplitAlgebra("orth", n, idx, pairs, K)


def center(alg):
    """Spanning set of {x : xb = bx for all b}, by exact linear solve."""
    K = alg.K
    basis = [alg.e(i, j) for (i, j) in alg.pairs]
    M = []
    for b in basis:
        rows = [[K.zero()] * alg.rank for _ in range(alg.rank)]
        for t, p in enumerate(basis):
            d = alg.sub(alg.mul(p, b), alg.mul(b, p))
            for s, v in enumerate(alg.coords(d)):
                rows[s][t] = v
        M.extend(rows)
    out = []
    for vec in k_nullspace(K, M, alg.rank):
        x = alg.from_coords(vec)
        if x:
            out.append(x)
    return out


def hermitian_center(alg):
    """Spanning set of the involution-fixed part of the center."""
    K = alg.K
    basis = [alg.e(i, j) for (i, j) in alg.pairs]
    M = []
    for b in basis:
        rows = [[K.zero()] * alg.rank for _ in range(alg.rank)]
        for t, p in enumerate(basis):
            d = alg.sub(alg.mul(p, b), alg.mul(b, p))
            for s, v in enumerate(alg.coords(d)):
                rows[s][t] = v
        M.extend(rows)
    rows = [[K.zero()] * alg.rank for _ in range(alg.rank)]
    for t, p in enumerate(basis):
        d = alg.sub(p, alg.conj(p))
        for s, v in enumerate(alg.coords(d)):
            rows[s][t] = v
    M.extend(rows)
    out = []
    for vec in k_nullspace(K, M, alg.rank):
        x = alg.from_coords(vec)
        if x:
            out.append(x)
    return out


class UnitalEl:
    """Element body + scalar of the unitalization R + K."""

    __slots__ = ("body", "scalar", "key")

    def __init__(self, body, scalar):
        self.body = body
        self.scalar = scalar
        self.key = (body.key, scalar)

    def __eq__(self, other):
        return isinstance(other, UnitalEl) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __mul__(self, other):
        return unital_mul(self, other)

    def bar(self):
        return unital_involution(self)

    def __repr__(self):
        return "(%r) + %s" % (self.body, self.scalar)


def unital(body, scalar=None):
    if scalar is None:
        scalar = body.alg.K.zero()
    return UnitalEl(body, scalar)


def unital_one(alg):
    return UnitalEl(alg.zero(), alg.K.one())


def unital_mul(a, b):
    alg = a.body.alg
    body = alg.add(
        alg.mul(a.body, b.body),
        alg.add(alg.kmul(b.scalar, a.body), alg.kmul(a.scalar, b.body)),
    )
    return UnitalEl(body, alg.K.mul(a.scalar, b.scalar))


def unital_involution(a):
    return UnitalEl(a.body.alg.conj(a.body), a.scalar)


def rep_odd(alg, a):
    """Matrix image of the odd orthogonal preset, doubling column 0.

    A ring map into the full matrix ring; its kernel is the set of
    k*e(0,0) with 2k = 0.
    """
    assert alg.kind == "orth" and 0 in alg.indices
    K = alg.K
    idx = sorted(alg.indices)
    pos = {i: t for t, i in enumerate(idx)}
    M = [[K.zero()] * len(idx) for _ in idx]
    for (i, j), v in a.c.items():
        M[pos[i]][pos[j]] = K.smul(2, v) if j == 0 else v
    return tuple(tuple(row) for row in M)


def rep_odd_kernel(alg):
    """Spanning set of the kernel of rep_odd: the 2-torsion of K times e(0,0)."""
    assert alg.kind == "orth" and 0 in alg.indices
    K = alg.K
    out = []
    for vec in k_nullspace(K, [[K.from_int(2)]], 1):
        if not K.is_zero(vec[0]):
            out.append(alg.e(0, 0, vec[0]))
    return out


def x_central(alg, k):
    """Central element k*e(0,0) + 2k*sum of the other diagonal units."""
    assert alg.kind == "orth" and 0 in alg.indices
    K = alg.K
    coeffs = {(0, 0): k}
    for i in alg.indices:
        if i != 0:
            coeffs[(i, i)] = K.smul(2, k)
    return alg.el(coeffs)


def alg_el_to_json(a):
    return [{"i": i, "j": j, "c": list(v)} for (i, j), v in a.key]


def alg_el_from_json(alg, data):
    c = {}
    for d in data:
        v = alg.K.check_element(tuple(int(x) for x in d["c"]))
        c[(int(d["i"]), int(d["j"]))] = v
    return alg.el(c)


class DsEl:
    """Element of a direct sum: one component element per summand."""

    __slots__ = ("alg", "parts", "key")

    def __init__(self, alg, parts):
        self.alg = alg
        self.parts = tuple(parts)
        self.key = tuple(p.key for p in self.parts)

    def __eq__(self, other):
        return isinstance(other, DsEl) and self.alg.tag == other.alg.tag and self.key == other.key

    def __hash__(self):
        return hash((self.alg.tag, self.key))

    def __bool__(self):
        return any(self.parts)

    def __add__(self, other):
        return self.alg.add(self, other)

    def __sub__(self, other):
        return self.alg.sub(self, other)

    def __neg__(self):
        return self.alg.neg(self)

    def __mul__(self, other):
        return self.alg.mul(self, other)

    def bar(self):
        return self.alg.conj(self)


class DirectSumAlgebra:
    """Direct sum of split algebras, all operations componentwise."""

    def __init__(self, comps):
        self.comps = tuple(comps)
        if not self.comps:
            raise StructureError("empty direct sum")
        ks = {c.K.name for c in self.comps}
        if len(ks) != 1:
            raise StructureError("direct sum needs one coefficient ring")
        self.K = self.comps[0].K
        self.tag = "ds(%s)" % ",".join(c.tag for c in self.comps)

    def wrap(self, parts):
        return DsEl(self, parts)

    def zero(self):
        return DsEl(self, [c.zero() for c in self.comps])

    def inject(self, t, a):
        parts = [c.zero() for c in self.comps]
        parts[t] = a
        return DsEl(self, parts)

    def add(self, a, b):
        return DsEl(self, [c.add(x, y) for c, x, y in zip(self.comps, a.parts, b.parts)])

    def neg(self, a):
        return DsEl(self, [c.neg(x) for c, x in zip(self.comps, a.parts)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return DsEl(self, [c.mul(x, y) for c, x, y in zip(self.comps, a.parts, b.parts)])

    def kmul(self, k, a):
        return DsEl(self, [c.kmul(k, x) for c, x in zip(self.comps, a.parts)])

    def conj(self, a):
        return DsEl(self, [c.conj(x) for c, x in zip(self.comps, a.parts)])

    def __repr__(self):
        return "<alg %s>" % self.tag
