"""Odd form parameters Delta for the split classical presets.

Every element has a unique coordinate word: q-coefficients on the
admissible matrix slots, u-coefficients on the row-0 orbits of the odd
orthogonal preset, then coefficients over the augmentation basis.  The
group law is evaluated in the faithful picture u -> (pi(u), rho(u)):
words fold left to right through the cocycle rule, and coordinates are
read back by subtracting the fold residue of the q/u monomials and
expanding what remains over the augmentation basis.  A pair that fails
the read is not a member.

Axiom sweeps share one table of identities, evaluated either by the
exact per-element engine here or by the vectorized engine in
batch_delta when the coefficient ring has a uniform additive modulus.
"""

import itertools
import math

import numpy as np

from .coeff_ring import CapacityError, StructureError
from .form_ring import UnitalEl, unital, unital_mul

_ENUM_CAP = 1 << 20
EXH_DELTA_CAP = 1 << 16
_EXH_TUPLE_CAP = 1 << 16
_DICT_TUPLE_CAP = 1 << 12


class DeltaShape:
    """Coordinate layout of Delta over one preset algebra."""

    def __init__(self, alg):
        idx = alg.indices
        if alg.kind == "lin":
            q_pairs = list(alg.pairs)
            u_idx = ()
            d_keys = [("f", i, j) for i in idx if i > 0 for j in idx if j > 0]
        elif alg.kind == "symp":
            q_pairs = list(alg.pairs)
            u_idx = ()
            d_keys = [("f", i, j) for (i, j) in alg.pairs if i + j > 0]
            d_keys += [("v", i) for i in idx]
        elif 0 not in idx:
            q_pairs = list(alg.pairs)
            u_idx = ()
            d_keys = [("f", i, j) for (i, j) in alg.pairs if i + j > 0]
        else:
            q_pairs = [(i, j) for (i, j) in alg.pairs if i != 0]
            u_idx = tuple(idx)
            d_keys = [("f", i, j) for (i, j) in alg.pairs if i + j > 0]
        self.alg = alg
        self.q_pairs = tuple(q_pairs)
        self.u_idx = tuple(u_idx)
        self.d_keys = tuple(d_keys)
        self.dim = len(self.q_pairs) + len(self.u_idx) + len(self.d_keys)
        self.dplus = alg.el({(k, k): alg.K.one() for k in idx if k > 0})
        self.tag = "delta:" + alg.tag

    def card(self):
        return self.alg.K.card ** self.dim

    def el(self, q=None, u=None, d=None):
        K = self.alg.K
        qc, uc, dc = {}, {}, {}
        for key, v in (q or {}).items():
            if key not in self.q_pairs:
                raise StructureError("no q slot %r in %s" % (key, self.tag))
            if not K.is_zero(v):
                qc[key] = K.check_element(v)
        for i, v in (u or {}).items():
            if i not in self.u_idx:
                raise StructureError("no u slot %r in %s" % (i, self.tag))
            if not K.is_zero(v):
                uc[i] = K.check_element(v)
        for key, v in (d or {}).items():
            if key not in self.d_keys:
                raise StructureError("no d slot %r in %s" % (key, self.tag))
            if not K.is_zero(v):
                dc[key] = K.check_element(v)
        return DeltaElem(self, qc, uc, dc)

    def zero(self):
        return DeltaElem(self, {}, {}, {})

    def __repr__(self):
        return "<%s dim=%d>" % (self.tag, self.dim)


class DeltaElem:
    """Normal-form element: coordinate maps over the three supports."""

    __slots__ = ("shape", "q", "u", "d", "key")

    def __init__(self, shape, q, u, d):
        self.shape = shape
        self.q = q
        self.u = u
        self.d = d
        self.key = (
            tuple(sorted(q.items())),
            tuple(sorted(u.items())),
            tuple(sorted(d.items())),
        )

    def __eq__(self, other):
        return (
            isinstance(other, DeltaElem)
            and self.shape.tag == other.shape.tag
            and self.key == other.key
        )

    def __hash__(self):
        return hash((self.shape.tag, self.key))

    def __bool__(self):
        return bool(self.q or self.u or self.d)

    def __add__(self, other):
        return delta_add(self, other)

    def __neg__(self):
        return delta_neg(self)

    def __repr__(self):
        if not self:
            return "0."
        bits = []
        for (i, j), v in self.key[0]:
            bits.append("q%d*%se(%d,%d)" % (i, v, i, j))
        for i, v in self.key[1]:
            bits.append("u%d*%s" % (i, v))
        for key, v in self.key[2]:
            if key[0] == "f":
                bits.append("%sphi(e(%d,%d))" % (v, key[1], key[2]))
            else:
                bits.append("%sv%d" % (v, key[1]))
        return " + ".join(bits)


def _fold_residue(shape, p):
    """rho of the q/u monomial word of p, folded in coordinate order."""
    alg = shape.alg
    base = alg.neg(alg.mul(alg.conj(p), alg.mul(shape.dplus, p)))
    if shape.u_idx:
        K = alg.K
        ks = [(j, p.coeff(0, j)) for j in alg.indices]
        corr = {}
        for t, (j, kj) in enumerate(ks):
            if K.is_zero(kj):
                continue
            for jp, kjp in ks[t:]:
                w = K.mul(kj, kjp)
                if jp != j:
                    w = K.smul(2, w)
                if not K.is_zero(w):
                    slot = (-j, jp)
                    corr[slot] = K.add(corr.get(slot, K.zero()), w)
        base = alg.sub(base, alg.el(corr))
    return base


def _aug_span_el(shape, d):
    alg = shape.alg
    total = alg.zero()
    for key, c in d.items():
        if key[0] == "f":
            b = alg.e(key[1], key[2], c)
            total = alg.add(total, alg.sub(b, alg.conj(b)))
        else:
            total = alg.add(total, alg.e(-key[1], key[1], c))
    return total


def to_pair(x):
    """(pi(x), rho(x)); the pair determines x (see special_check)."""
    shape = x.shape
    alg = shape.alg
    coeffs = dict(x.q)
    for i, v in x.u.items():
        coeffs[(0, i)] = v
    p = alg.el(coeffs)
    r = alg.add(_fold_residue(shape, p), _aug_span_el(shape, x.d))
    return p, r


def member(shape, p, r):
    """Read coordinates off a (pi, rho) pair; None if not in Delta."""
    alg = shape.alg
    K = alg.K
    q, u, d = {}, {}, {}
    for key in shape.q_pairs:
        c = p.coeff(*key)
        if not K.is_zero(c):
            q[key] = c
    for i in shape.u_idx:
        c = p.coeff(0, i)
        if not K.is_zero(c):
            u[i] = c
    s = alg.sub(r, _fold_residue(shape, p))
    for key in shape.d_keys:
        c = s.coeff(key[1], key[2]) if key[0] == "f" else s.coeff(-key[1], key[1])
        if not K.is_zero(c):
            d[key] = c
    if _aug_span_el(shape, d) != s:
        return None
    return DeltaElem(shape, q, u, d)


def pi(x):
    return to_pair(x)[0]


def rho(x):
    return to_pair(x)[1]


def delta_zero(shape):
    return shape.zero()


def delta_add(x, y):
    if x.shape.tag != y.shape.tag:
        raise StructureError("shape mismatch %s / %s" % (x.shape.tag, y.shape.tag))
    alg = x.shape.alg
    px, rx = to_pair(x)
    py, ry = to_pair(y)
    p = alg.add(px, py)
    r = alg.add(alg.sub(rx, alg.mul(alg.conj(px), py)), ry)
    out = member(x.shape, p, r)
    assert out is not None
    return out


def delta_neg(x):
    alg = x.shape.alg
    p, r = to_pair(x)
    out = member(x.shape, alg.neg(p), alg.conj(r))
    assert out is not None
    return out


def phi(shape, a):
    alg = shape.alg
    out = member(shape, alg.zero(), alg.sub(a, alg.conj(a)))
    assert out is not None
    return out


def tau(x):
    return phi(x.shape, rho(x))


def act_unital(x, al):
    """Right action of body+scalar in the unitalized algebra."""
    shape = x.shape
    alg = shape.alg
    K = alg.K
    a, k = al.body, al.scalar
    p, r = to_pair(x)
    p2 = alg.add(alg.mul(p, a), alg.kmul(k, p))
    ab = alg.conj(a)
    left = alg.mul(ab, r)
    r2 = alg.add(
        alg.add(alg.mul(left, a), alg.kmul(k, left)),
        alg.add(alg.kmul(k, alg.mul(r, a)), alg.kmul(K.mul(k, k), r)),
    )
    out = member(shape, p2, r2)
    assert out is not None
    return out


def act(x, a):
    return act_unital(x, unital(a))


def act_scalar(k, x):
    """Left K-module action on the augmentation part only."""
    if x.q or x.u:
        raise StructureError("scalar action is only defined on augmentation elements")
    alg = x.shape.alg
    out = member(x.shape, alg.zero(), alg.kmul(k, to_pair(x)[1]))
    assert out is not None
    return out


def aug_member(x):
    return not x.q and not x.u


def gen_q(shape, i):
    if not any(p == (i, i) for p in shape.q_pairs):
        raise StructureError("no q generator %d" % i)
    return shape.el(q={(i, i): shape.alg.K.one()})


def gen_v(shape, i):
    return shape.el(d={("v", i): shape.alg.K.one()})


def gen_u(shape, i):
    if i not in shape.u_idx:
        raise StructureError("no u generator %d" % i)
    return shape.el(u={i: shape.alg.K.one()})


def central_u(shape, k):
    """u(k) over the odd orthogonal preset: central modulo the q/u word."""
    alg = shape.alg
    if not shape.u_idx:
        raise StructureError("central u needs the odd orthogonal preset")
    K = alg.K
    out = shape.zero()
    two_k = K.smul(2, k)
    for i in alg.indices:
        if i != 0:
            out = delta_add(out, act_unital(gen_q(shape, i), UnitalEl(alg.zero(), two_k)))
    out = delta_add(out, act_unital(gen_u(shape, 0), UnitalEl(alg.zero(), k)))
    ksq2 = K.smul(2, K.mul(k, k))
    body = alg.el({(i, i): ksq2 for i in alg.indices if i > 0})
    return delta_add(out, phi(shape, body))


def elements(shape):
    if shape.card() > _ENUM_CAP:
        raise CapacityError("delta enumeration over %d elements" % shape.card())
    K = shape.alg.K
    for vec in itertools.product(K.elements(), repeat=shape.dim):
        yield from_coords(shape, vec)


def from_coords(shape, vec):
    nq, nu = len(shape.q_pairs), len(shape.u_idx)
    q = dict(zip(shape.q_pairs, vec[:nq]))
    u = dict(zip(shape.u_idx, vec[nq:nq + nu]))
    d = dict(zip(shape.d_keys, vec[nq + nu:]))
    return shape.el(q=q, u=u, d=d)


def coords(x):
    K = x.shape.alg.K
    out = [x.q.get(key, K.zero()) for key in x.shape.q_pairs]
    out += [x.u.get(i, K.zero()) for i in x.shape.u_idx]
    out += [x.d.get(key, K.zero()) for key in x.shape.d_keys]
    return tuple(out)


def sample_elem(shape, rng):
    K = shape.alg.K
    vec = [tuple(rng.randrange(m) for m in K.moduli) for _ in range(shape.dim)]
    return from_coords(shape, vec)


def delta_to_json(x):
    out = {"q": [], "u": [], "d": []}
    for (i, j), v in x.key[0]:
        out["q"].append([i, j, list(v)])
    for i, v in x.key[1]:
        out["u"].append([i, list(v)])
    for key, v in x.key[2]:
        out["d"].append(list(key) + [list(v)])
    return out


def delta_from_json(shape, data):
    q = {(int(i), int(j)): tuple(int(x) for x in c) for i, j, c in data.get("q", [])}
    u = {int(i): tuple(int(x) for x in c) for i, c in data.get("u", [])}
    d = {}
    for entry in data.get("d", []):
        if entry[0] == "f":
            d[("f", int(entry[1]), int(entry[2]))] = tuple(int(x) for x in entry[3])
        else:
            d[("v", int(entry[1]))] = tuple(int(x) for x in entry[2])
    return shape.el(q=q, u=u, d=d)


def special_check(shape, cap=EXH_DELTA_CAP, count=10000, seed=0):
    """Verify that (pi, rho) determines the coordinates."""
    card = shape.card()
    if card <= cap:
        seen = set()
        ok = True
        for x in elements(shape):
            p, r = to_pair(x)
            seen.add((p.key, r.key))
            if member(shape, p, r) != x:
                ok = False
                break
        return {"pass": ok and len(seen) == card, "mode": "exhaustive",
                "checked": card, "distinct": len(seen)}
    import random

    rng = random.Random(seed)
    for _ in range(count):
        x = sample_elem(shape, rng)
        p, r = to_pair(x)
        if member(shape, p, r) != x:
            return {"pass": False, "mode": "sampled", "checked": count,
                    "witness": repr(x)}
    return {"pass": True, "mode": "sampled", "checked": count, "flagged": True}


def herm_slots(alg):
    """Slot layout for the involution-fixed elements of the algebra.

    Strict representative pairs carry a free coefficient mirrored with
    the conjugation sign; self-paired slots are free except for the
    symplectic preset, where they range over the 2-torsion of K.
    """
    K = alg.K
    slots = []
    for (i, j) in alg.pairs:
        mir = (-j, -i)
        if (i, j) < mir:
            slots.append(("rep", i, j, K.card))
        elif (i, j) == mir:
            if alg.kind == "symp":
                tors = [k for k in K.elements() if K.is_zero(K.smul(2, k))]
                slots.append(("tors", i, j, len(tors)))
            else:
                slots.append(("free", i, j, K.card))
    return slots


def _torsion_list(K):
    return [k for k in K.elements() if K.is_zero(K.smul(2, k))]


# Axiom table.  Each entry: name, factor kinds, check(ops, *factors).
# Factor kinds: delta, alg, ualg (body+scalar), scalar, aug, herm.

AXIOMS = (
    ("add-assoc", ("delta", "delta", "delta"),
     lambda o, u, v, w: o.deq(o.dadd(o.dadd(u, v), w), o.dadd(u, o.dadd(v, w)))),
    ("add-zero", ("delta",),
     lambda o, u: o.deq(o.dadd(u, o.dzero_like(u)), u)),
    ("add-neg", ("delta",),
     lambda o, u: o.dis0(o.dadd(u, o.dneg(u)))),
    ("pi-additive", ("delta", "delta"),
     lambda o, u, v: o.aeq(o.pi(o.dadd(u, v)), o.aadd(o.pi(u), o.pi(v)))),
    ("pi-action", ("delta", "ualg"),
     lambda o, u, al: o.aeq(o.pi(o.act(u, al)), o.mul_right_ual(o.pi(u), al))),
    ("phi-additive", ("alg", "alg"),
     lambda o, a, b: o.deq(o.phi(o.aadd(a, b)), o.dadd(o.phi(a), o.phi(b)))),
    ("phi-action", ("alg", "ualg"),
     lambda o, b, al: o.deq(o.act(o.phi(b), al), o.phi(o.sandwich(al, b)))),
    ("rho-cocycle", ("delta", "delta"),
     lambda o, u, v: o.aeq(
         o.rho(o.dadd(u, v)),
         o.aadd(o.asub(o.rho(u), o.amul(o.abar(o.pi(u)), o.pi(v))), o.rho(v)))),
    ("rho-action", ("delta", "ualg"),
     lambda o, u, al: o.aeq(o.rho(o.act(u, al)), o.sandwich(al, o.rho(u)))),
    ("rho-symmetry", ("delta",),
     lambda o, u: o.ais0(o.aadd(
         o.aadd(o.rho(u), o.abar(o.rho(u))),
         o.amul(o.abar(o.pi(u)), o.pi(u))))),
    ("pi-phi-zero", ("alg",),
     lambda o, a: o.ais0(o.pi(o.phi(a)))),
    ("rho-phi", ("alg",),
     lambda o, a: o.aeq(o.rho(o.phi(a)), o.asub(a, o.abar(a)))),
    ("commutator", ("delta", "delta"),
     lambda o, u, v: o.deq(
         o.dadd(o.dadd(o.dadd(u, v), o.dneg(u)), o.dneg(v)),
         o.phi(o.aneg(o.amul(o.abar(o.pi(u)), o.pi(v)))))),
    ("phi-hermitian-zero", ("herm",),
     lambda o, h: o.dis0(o.phi(h))),
    ("action-bilinear", ("delta", "ualg", "ualg"),
     lambda o, u, al, be: o.deq(
         o.act(u, o.ual_add(al, be)),
         o.dadd(o.dadd(o.act(u, al), o.phi(o.twosided(be, al, o.rho(u)))),
                o.act(u, be)))),
    ("action-assoc", ("delta", "ualg", "ualg"),
     lambda o, u, al, be: o.deq(o.act(o.act(u, al), be), o.act(u, o.ualmul(al, be)))),
    ("action-unit", ("delta",),
     lambda o, u: o.deq(o.act(u, o.ual_one_like(u)), u)),
    ("action-zero", ("delta",),
     lambda o, u: o.dis0(o.act(u, o.ual_zero_like(u)))),
    ("tau-split", ("delta",),
     lambda o, u: o.deq(o.dadd(u, o.act(u, o.ual_neg_one_like(u))),
                        o.phi(o.rho(u)))),
    ("aug-phi-member", ("alg",),
     lambda o, a: o.daug(o.phi(a))),
    ("aug-phi-scale", ("scalar", "alg"),
     lambda o, k, a: o.deq(o.phi(o.akmul(k, a)), o.kact(k, o.phi(a)))),
    ("aug-pi-zero", ("aug",),
     lambda o, v: o.ais0(o.pi(v))),
    ("aug-scalar-action", ("aug", "scalar"),
     lambda o, v, k: o.deq(o.act(v, o.scalar_ual(k)), o.kact(o.kmul(k, k), v))),
    ("aug-rho-scale", ("scalar", "aug"),
     lambda o, k, v: o.aeq(o.rho(o.kact(k, v)), o.akmul(k, o.rho(v)))),
    ("aug-action-scale", ("scalar", "aug", "ualg"),
     lambda o, k, v, al: o.both(
         o.daug(o.act(v, al)),
         o.deq(o.act(o.kact(k, v), al), o.kact(k, o.act(v, al))))),
)


def slot_sizes(shape, kind):
    card = shape.alg.K.card
    if kind == "delta":
        return [card] * shape.dim
    if kind == "alg":
        return [card] * len(shape.alg.pairs)
    if kind == "ualg":
        return [card] * (len(shape.alg.pairs) + 1)
    if kind == "scalar":
        return [card]
    if kind == "aug":
        return [card] * len(shape.d_keys)
    if kind == "herm":
        return [s[3] for s in herm_slots(shape.alg)]
    raise StructureError("unknown factor kind %r" % kind)


class DictOps:
    """Exact per-element evaluation of the axiom table."""

    vectorized = False

    def __init__(self, shape):
        self.shape = shape
        self.alg = shape.alg
        self.K = shape.alg.K
        self.klist = list(self.K.elements())
        self.tors = _torsion_list(self.K)
        self.hslots = herm_slots(self.alg)

    # factor materializers (one tuple row of slot indices)
    def materialize(self, kind, row):
        K, alg = self.K, self.alg
        if kind == "delta":
            return from_coords(self.shape, [self.klist[t] for t in row])
        if kind == "alg":
            return alg.from_coords([self.klist[t] for t in row])
        if kind == "ualg":
            return UnitalEl(alg.from_coords([self.klist[t] for t in row[:-1]]),
                            self.klist[row[-1]])
        if kind == "scalar":
            return self.klist[row[0]]
        if kind == "aug":
            return self.shape.el(d=dict(zip(self.shape.d_keys,
                                            (self.klist[t] for t in row))))
        if kind == "herm":
            coeffs = {}
            for (stype, i, j, _), t in zip(self.hslots, row):
                v = self.tors[t] if stype == "tors" else self.klist[t]
                if K.is_zero(v):
                    continue
                coeffs[(i, j)] = K.add(coeffs.get((i, j), K.zero()), v)
                if stype == "rep":
                    w = v if alg.eps(i) * alg.eps(j) > 0 else K.neg(v)
                    slot = (-j, -i)
                    coeffs[slot] = K.add(coeffs.get(slot, K.zero()), w)
            return alg.el(coeffs)
        raise StructureError("unknown factor kind %r" % kind)

    # delta ops
    def dadd(self, u, v):
        return delta_add(u, v)

    def dneg(self, u):
        return delta_neg(u)

    def dzero_like(self, u):
        return self.shape.zero()

    def deq(self, u, v):
        return u == v

    def dis0(self, u):
        return not u

    def daug(self, u):
        return aug_member(u)

    def phi(self, a):
        return phi(self.shape, a)

    def pi(self, u):
        return pi(u)

    def rho(self, u):
        return rho(u)

    def act(self, u, al):
        return act_unital(u, al)

    def kact(self, k, v):
        return act_scalar(k, v)

    def both(self, a, b):
        return a and b

    # algebra ops
    def aadd(self, a, b):
        return self.alg.add(a, b)

    def asub(self, a, b):
        return self.alg.sub(a, b)

    def aneg(self, a):
        return self.alg.neg(a)

    def abar(self, a):
        return self.alg.conj(a)

    def amul(self, a, b):
        return self.alg.mul(a, b)

    def akmul(self, k, a):
        return self.alg.kmul(k, a)

    def aeq(self, a, b):
        return a == b

    def ais0(self, a):
        return not a

    # unitalized ops
    def ual_add(self, al, be):
        return UnitalEl(self.alg.add(al.body, be.body), self.K.add(al.scalar, be.scalar))

    def ualmul(self, al, be):
        return unital_mul(al, be)

    def scalar_ual(self, k):
        return UnitalEl(self.alg.zero(), k)

    def ual_one_like(self, u):
        return UnitalEl(self.alg.zero(), self.K.one())

    def ual_zero_like(self, u):
        return UnitalEl(self.alg.zero(), self.K.zero())

    def ual_neg_one_like(self, u):
        return UnitalEl(self.alg.zero(), self.K.neg(self.K.one()))

    def mul_right_ual(self, x, al):
        return self.alg.add(self.alg.mul(x, al.body), self.alg.kmul(al.scalar, x))

    def sandwich(self, al, x):
        left = self.alg.mul(self.alg.conj(al.body), x)
        k = al.scalar
        return self.alg.add(
            self.alg.add(self.alg.mul(left, al.body), self.alg.kmul(k, left)),
            self.alg.add(self.alg.kmul(k, self.alg.mul(x, al.body)),
                         self.alg.kmul(self.K.mul(k, k), x)))

    def twosided(self, be, al, x):
        bb, l = self.alg.conj(be.body), be.scalar
        a, k = al.body, al.scalar
        left = self.alg.add(self.alg.mul(bb, x), self.alg.kmul(l, x))
        return self.alg.add(self.alg.mul(left, a), self.alg.kmul(k, left))

    def kmul(self, k, kp):
        return self.K.mul(k, kp)

    def evaluate(self, kinds, fn, idxmat):
        cols = []
        off = 0
        for kind in kinds:
            w = len(slot_sizes(self.shape, kind))
            cols.append((kind, off, off + w))
            off += w
        for rownum in range(idxmat.shape[0]):
            row = idxmat[rownum]
            facs = [self.materialize(kind, [int(t) for t in row[a:b]])
                    for kind, a, b in cols]
            if not fn(self, *facs):
                return False, rownum
        return True, None


def _mixed_radix(sizes, total):
    idx = np.empty((total, len(sizes)), dtype=np.int64)
    stride = total
    base = np.arange(total, dtype=np.int64)
    for t, s in enumerate(sizes):
        stride //= s
        idx[:, t] = (base // stride) % s
    return idx


def axioms_check(shape, strategy="exhaustive", count=10000, seed=None):
    """Run the axiom table; report per-axiom mode, counts, and witnesses."""
    if strategy not in ("exhaustive", "sampled"):
        raise StructureError("unknown strategy %r" % strategy)
    if strategy == "exhaustive" and shape.card() > EXH_DELTA_CAP:
        raise CapacityError(
            "exhaustive strategy needs |Delta| <= %d, got %d"
            % (EXH_DELTA_CAP, shape.card()))
    uniform = shape.alg.K.uniform_modulus() is not None
    if uniform:
        from .batch_delta import BatchOps

        ops = BatchOps(shape)
        tuple_cap = _EXH_TUPLE_CAP
    else:
        ops = DictOps(shape)
        tuple_cap = _DICT_TUPLE_CAP
    decoder = DictOps(shape)
    rows = []
    allpass = True
    for axnum, (name, kinds, fn) in enumerate(AXIOMS):
        sizes = []
        for kind in kinds:
            sizes.extend(slot_sizes(shape, kind))
        total = math.prod(sizes) if sizes else 1
        exhaust = strategy == "exhaustive" and total <= tuple_cap
        if exhaust:
            idxmat = _mixed_radix(sizes, total)
            mode, n = "exhaustive", total
        else:
            if seed is None:
                raise StructureError("sampled evaluation of %s requires a seed" % name)
            rng = np.random.default_rng([seed, axnum])
            if sizes:
                idxmat = np.stack(
                    [rng.integers(s, size=count) for s in sizes], axis=1)
            else:
                idxmat = np.zeros((1, 0), dtype=np.int64)
            mode, n = "sampled", idxmat.shape[0]
        ok, failrow = ops.evaluate(kinds, fn, idxmat)
        entry = {"axiom": name, "mode": mode, "tuples": int(n), "pass": bool(ok)}
        if not ok:
            allpass = False
            row = idxmat[failrow]
            off = 0
            witness = []
            for kind in kinds:
                w = len(slot_sizes(shape, kind))
                witness.append(repr(decoder.materialize(
                    kind, [int(t) for t in row[off:off + w]])))
                off += w
            entry["witness"] = witness
        rows.append(entry)
    return {
        "shape": shape.tag,
        "strategy": strategy,
        "dim": shape.dim,
        "card": shape.card(),
        "axioms": rows,
        "pass": allpass,
    }
