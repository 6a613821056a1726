"""2-step nilpotent modules over finite commutative rings.

A module here is a central extension of a free coordinate module M1 by a
free coordinate module M0 along a bilinear cocycle, optionally divided by
a finite invariant subgroup.  The group law is

    (m1 |+ m0) |+ (m1' |+ m0') = (m1 + m1') |+ (m0 + b(m1, m1') + m0'),

the scalar monoid acts by (m1 |+ m0) . k = (k m1 |+ k^2 m0), and
tau(m1 |+ m0) = 2 m0 - b(m1, m1) lands in M0.  On top of the group
structure the module supports scalar extension along a ring map (with the
quotient pushed forward through the closure of its generator images) and
descent along a small registry of free quadratic ring extensions, where
the descended module is the equalizer of the two coordinate maps into the
tensor square, twisted by a cocycle-checked isomorphism.
"""

import itertools
import random

from .coeff_ring import (
    CapacityError,
    PolyQuotient,
    RingHom,
    StructureError,
    TensorTower,
    ZMod,
    hom_from_gen,
    ring_from_json,
    ring_to_json,
)
from .linalg import k_mat_inv, k_mat_vec
from . import odd_form_param as ofp
from .form_ring import UnitalEl

_AMBIENT_CAP = 1 << 16
_CLOSURE_CAP = 1 << 12
_MOR_EXH_CAP = 1 << 7
_MOR_SAMPLES = 300
_MOR_SEED = 1721


def _vzero(K, n):
    return (K.zero(),) * n


def _vadd(K, u, v):
    return tuple(K.add(a, b) for a, b in zip(u, v))


def _vsub(K, u, v):
    return tuple(K.sub(a, b) for a, b in zip(u, v))


def _vneg(K, u):
    return tuple(K.neg(a) for a in u)


def _vscale(K, c, u):
    return tuple(K.mul(c, a) for a in u)


class Nil2Elem(tuple):
    """Element (m1, m0): a pair of coordinate vectors, lex-comparable."""

    __slots__ = ()

    def __new__(cls, m1, m0):
        return tuple.__new__(cls, (tuple(m1), tuple(m0)))

    @property
    def m1(self):
        return self[0]

    @property
    def m0(self):
        return self[1]

    def __repr__(self):
        return "Nil2Elem(%r, %r)" % (self[0], self[1])


class Nil2Module:
    """Split central extension with an optional invariant-subgroup quotient.

    ``b`` is the cocycle value table on basis pairs: b[i][j] is a vector
    of length r0.  ``quotient`` lists ambient elements whose closure under
    |+, the group inverse, and every scalar action is divided out; the
    closure must be normal and must meet M0 in a scalar-stable submodule,
    otherwise the quotient carries no module structure and we refuse it.
    Elements are always handled through their lex-least coset member.
    """

    def __init__(self, K, r1, r0, b=None, quotient=None, check=True):
        if r1 < 0 or r0 < 0:
            raise StructureError("negative rank")
        self.K = K
        self.r1 = r1
        self.r0 = r0
        if b is None:
            b = [[_vzero(K, r0)] * r1 for _ in range(r1)]
        if len(b) != r1 or any(len(row) != r1 for row in b):
            raise StructureError("cocycle table must be %d x %d" % (r1, r1))
        bt = []
        for row in b:
            brow = []
            for val in row:
                val = tuple(val)
                if len(val) != r0:
                    raise StructureError("cocycle value has wrong length")
                for c in val:
                    K.check_element(c)
                brow.append(val)
            bt.append(tuple(brow))
        self.b = tuple(bt)
        self.ambient_card = K.card ** (r1 + r0)
        self.gens = tuple(Nil2Elem(g[0], g[1]) for g in (quotient or ()))
        for g in self.gens:
            self._check_elem_coords(g)
        if self.gens:
            self.X = invariant_closure(self, self.gens)
            if check:
                self._check_quotient()
        else:
            self.X = frozenset((self._rzero(),))
        self.card = self.ambient_card // len(self.X)
        self._elems = None
        self._m0_elems = None
        self._corr = {}

    # ---- raw (ambient) operations ------------------------------------

    def _check_elem_coords(self, x):
        if len(x.m1) != self.r1 or len(x.m0) != self.r0:
            raise StructureError("element shape mismatch")
        for c in x.m1 + x.m0:
            self.K.check_element(c)

    def _bval(self, u, v):
        K = self.K
        out = _vzero(K, self.r0)
        for i in range(self.r1):
            if not any(u[i]):
                continue
            for j in range(self.r1):
                if not any(v[j]):
                    continue
                out = _vadd(K, out, _vscale(K, K.mul(u[i], v[j]), self.b[i][j]))
        return out

    def _rzero(self):
        return Nil2Elem(_vzero(self.K, self.r1), _vzero(self.K, self.r0))

    def _radd(self, x, y):
        K = self.K
        m0 = _vadd(K, _vadd(K, x.m0, self._bval(x.m1, y.m1)), y.m0)
        return Nil2Elem(_vadd(K, x.m1, y.m1), m0)

    def _rneg(self, x):
        K = self.K
        return Nil2Elem(_vneg(K, x.m1), _vsub(K, self._bval(x.m1, x.m1), x.m0))

    def _ract(self, x, k):
        K = self.K
        return Nil2Elem(_vscale(K, k, x.m1), _vscale(K, K.mul(k, k), x.m0))

    def _rtau(self, x):
        K = self.K
        m0 = _vsub(K, _vadd(K, x.m0, x.m0), self._bval(x.m1, x.m1))
        return Nil2Elem(_vzero(K, self.r1), m0)

    def _check_quotient(self):
        K = self.K
        zero1 = _vzero(K, self.r1)
        for a in self.X:
            for i in range(self.r1):
                e = tuple(K.one() if t == i else K.zero() for t in range(self.r1))
                comm = _vsub(K, self._bval(e, a.m1), self._bval(a.m1, e))
                if Nil2Elem(zero1, comm) not in self.X:
                    raise StructureError("quotient subgroup is not normal")
            if not any(any(c) for c in a.m1):
                for k in self.K.elements():
                    if Nil2Elem(zero1, _vscale(K, k, a.m0)) not in self.X:
                        raise StructureError(
                            "quotient meets M0 in a non-submodule")

    # ---- coset normal forms and public operations --------------------

    def reduce(self, x):
        if len(self.X) == 1:
            return x
        return min(self._radd(x, a) for a in self.X)

    def zero(self):
        return self.reduce(self._rzero())

    def elem(self, m1, m0):
        x = Nil2Elem(m1, m0)
        self._check_elem_coords(x)
        return self.reduce(x)

    def add(self, x, y):
        return self.reduce(self._radd(x, y))

    def neg(self, x):
        return self.reduce(self._rneg(x))

    def act(self, x, k):
        return self.reduce(self._ract(x, k))

    def tau(self, x):
        return self.reduce(self._rtau(x))

    def comm(self, x, y):
        return self.add(self.add(self.add(x, y), self.neg(x)), self.neg(y))

    def in_m0(self, x):
        return not any(any(c) for c in x.m1)

    def m0_scale(self, k, x):
        if not self.in_m0(x):
            raise StructureError("left scaling is only defined on M0")
        return self.reduce(Nil2Elem(x.m1, _vscale(self.K, k, x.m0)))

    def elements(self):
        if self._elems is None:
            if self.ambient_card > _AMBIENT_CAP:
                raise CapacityError(
                    "module enumeration over %d ambient elements"
                    % self.ambient_card)
            kel = list(self.K.elements())
            seen = set()
            for coords in itertools.product(kel, repeat=self.r1 + self.r0):
                x = Nil2Elem(coords[:self.r1], coords[self.r1:])
                seen.add(self.reduce(x))
            self._elems = sorted(seen)
            if len(self._elems) != self.card:
                raise StructureError("coset count does not match the index")
        return self._elems

    def m0_elements(self):
        if self._m0_elems is None:
            kel = list(self.K.elements())
            seen = set()
            for coords in itertools.product(kel, repeat=self.r0):
                seen.add(self.reduce(Nil2Elem(_vzero(self.K, self.r1), coords)))
            self._m0_elems = sorted(seen)
        return self._m0_elems

    def basis_lift(self, i):
        """The M1 basis vector e_i with zero M0 part, reduced."""
        e = tuple(self.K.one() if t == i else self.K.zero()
                  for t in range(self.r1))
        return self.reduce(Nil2Elem(e, _vzero(self.K, self.r0)))

    def m0_basis(self, j):
        v = tuple(self.K.one() if t == j else self.K.zero()
                  for t in range(self.r0))
        return self.reduce(Nil2Elem(_vzero(self.K, self.r1), v))

    def lift_m1(self, m1):
        """|+ of e_i . m1_i in order; m0 part is the cocycle correction."""
        acc = self._rzero()
        for i in range(self.r1):
            e = tuple(self.K.one() if t == i else self.K.zero()
                      for t in range(self.r1))
            acc = self._radd(acc, self._ract(Nil2Elem(
                e, _vzero(self.K, self.r0)), m1[i]))
        return acc

    def corr(self, m1):
        v = self._corr.get(m1)
        if v is None:
            v = self.lift_m1(m1).m0
            self._corr[m1] = v
        return v

    def same_presentation(self, other):
        return (self.K.name == other.K.name and self.r1 == other.r1
                and self.r0 == other.r0 and self.b == other.b
                and self.X == other.X)

    def sample(self, rng):
        kel = list(self.K.elements())
        m1 = tuple(rng.choice(kel) for _ in range(self.r1))
        m0 = tuple(rng.choice(kel) for _ in range(self.r0))
        return self.reduce(Nil2Elem(m1, m0))

    def __repr__(self):
        return "<nil2 %s r1=%d r0=%d |X|=%d>" % (
            self.K.name, self.r1, self.r0, len(self.X))


def nil2_add(M, x, y):
    return M.add(x, y)


def nil2_act(M, x, k):
    return M.act(x, k)


def nil2_tau(M, x):
    return M.tau(x)


def invariant_closure(M, generators):
    """Least subset containing the generators that is closed under |+,
    the group inverse, and the scalar action, as a frozenset of ambient
    elements.  Fixed-point iteration; everything here is small."""
    kel = list(M.K.elements())
    X = {M._rzero()}
    for g in generators:
        X.add(Nil2Elem(g[0], g[1]))
    while True:
        new = set()
        cur = list(X)
        for x in cur:
            y = M._rneg(x)
            if y not in X:
                new.add(y)
            for k in kel:
                y = M._ract(x, k)
                if y not in X:
                    new.add(y)
        for x in cur:
            for y in cur:
                z = M._radd(x, y)
                if z not in X:
                    new.add(z)
        if not new:
            return frozenset(X)
        X |= new
        if len(X) > _CLOSURE_CAP:
            raise CapacityError("invariant closure beyond %d elements"
                                % _CLOSURE_CAP)


# ---- axioms ----------------------------------------------------------

NIL2_AXIOMS = (
    ("add-assoc", "eee",
     lambda M, x, y, z: M.add(M.add(x, y), z) == M.add(x, M.add(y, z))),
    ("add-zero", "e",
     lambda M, x: M.add(x, M.zero()) == x),
    ("add-neg", "e",
     lambda M, x: M.add(x, M.neg(x)) == M.zero()),
    ("act-one", "e",
     lambda M, x: M.act(x, M.K.one()) == x),
    ("act-endo", "eek",
     lambda M, x, y, k: M.act(M.add(x, y), k) == M.add(M.act(x, k),
                                                       M.act(y, k))),
    ("act-mul", "ekk",
     lambda M, x, k, l: M.act(M.act(x, k), l) == M.act(x, M.K.mul(k, l))),
    ("comm-in-m0", "ee",
     lambda M, x, y: M.in_m0(M.comm(x, y))),
    ("m0-central", "em",
     lambda M, x, d: M.comm(x, d) == M.zero()),
    ("comm-act", "eekk",
     lambda M, x, y, k, l: M.comm(M.act(x, k), M.act(y, l))
     == M.m0_scale(M.K.mul(k, l), M.comm(x, y))),
    ("act-add-scalar", "ekk",
     lambda M, x, k, l: M.act(x, M.K.add(k, l))
     == M.add(M.add(M.act(x, k), M.m0_scale(M.K.mul(k, l), M.tau(x))),
              M.act(x, l))),
    ("m0-act-square", "mk",
     lambda M, d, k: M.act(d, k) == M.m0_scale(M.K.mul(k, k), d)),
    ("tau-in-m0", "e",
     lambda M, x: M.in_m0(M.tau(x))),
    ("tau-double", "m",
     lambda M, d: M.tau(d) == M.add(d, d)),
    ("tau-neg-act", "e",
     lambda M, x: M.tau(x) == M.add(x, M.act(x, M.K.neg(M.K.one())))),
    ("tau-add", "ee",
     lambda M, x, y: M.tau(M.add(x, y))
     == M.add(M.add(M.tau(x), M.comm(x, y)), M.tau(y))),
    ("tau-act", "ek",
     lambda M, x, k: M.tau(M.act(x, k))
     == M.m0_scale(M.K.mul(k, k), M.tau(x))),
)


def nil2_axioms_check(M, count=2000, seed=0, exh_cap=4096):
    """Verify the defining identities; exhaustive per axiom while the
    argument grid fits under exh_cap, seeded sampling beyond."""
    pools = {"e": M.elements(), "m": M.m0_elements(),
             "k": list(M.K.elements())}
    rng = random.Random(seed)
    report = {}
    for name, sig, pred in NIL2_AXIOMS:
        grids = [pools[c] for c in sig]
        total = 1
        for g in grids:
            total *= len(g)
        ok = True
        if total <= exh_cap:
            for args in itertools.product(*grids):
                if not pred(M, *args):
                    ok = False
                    break
        else:
            for _ in range(count):
                args = [rng.choice(g) for g in grids]
                if not pred(M, *args):
                    ok = False
                    break
        report[name] = ok
    report["pass"] = all(report.values())
    return report


# ---- scalar extension ------------------------------------------------

def _map_coords(x, f):
    return Nil2Elem(tuple(f(c) for c in x.m1), tuple(f(c) for c in x.m0))


def boxtimes(M, f):
    """Scalar extension along the ring map f: K -> E.

    The split part keeps the ranks and pushes the cocycle table through
    f; the quotient part is the closure of the images of the quotient
    generators.  Returns (N, embed) where embed sends x to x boxtimes 1.
    """
    if f.dom != M.K:
        raise StructureError("scalar extension needs a map out of the base")
    E = f.cod
    b2 = [[tuple(f(c) for c in M.b[i][j]) for j in range(M.r1)]
          for i in range(M.r1)]
    gens2 = [_map_coords(g, f) for g in M.gens]
    N = Nil2Module(E, M.r1, M.r0, b2, quotient=gens2)

    def embed(x):
        return N.reduce(_map_coords(x, f))

    return N, embed


def universality_probe(M, f):
    """Kernel of E tensor M0 -> M boxtimes E on coordinates; a vector is
    in the kernel when its M0 element dies against the extended quotient."""
    N, _ = boxtimes(M, f)
    E = f.cod
    if E.card ** M.r0 > _AMBIENT_CAP:
        raise CapacityError("M0 extension too large to scan")
    zero1 = _vzero(E, M.r1)
    kernel = []
    for v in itertools.product(list(E.elements()), repeat=M.r0):
        if N.reduce(Nil2Elem(zero1, v)) == N.zero():
            kernel.append(v)
    kernel.sort()
    witness = next((v for v in kernel if any(any(c) for c in v)), None)
    return {
        "injective": witness is None,
        "kernel_card": len(kernel),
        "witness": None if witness is None else [list(c) for c in witness],
    }


def counterexample_sqrt2(m):
    """Finite surrogate of the quotient module over Z[sqrt 2] whose M0
    collapses after base change to GF(2).

    Works over K = (Z/m)[s]/(s^2 - 2) with the split module K |+ K,
    b(x, y) = xy, divided by the closure of s |+ 1.  The base change
    sends s to 0, which needs m even.  The report states whether the
    image of GF(2) tensor M0 inside the extension is zero; the verdict
    is computed from the closure, not assumed.
    """
    if m < 2 or m % 2:
        raise StructureError("modulus must be an even integer >= 2")
    base = ZMod(m)
    K = PolyQuotient(base, [((m - 2) % m,), (0,), (1,)])
    gen = Nil2Elem((K.gen(),), (K.one(),))
    M = Nil2Module(K, 1, 1, [[(K.one(),)]], quotient=[gen])
    F2 = ZMod(2)
    to_f2 = hom_from_gen(K, F2, RingHom(base, F2, [F2.one()], name="red2"),
                         F2.zero(), name="sqrt2->0")
    N, _ = boxtimes(M, to_f2)
    zero1 = _vzero(F2, 1)
    image = sorted({N.reduce(Nil2Elem(zero1, (v,)))
                    for v in F2.elements()})
    probe = universality_probe(M, to_f2)
    return {
        "modulus": m,
        "base_ring": K.name,
        "generator": nil2_elem_to_json(gen),
        "x_card": len(M.X),
        "module_card": M.card,
        "ext_x_card": len(N.X),
        "ext_card": N.card,
        "m0_image": [nil2_elem_to_json(x) for x in image],
        "m0_image_card": len(image),
        "m0_image_zero": image == [N.zero()],
        "probe": probe,
    }


# ---- morphisms -------------------------------------------------------

class Nil2Morphism:
    """Map between modules over the same ring, stored as the images of
    the M1 basis lifts plus a matrix on M0 coordinates.

    A general element factors as lift(m1) |+ (0, m0 - correction), so
    those images determine the map.  Validation checks additivity and
    action compatibility on the actual coset representatives (exhaustive
    for small modules, seeded sampling otherwise), that the domain
    quotient maps into the codomain quotient, and for isomorphisms that
    both coordinate matrices invert.
    """

    def __init__(self, dom, cod, gen_images, m0_matrix, check=True,
                 require_iso=True):
        if dom.K != cod.K:
            raise StructureError("morphism needs a common coefficient ring")
        if len(gen_images) != dom.r1:
            raise StructureError("need one image per M1 basis vector")
        if len(m0_matrix) != cod.r0 or any(len(r) != dom.r0
                                           for r in m0_matrix):
            raise StructureError("M0 matrix must be %d x %d"
                                 % (cod.r0, dom.r0))
        self.dom = dom
        self.cod = cod
        self.gen_images = [Nil2Elem(u[0], u[1]) for u in gen_images]
        self.m0_matrix = tuple(tuple(row) for row in m0_matrix)
        if check:
            self._validate(require_iso)

    def __call__(self, x):
        dom, cod, K = self.dom, self.cod, self.dom.K
        acc = cod._rzero()
        for i in range(dom.r1):
            acc = cod._radd(acc, cod._ract(self.gen_images[i], x.m1[i]))
        resid = _vsub(K, x.m0, dom.corr(x.m1))
        if cod.r0:
            v = k_mat_vec(K, self.m0_matrix, list(resid)) if dom.r0 else \
                _vzero(K, cod.r0)
            acc = cod._radd(acc, Nil2Elem(_vzero(K, cod.r1), tuple(v)))
        return cod.reduce(acc)

    def _validate(self, require_iso):
        dom, cod = self.dom, self.cod
        for a in dom.X:
            if self(Nil2Elem(a[0], a[1])) != cod.zero():
                raise StructureError("map does not kill the quotient")
        small = dom.card <= _MOR_EXH_CAP
        kel = list(dom.K.elements())
        if small:
            elems = dom.elements()
            pairs = itertools.product(elems, elems)
            acts = itertools.product(elems, kel)
        else:
            rng = random.Random(_MOR_SEED)
            pairs = [(dom.sample(rng), dom.sample(rng))
                     for _ in range(_MOR_SAMPLES)]
            acts = [(dom.sample(rng), rng.choice(kel))
                    for _ in range(_MOR_SAMPLES)]
        for x, y in pairs:
            if self(dom.add(x, y)) != cod.add(self(x), self(y)):
                raise StructureError("map is not additive")
        for x, k in acts:
            if self(dom.act(x, k)) != cod.act(self(x), k):
                raise StructureError("map does not respect the action")
        if require_iso:
            if dom.r1 != cod.r1 or dom.r0 != cod.r0:
                raise StructureError("isomorphism needs matching ranks")
            c_mat = tuple(tuple(self.gen_images[i].m1[j]
                                for i in range(dom.r1))
                          for j in range(dom.r1))
            if dom.r1 and k_mat_inv(dom.K, c_mat) is None:
                raise StructureError("M1 coordinate matrix is singular")
            if dom.r0 and k_mat_inv(dom.K, self.m0_matrix) is None:
                raise StructureError("M0 coordinate matrix is singular")


def identity_morphism(M):
    return Nil2Morphism(
        M, M, [M.basis_lift(i) for i in range(M.r1)],
        [[M.K.one() if i == j else M.K.zero() for j in range(M.r0)]
         for i in range(M.r0)], check=False)


def _transport(psi, rhom, dom2, cod2, check=False):
    """Extend a morphism along a ring map: coordinates of the generator
    images and of the M0 matrix are pushed through the map."""
    gens2 = [_map_coords(u, rhom) for u in psi.gen_images]
    a2 = [[rhom(a) for a in row] for row in psi.m0_matrix]
    return Nil2Morphism(dom2, cod2, gens2, a2, check=check)


# ---- descent ---------------------------------------------------------

_DESCENT_REGISTRY = {
    ("zmod:2", ((1,), (1,), (1,))),
    ("zmod:3", ((1,), (0,), (1,))),
    ("zmod:4", ((1,), (1,), (1,))),
}
_TOWER_CACHE = {}


def registered_tower(E):
    """Tensor tower for one of the registered free quadratic extensions.
    Anything else (products included) is refused; the registry is what
    keeps the faithfully-flat hypothesis honest."""
    if not isinstance(E, PolyQuotient):
        raise StructureError("descent extension must be a free quotient ring")
    key = (E.base.name, E.mcoeffs)
    if key not in _DESCENT_REGISTRY:
        raise StructureError("extension %s is not registered for descent"
                             % E.name)
    if E.name not in _TOWER_CACHE:
        _TOWER_CACHE[E.name] = TensorTower(E)
    return _TOWER_CACHE[E.name]


def base_inclusion(E):
    from .coeff_ring import const_hom
    return const_hom(E)


def _const_preimage(E, c):
    """Pull a codomain element of the base inclusion back, or None."""
    r = E.base.rank
    if any(c[r:]):
        return None
    return c[:r]


class DescentDatum:
    """Module over a registered extension E plus a cocycle-checked
    isomorphism between its two extensions to E tensor E."""

    def __init__(self, N, psi=None):
        self.N = N
        self.tower = registered_tower(N.K)
        tw = self.tower
        self.N1, self._emb1 = boxtimes(N, tw.i1)
        self.N2, self._emb2 = boxtimes(N, tw.i2)
        if psi is None:
            if not self.N1.same_presentation(self.N2):
                raise StructureError(
                    "canonical datum needs matching coordinate extensions")
            psi = identity_morphism(self.N1)
            psi = Nil2Morphism(self.N1, self.N2, psi.gen_images,
                               psi.m0_matrix, check=False)
        if psi.dom is not self.N1 and not psi.dom.same_presentation(self.N1):
            raise StructureError("datum isomorphism has the wrong domain")
        if psi.cod is not self.N2 and not psi.cod.same_presentation(self.N2):
            raise StructureError("datum isomorphism has the wrong codomain")
        self.psi = psi
        self._check_cocycle()

    def _check_cocycle(self):
        tw = self.tower
        j1, j2, j3 = tw.face_maps()
        NJ1, _ = boxtimes(self.N, j1)
        NJ2, _ = boxtimes(self.N, j2)
        NJ3, _ = boxtimes(self.N, j3)
        p12 = _transport(self.psi, tw.i12, NJ1, NJ2)
        p23 = _transport(self.psi, tw.i23, NJ2, NJ3)
        p13 = _transport(self.psi, tw.i13, NJ1, NJ3)
        # two morphisms agreeing on module generators agree everywhere,
        # since both respect the action and the group law; the seeded
        # sample is a cheap cross-check on the transported maps
        gens = [NJ1.basis_lift(i) for i in range(NJ1.r1)]
        gens += [NJ1.m0_basis(j) for j in range(NJ1.r0)]
        rng = random.Random(_MOR_SEED)
        gens += [NJ1.sample(rng) for _ in range(50)]
        for x in gens:
            lhs = p23(p12(x))
            rhs = p13(x)
            if lhs != rhs:
                err = StructureError(
                    "descent cocycle fails at %r: %r != %r" % (x, lhs, rhs))
                err.witness = (x, lhs, rhs)
                raise err


def descend(D):
    """Equalizer of psi . i1 and i2 on the datum module, returned as a
    module over the base through coordinate pullback.

    This covers data whose coordinates come from the base (in particular
    every canonical datum); an equalizer that does not align with the
    pulled-back presentation is reported as an error instead of being
    silently re-coordinatized.
    """
    tw = D.tower
    E = D.N.K
    K = E.base
    eq = []
    for n in D.N.elements():
        if D.psi(D.N1.reduce(_map_coords(n, tw.i1))) == \
                D.N2.reduce(_map_coords(n, tw.i2)):
            eq.append(n)

    def pull(c):
        v = _const_preimage(E, c)
        if v is None:
            raise StructureError(
                "descended presentation is not defined over the base")
        return v

    b0 = [[tuple(pull(c) for c in D.N.b[i][j]) for j in range(D.N.r1)]
          for i in range(D.N.r1)]
    gens0 = [Nil2Elem(tuple(pull(c) for c in g.m1),
                      tuple(pull(c) for c in g.m0)) for g in D.N.gens]
    M = Nil2Module(K, D.N.r1, D.N.r0, b0, quotient=gens0)
    inc = base_inclusion(E)
    image = {D.N.reduce(_map_coords(x, inc)) for x in M.elements()}
    if image != set(eq):
        raise StructureError("descent equalizer does not match the base form")
    return M


def descent_roundtrip(M, E):
    """Extend M along the base inclusion of a registered E, descend the
    canonical datum, and compare with the original presentation."""
    tw = registered_tower(E)
    if E.base != M.K:
        raise StructureError("extension base does not match the module ring")
    inc = base_inclusion(E)
    N, embed = boxtimes(M, inc)
    D = DescentDatum(N)
    M2 = descend(D)
    match = M2.same_presentation(M)
    return {
        "base": M.K.name,
        "ext": E.name,
        "module_card": M.card,
        "ext_card": N.card,
        "descended_card": M2.card,
        "presentation_match": match,
        "iso": match and M2.card == M.card,
    }


# ---- bridge to odd form parameters -----------------------------------

def delta_bridge_check(shape, count=400, seed=0):
    """The odd form parameter of a classical algebra, with its scalar
    action and tau = phi . rho, satisfies the 2-step module identities.
    Sampled pairs; the augmentation part plays the role of M0."""
    alg = shape.alg
    K = alg.K
    rng = random.Random(seed)
    kel = list(K.elements())

    def scal(u, k):
        return ofp.act_unital(u, UnitalEl(alg.zero(), k))

    def dcomm(u, v):
        return ofp.delta_add(ofp.delta_add(ofp.delta_add(u, v),
                                           ofp.delta_neg(u)),
                             ofp.delta_neg(v))

    zero = shape.zero()
    checks = {name: True for name in (
        "comm-in-aug", "aug-central", "comm-act", "act-add-scalar",
        "aug-act-square", "tau-is-neg-act", "tau-double", "tau-add")}
    for _ in range(count):
        u = ofp.sample_elem(shape, rng)
        v = ofp.sample_elem(shape, rng)
        k = rng.choice(kel)
        l = rng.choice(kel)
        d = ofp.phi(shape, alg.sample(rng))
        c = dcomm(u, v)
        if not ofp.aug_member(c):
            checks["comm-in-aug"] = False
        if dcomm(u, d) != zero:
            checks["aug-central"] = False
        if dcomm(scal(u, k), scal(v, l)) != ofp.act_scalar(K.mul(k, l), c):
            checks["comm-act"] = False
        mid = ofp.act_scalar(K.mul(k, l), ofp.tau(u))
        rhs = ofp.delta_add(ofp.delta_add(scal(u, k), mid), scal(u, l))
        if scal(u, K.add(k, l)) != rhs:
            checks["act-add-scalar"] = False
        if scal(d, k) != ofp.act_scalar(K.mul(k, k), d):
            checks["aug-act-square"] = False
        if ofp.tau(u) != ofp.delta_add(u, scal(u, K.neg(K.one()))):
            checks["tau-is-neg-act"] = False
        if ofp.tau(d) != ofp.delta_add(d, d):
            checks["tau-double"] = False
        lhs = ofp.tau(ofp.delta_add(u, v))
        if lhs != ofp.delta_add(ofp.delta_add(ofp.tau(u), dcomm(u, v)),
                                ofp.tau(v)):
            checks["tau-add"] = False
    checks["pass"] = all(checks.values())
    return checks


# ---- serialization ---------------------------------------------------

def nil2_elem_to_json(x):
    return {"m1": [list(c) for c in x.m1], "m0": [list(c) for c in x.m0]}


def nil2_elem_from_json(data):
    return Nil2Elem(tuple(tuple(c) for c in data["m1"]),
                    tuple(tuple(c) for c in data["m0"]))


def nil2_to_json(M):
    return {
        "ring": ring_to_json(M.K),
        "r1": M.r1,
        "r0": M.r0,
        "b": [[[list(c) for c in M.b[i][j]] for j in range(M.r1)]
              for i in range(M.r1)],
        "quotient_generators": [nil2_elem_to_json(g) for g in M.gens],
    }


def nil2_from_json(data):
    K = ring_from_json(data["ring"])
    b = [[tuple(tuple(c) for c in val) for val in row] for row in data["b"]]
    gens = [nil2_elem_from_json(g) for g in data["quotient_generators"]]
    return Nil2Module(K, int(data["r1"]), int(data["r0"]), b, quotient=gens)
