import random

import numpy as np
import pytest

from ofa.coeff_ring import CapacityError, GaloisField, Product, StructureError, ZMod
from ofa.form_ring import UnitalEl, ofalin, ofaorth, ofasymp, x_central
from ofa.odd_form_param import (
    DeltaShape,
    act,
    act_scalar,
    act_unital,
    aug_member,
    axioms_check,
    central_u,
    delta_add,
    delta_from_json,
    delta_neg,
    delta_to_json,
    delta_zero,
    gen_q,
    gen_u,
    gen_v,
    member,
    phi,
    pi,
    rho,
    sample_elem,
    special_check,
    to_pair,
)


def test_dimensions():
    K = ZMod(2)
    assert DeltaShape(ofalin(1, K)).dim == 3
    assert DeltaShape(ofalin(2, K)).dim == 12
    assert DeltaShape(ofasymp(2, K)).dim == 7
    assert DeltaShape(ofasymp(4, K)).dim == 26
    assert DeltaShape(ofaorth(2, K)).dim == 5
    assert DeltaShape(ofaorth(4, K)).dim == 22
    assert DeltaShape(ofaorth(3, K)).dim == 12
    assert DeltaShape(ofaorth(5, K)).dim == 35
    assert DeltaShape(ofaorth(2, K)).card() == 32


def test_generator_pairs():
    K = ZMod(3)
    sh = DeltaShape(ofaorth(3, K))
    alg = sh.alg
    q1 = gen_q(sh, 1)
    assert pi(q1) == alg.e(1, 1) and not rho(q1)
    u1 = gen_u(sh, 1)
    assert pi(u1) == alg.e(0, 1)
    assert rho(u1) == -alg.e(-1, 1)
    sy = DeltaShape(ofasymp(2, K))
    v1 = gen_v(sy, 1)
    assert not pi(v1)
    assert rho(v1) == sy.alg.e(-1, 1)


def test_q_merge_is_free():
    K = ZMod(2)
    sh = DeltaShape(ofaorth(2, K))
    x = sh.el(q={(1, -1): K.one()})
    assert delta_add(x, x) == delta_zero(sh)
    K3 = ZMod(3)
    sh3 = DeltaShape(ofaorth(2, K3))
    y = sh3.el(q={(1, -1): K3.one()})
    assert delta_add(y, y) == sh3.el(q={(1, -1): K3.from_int(2)})


def test_phi_symp_diagonal():
    K = ZMod(3)
    sh = DeltaShape(ofasymp(2, K))
    out = phi(sh, sh.alg.e(-1, 1))
    assert out == sh.el(d={("v", 1): K.from_int(2)})
    assert rho(out) == sh.alg.e(-1, 1, K.from_int(2))


def test_phi_hermitian_vanishes():
    K = ZMod(3)
    sh = DeltaShape(ofaorth(2, K))
    assert phi(sh, sh.alg.e(1, -1)) == delta_zero(sh)
    lin = DeltaShape(ofalin(2, K))
    a = lin.alg.e(1, 2)
    assert rho(phi(lin, a)) == lin.alg.sub(a, lin.alg.conj(a))


def test_neg_roundtrip():
    K = ZMod(4)
    sh = DeltaShape(ofaorth(3, K))
    u1 = gen_u(sh, 1)
    assert delta_add(u1, delta_neg(u1)) == delta_zero(sh)
    assert rho(delta_neg(u1)) == sh.alg.conj(rho(u1))
    rng = random.Random(0)
    for _ in range(25):
        x = sample_elem(sh, rng)
        assert delta_add(x, delta_neg(x)) == delta_zero(sh)


def test_ultrashort_action():
    K = ZMod(3)
    sh = DeltaShape(ofaorth(5, K))
    assert act(gen_u(sh, 1), sh.alg.e(1, 2)) == gen_u(sh, 2)
    # the doubled index: u_0 . e_{0k} lands on u_k scaled by 2
    two = UnitalEl(sh.alg.zero(), K.from_int(2))
    assert act(gen_u(sh, 0), sh.alg.e(0, 2)) == act_unital(gen_u(sh, 2), two)


def test_v_action_signs():
    K = ZMod(3)
    sh = DeltaShape(ofasymp(4, K))
    got = act(gen_v(sh, 1), sh.alg.e(1, -2))
    assert got == act_scalar(K.neg(K.one()), gen_v(sh, -2))


def test_action_by_zero():
    K = ZMod(4)
    sh = DeltaShape(ofaorth(3, K))
    rng = random.Random(1)
    zero = UnitalEl(sh.alg.zero(), K.zero())
    for _ in range(10):
        assert act_unital(sample_elem(sh, rng), zero) == delta_zero(sh)


def test_aug_membership_and_scalar_domain():
    K = ZMod(3)
    sh = DeltaShape(ofaorth(3, K))
    assert not aug_member(gen_u(sh, 0))
    assert aug_member(phi(sh, sh.alg.e(1, -1)))
    with pytest.raises(StructureError):
        act_scalar(K.one(), gen_q(sh, 1))
    sy = DeltaShape(ofasymp(2, K))
    assert aug_member(gen_v(sy, 1))


def test_central_u():
    for K in [ZMod(3), ZMod(4)]:
        sh = DeltaShape(ofaorth(3, K))
        alg = sh.alg
        for k in K.elements():
            uk = central_u(sh, k)
            assert pi(uk) == x_central(alg, k)
            assert rho(uk) == x_central(alg, K.neg(K.mul(k, k)))
            for kp in K.elements():
                lhs = act(uk, x_central(alg, kp))
                assert lhs == central_u(sh, K.smul(2, K.mul(k, kp)))


def test_member_rejects_off_span():
    K = ZMod(3)
    sh = DeltaShape(ofaorth(2, K))
    assert member(sh, sh.alg.zero(), sh.alg.e(-1, 1)) is None
    p, r = to_pair(gen_q(sh, 1))
    assert member(sh, p, r) == gen_q(sh, 1)


def test_special_check():
    assert special_check(DeltaShape(ofalin(1, ZMod(2))))["pass"]
    assert special_check(DeltaShape(ofasymp(2, ZMod(3))))["pass"]
    rep = special_check(DeltaShape(ofaorth(3, ZMod(2))))
    assert rep["pass"] and rep["mode"] == "exhaustive"
    big = special_check(DeltaShape(ofaorth(3, ZMod(4))), count=300, seed=4)
    assert big["pass"] and big["mode"] == "sampled"


def test_axioms_exhaustive_small():
    rep = axioms_check(DeltaShape(ofaorth(2, ZMod(2))), seed=11)
    assert rep["pass"]
    assert all(r["mode"] == "exhaustive" for r in rep["axioms"][:4])


def test_axioms_symp_z3():
    rep = axioms_check(DeltaShape(ofasymp(2, ZMod(3))), seed=12, count=600)
    assert rep["pass"]


def test_axioms_sampled_orth_odd_z4():
    sh = DeltaShape(ofaorth(3, ZMod(4)))
    rep = axioms_check(sh, strategy="sampled", count=400, seed=13)
    assert rep["pass"]
    assert all(r["mode"] == "sampled" for r in rep["axioms"])


def test_axioms_gf4():
    K = GaloisField(2, [1, 1, 1])
    rep = axioms_check(DeltaShape(ofalin(1, K)), seed=14, count=500)
    assert rep["pass"]


def test_axioms_capacity_and_seed_errors():
    sh = DeltaShape(ofaorth(3, ZMod(3)))
    with pytest.raises(CapacityError):
        axioms_check(sh, strategy="exhaustive", seed=1)
    with pytest.raises(StructureError):
        axioms_check(DeltaShape(ofasymp(2, ZMod(3))), strategy="exhaustive")


def test_axioms_dict_engine_nonuniform():
    K = Product([ZMod(2), ZMod(3)])
    sh = DeltaShape(ofasymp(2, K))
    rep = axioms_check(sh, strategy="sampled", count=40, seed=7)
    assert rep["pass"]


def _np_els(ops, els):
    M = np.zeros((len(els), ops.d, ops.d, ops.rk), dtype=np.int64)
    for t, el in enumerate(els):
        for (i, j), v in el.c.items():
            M[t, ops.pos[i], ops.pos[j]] = v
    return M


def test_batch_matches_exact():
    from ofa.batch_delta import BatchOps

    for alg in [ofasymp(2, ZMod(3)), ofaorth(3, ZMod(4)),
                ofalin(2, ZMod(2)), ofaorth(4, GaloisField(2, [1, 1, 1]))]:
        sh = DeltaShape(alg)
        ops = BatchOps(sh)
        rng = random.Random(17)
        us = [sample_elem(sh, rng) for _ in range(40)]
        vs = [sample_elem(sh, rng) for _ in range(40)]
        als = [alg.sample(rng) for _ in range(40)]
        ks = [tuple(rng.randrange(m) for m in alg.K.moduli) for _ in range(40)]
        pairs = [to_pair(x) for x in us]
        U = (_np_els(ops, [p for p, _ in pairs]), _np_els(ops, [r for _, r in pairs]))
        vpairs = [to_pair(x) for x in vs]
        V = (_np_els(ops, [p for p, _ in vpairs]), _np_els(ops, [r for _, r in vpairs]))
        sums = [to_pair(delta_add(u, v)) for u, v in zip(us, vs)]
        S = ops.dadd(U, V)
        assert (S[0] == _np_els(ops, [p for p, _ in sums])).all()
        assert (S[1] == _np_els(ops, [r for _, r in sums])).all()
        A = _np_els(ops, als)
        kv = np.array(ks, dtype=np.int64)
        acted = [to_pair(act_unital(u, UnitalEl(a, k)))
                 for u, a, k in zip(us, als, ks)]
        G = ops.act(U, (A, kv))
        assert (G[0] == _np_els(ops, [p for p, _ in acted])).all()
        assert (G[1] == _np_els(ops, [r for _, r in acted])).all()
        negs = [to_pair(delta_neg(u)) for u in us]
        Ng = ops.dneg(U)
        assert (Ng[0] == _np_els(ops, [p for p, _ in negs])).all()
        assert (Ng[1] == _np_els(ops, [r for _, r in negs])).all()


def test_json_roundtrip():
    K = GaloisField(2, [1, 1, 1])
    sh = DeltaShape(ofaorth(3, K))
    rng = random.Random(3)
    for _ in range(10):
        x = sample_elem(sh, rng)
        assert delta_from_json(sh, delta_to_json(x)) == x
