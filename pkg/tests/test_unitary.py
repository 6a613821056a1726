import json
import random

import pytest

from ofa.coeff_ring import Product, StructureError, ZMod
from ofa.form_ring import ofalin, ofaorth, ofasymp
from ofa.odd_form_param import (
    DeltaShape,
    act,
    act_scalar,
    aug_member,
    delta_add,
    gen_q,
    gen_u,
    gen_v,
    sample_elem,
)
from ofa.unitary import (
    HyperbolicPair,
    act_projective,
    classical_pair,
    conjugate,
    delta0_member,
    det_linear,
    dickson_even,
    dickson_odd,
    dilation,
    dilation0,
    embed_odd,
    enumerate_unitary,
    generate_subgroup,
    group_order,
    gu_member,
    hyperbolic_family_standard,
    hyperbolic_family_validate,
    hyperbolic_pair_check,
    idem_op,
    odd_embed_target,
    pair_sum,
    parabolic_p,
    rep_matrix,
    sigma_linear,
    sl_member,
    so_odd_split,
    transvection_short,
    transvection_ultrashort,
    u_identity,
    u_inv,
    u_is_member,
    u_make,
    u_mul,
    u_try,
    unitary_from_json,
    unitary_to_json,
)

F2 = ZMod(2)
F3 = ZMod(3)
Z4 = ZMod(4)


def sh(mk, r, K):
    return DeltaShape(mk(r, K))


def test_identity_and_membership():
    s = sh(ofasymp, 2, F3)
    e = u_identity(s)
    assert u_is_member(e.beta, e.gamma)
    assert u_try(s, s.alg.zero()).key == e.key


def test_membership_rejects_non_unitary():
    s = sh(ofaorth, 2, F2)
    assert u_try(s, s.alg.e(1, 1)) is None
    with pytest.raises(StructureError):
        u_make(s, s.alg.e(1, 1))


def test_group_laws_exhaustive_symp2():
    s = sh(ofasymp, 2, F3)
    G = enumerate_unitary(s)
    assert len(G) == 24
    e = u_identity(s)
    for g in G:
        assert u_mul(g, u_inv(g)).key == e.key
        assert u_mul(u_inv(g), g).key == e.key
    rng = random.Random(0)
    for _ in range(30):
        a, b, c = (rng.choice(G) for _ in range(3))
        assert u_mul(u_mul(a, b), c).key == u_mul(a, u_mul(b, c)).key


def test_group_orders():
    assert group_order(sh(ofalin, 2, F2)) == 6
    assert group_order(sh(ofalin, 2, F3)) == 48
    assert group_order(sh(ofasymp, 2, F3)) == 24
    assert group_order(sh(ofaorth, 2, F3)) == 4
    assert group_order(sh(ofasymp, 4, F2)) == 720
    assert group_order(sh(ofaorth, 4, F2)) == 72
    assert group_order(sh(ofaorth, 4, F3)) == 1152


def test_enumeration_strategies_agree():
    keys = {}
    for strat in ("batch", "dfs", "scan"):
        s = sh(ofasymp, 2, F3)
        keys[strat] = [g.key for g in enumerate_unitary(s, strategy=strat)]
    assert keys["batch"] == keys["dfs"] == keys["scan"]


def test_enumeration_jobs_invariance():
    import ofa.unitary as un

    un._GROUP_CACHE.pop(("delta:symp:2:zmod:3", "batch"), None)
    a = [g.key for g in enumerate_unitary(sh(ofasymp, 2, F3), strategy="batch", jobs=1)]
    un._GROUP_CACHE.pop(("delta:symp:2:zmod:3", "batch"), None)
    b = [g.key for g in enumerate_unitary(sh(ofasymp, 2, F3), strategy="batch", jobs=3)]
    assert a == b


def test_transvection_short():
    s = sh(ofaorth, 4, F3)
    alg = s.alg
    assert transvection_short(s, 1, 2, alg.zero()).key == u_identity(s).key
    t = transvection_short(s, 1, 2, alg.e(1, 2))
    assert u_is_member(t.beta, t.gamma)
    x, y = alg.e(1, 2, (1,)), alg.e(1, 2, (2,))
    lhs = u_mul(transvection_short(s, 1, 2, x), transvection_short(s, 1, 2, y))
    assert lhs.key == transvection_short(s, 1, 2, alg.add(x, y)).key
    with pytest.raises(StructureError):
        transvection_short(s, 1, -1, alg.e(1, -1))
    with pytest.raises(StructureError):
        transvection_short(s, 1, 2, alg.e(2, 1))


def test_transvection_short_inverse_symp4():
    s = sh(ofasymp, 4, F2)
    x = s.alg.e(1, 2)
    t = transvection_short(s, 1, 2, x)
    tm = transvection_short(s, 1, 2, s.alg.neg(x))
    assert u_mul(t, tm).key == u_identity(s).key


def test_transvection_ultrashort_symp():
    s = sh(ofasymp, 2, F3)
    for k in F3.elements():
        u = act(gen_v(s, 1), s.alg.e(1, 1, k))
        t = transvection_ultrashort(s, 1, u)
        assert u_is_member(t.beta, t.gamma)
        assert t.beta.coeff(-1, 1) == F3.mul(k, k)


def test_transvection_ultrashort_orthodd():
    s = sh(ofaorth, 3, F2)
    # the middle-index product doubles, so this parameter collapses to 0
    u = act(gen_u(s, 0), s.alg.e(0, 1))
    assert delta0_member(u)
    assert transvection_ultrashort(s, 1, u).key == u_identity(s).key
    u1 = act(gen_u(s, 1), s.alg.e(1, 1))
    t = transvection_ultrashort(s, 1, u1)
    assert t.beta.c
    assert u_is_member(t.beta, t.gamma)
    with pytest.raises(StructureError):
        transvection_ultrashort(s, 1, gen_q(s, 1))


def test_dilation():
    s = sh(ofalin, 1, F3)
    alg = s.alg
    assert dilation(s, 1, alg.e(1, 1)).key == u_identity(s).key
    g = dilation(s, 1, alg.e(1, 1, (2,)))
    assert g.beta == alg.el({(1, 1): (1,), (-1, -1): (1,)})
    with pytest.raises(StructureError):
        dilation(sh(ofalin, 1, Z4), 1, ofalin(1, Z4).e(1, 1, (2,)))


def test_dilation_subgroup_orth():
    s = sh(ofaorth, 2, F3)
    gens = [dilation(s, 1, s.alg.e(1, 1, c)) for c in F3.units()]
    assert len(generate_subgroup(gens)) == 2
    a, b = (s.alg.e(1, 1, (2,)),) * 2
    prod = s.alg.kmul((2,), s.alg.e(1, 1, (2,)))
    assert u_mul(dilation(s, 1, a), dilation(s, 1, b)).key == dilation(s, 1, prod).key


def test_dilation0():
    s = sh(ofaorth, 3, F3)
    for c in F3.elements():
        ok = F3.is_zero(F3.add(F3.mul(c, c), c))
        got = u_try(s, s.alg.e(0, 0, c))
        assert (got is not None) == ok
    assert dilation0(s, (2,)).beta == s.alg.e(0, 0, (2,))
    with pytest.raises(StructureError):
        dilation0(sh(ofaorth, 2, F3), (1,))


def test_det_linear_and_sl():
    s = sh(ofalin, 2, F3)
    G = enumerate_unitary(s)
    one = F3.one()
    assert det_linear(u_identity(s)) == (one, one)
    assert sum(1 for g in G if sl_member(g)) == 24
    rng = random.Random(1)
    for _ in range(25):
        a, b = rng.choice(G), rng.choice(G)
        da, db = det_linear(a), det_linear(b)
        assert det_linear(u_mul(a, b)) == (F3.mul(da[0], db[0]), F3.mul(da[1], db[1]))
    t = transvection_short(s, 1, 2, s.alg.e(1, 2))
    assert sl_member(t)


def test_dickson_even_det_route():
    s = sh(ofaorth, 2, F3)
    G = enumerate_unitary(s)
    assert dickson_even(u_identity(s)) == F3.zero()
    assert sorted(dickson_even(g) for g in G) == [(0,), (0,), (1,), (1,)]
    swap = s.alg.el({(1, -1): (1,), (-1, 1): (1,), (1, 1): (2,), (-1, -1): (2,)})
    g = u_make(s, swap)
    assert dickson_even(g) == F3.one()


def test_dickson_even_char2_kernel_index():
    s = sh(ofaorth, 2, F2)
    G = enumerate_unitary(s)
    assert len(G) == 2
    ds = sorted(dickson_even(g) for g in G)
    assert ds == [(0,), (1,)]


def test_dickson_homomorphism():
    s = sh(ofaorth, 4, F3)
    G = enumerate_unitary(s)
    rng = random.Random(2)
    for _ in range(20):
        a, b = rng.choice(G), rng.choice(G)
        assert dickson_even(u_mul(a, b)) == idem_op(
            F3, dickson_even(a), dickson_even(b)
        )
    s2 = sh(ofaorth, 4, F2)
    G2 = enumerate_unitary(s2)
    for _ in range(20):
        a, b = rng.choice(G2), rng.choice(G2)
        assert dickson_even(u_mul(a, b)) == idem_op(
            F2, dickson_even(a), dickson_even(b)
        )


def test_dickson_routes_agree():
    import ofa.unitary as un

    s = sh(ofaorth, 4, F3)
    G = enumerate_unitary(s)
    idlist = sorted(s.alg.indices)
    clif, z = un._clif_center_idem(4, F3)
    for g in G[::31]:
        M = un._block_matrix(s.alg, g.beta, idlist)
        gz = un._clif_transport(clif, M, idlist, z)
        w = clif.mul(clif.sub(gz, z), clif.sub(clif.one(), clif.smul(2, z)))
        assert w == clif.scalar(dickson_even(g))


def test_embed_odd():
    s = sh(ofaorth, 3, F2)
    G = enumerate_unitary(s)
    big = odd_embed_target(s)
    emb = {g.key: embed_odd(g) for g in G}
    assert len({e.key for e in emb.values()}) == len(G)
    rng = random.Random(3)
    for _ in range(15):
        a, b = rng.choice(G), rng.choice(G)
        assert embed_odd(u_mul(a, b)).key == u_mul(emb[a.key], emb[b.key]).key
    # image = elements fixing the difference vector of the two new columns
    K = F2
    idx = sorted(big.alg.indices)
    vec = {i: K.zero() for i in idx}
    vec[-2], vec[2] = K.one(), K.neg(K.one())

    def fixes(g):
        for i in idx:
            s_ = vec[i]
            for j in idx:
                s_ = K.add(s_, K.mul(g.beta.coeff(i, j), vec[j]))
            if s_ != vec[i]:
                return False
        return True

    fixers = {g.key for g in enumerate_unitary(big) if fixes(g)}
    assert fixers == {e.key for e in emb.values()}


def test_so_odd_split_reports():
    expect = {"zmod:2": 12, "zmod:3": 48, "zmod:4": 96}
    for K in (F2, F3, Z4):
        rep = so_odd_split(sh(ofaorth, 3, K))
        assert rep["pass"], rep
        assert rep["order"] == expect[K.name]
        assert rep["order"] == rep["so_order"] * rep["idempotents"]


def test_dickson_odd_values():
    s = sh(ofaorth, 3, F3)
    G = enumerate_unitary(s)
    ds = [dickson_odd(g) for g in G]
    assert ds.count(F3.zero()) == 24 and ds.count(F3.one()) == 24
    for g in G[:6]:
        det = rep_matrix(g)
        assert dickson_odd(g) in ((0,), (1,))


def test_sigma_linear():
    s1 = sh(ofalin, 1, F3)
    sig1 = sigma_linear(s1)
    assert sig1.on_alg(s1.alg.e(1, 1)) == s1.alg.e(-1, -1)
    s = sh(ofalin, 2, F3)
    sig = sigma_linear(s)
    alg = s.alg
    for (i, j) in alg.pairs:
        assert sig.on_alg(sig.on_alg(alg.e(i, j))) == alg.e(i, j)
    rng = random.Random(4)
    for _ in range(20):
        a, b = alg.sample(rng), alg.sample(rng)
        assert sig.on_alg(alg.mul(a, b)) == alg.mul(sig.on_alg(a), sig.on_alg(b))
        assert sig.on_alg(alg.conj(a)) == alg.conj(sig.on_alg(a))
    zp = alg.el({(i, i): (1,) for i in alg.indices if i > 0})
    zm = alg.el({(i, i): (1,) for i in alg.indices if i < 0})
    assert sig.on_alg(zp) == zm and sig.on_alg(zm) == zp
    G = enumerate_unitary(sh(ofalin, 2, F2))
    sig2 = sigma_linear(sh(ofalin, 2, F2))
    assert {sig2(g).key for g in G} == {g.key for g in G}


def test_act_projective_properties():
    s = sh(ofaorth, 4, F3)
    G = enumerate_unitary(s)
    rng = random.Random(5)
    alg = s.alg
    e = u_identity(s)
    u = sample_elem(s, rng)
    assert act_projective(e, u) == u
    for _ in range(8):
        g, h = rng.choice(G), rng.choice(G)
        a = alg.sample(rng)
        assert act_projective(g, alg.mul(a, a)) == alg.mul(
            act_projective(g, a), act_projective(g, a)
        )
        assert act_projective(g, h.beta) == conjugate(g, h).beta
        assert act_projective(g, h.gamma) == conjugate(g, h).gamma
        v = sample_elem(s, rng)
        assert act_projective(g, act_projective(h, v)) == act_projective(u_mul(g, h), v)
    # augmentation part is preserved K-linearly
    for g in G[::200]:
        u0 = s.el(d={s.d_keys[1]: (1,)})
        gu = act_projective(g, u0)
        assert aug_member(gu)
        assert act_projective(g, act_scalar((2,), u0)) == act_scalar((2,), gu)


def test_hyperbolic_families():
    for shape in (sh(ofaorth, 4, F3), sh(ofasymp, 4, F2), sh(ofalin, 2, F3),
                  sh(ofaorth, 3, F2)):
        rep = hyperbolic_family_validate(hyperbolic_family_standard(shape))
        assert rep["pass"], (shape.tag, rep)


def test_pair_sum():
    s = sh(ofasymp, 4, F2)
    fam = hyperbolic_family_standard(s)
    ps = pair_sum(fam[0], fam[1])
    assert not hyperbolic_pair_check(ps)
    with pytest.raises(StructureError):
        pair_sum(fam[0], fam[0])


def test_invalid_pair_witness():
    s = sh(ofasymp, 4, F2)
    bad = HyperbolicPair(
        s.alg.e(-1, -1),
        s.alg.e(1, 1),
        gen_q(s, -1),
        delta_add(gen_q(s, 1), s.el(d={("v", 1): (1,)})),
    )
    fails = hyperbolic_pair_check(bad)
    assert "rho(q) != 0" in fails
    rep = hyperbolic_family_validate([bad])
    assert not rep["pass"] and rep["witnesses"]


def test_classical_pair_symp_gu_order():
    pair = classical_pair(sh(ofasymp, 2, F3))
    G = enumerate_unitary(pair.big_shape)
    assert len(G) == 48
    members = [g for g in G if gu_member(g, pair)]
    assert len(members) == 48


def test_classical_pair_inner_members():
    pair = classical_pair(sh(ofasymp, 2, F3))
    inner = enumerate_unitary(sh(ofasymp, 2, F3))
    for h in inner[::5]:
        g = u_make(pair.big_shape, pair.iota(h.beta))
        assert gu_member(g, pair)
        assert pair.iota_delta(h.gamma).key == g.gamma.key


def test_classical_pair_is_morphism():
    rng = random.Random(6)
    for small in (sh(ofasymp, 2, F3), sh(ofaorth, 2, F3), sh(ofalin, 1, F3)):
        pair = classical_pair(small)
        alg, big = small.alg, pair.big
        for _ in range(20):
            a, b = alg.sample(rng), alg.sample(rng)
            assert pair.iota(alg.mul(a, b)) == big.mul(pair.iota(a), pair.iota(b))
            assert pair.iota(alg.conj(a)) == big.conj(pair.iota(a))
            assert pair.image_member(pair.iota(a))
            assert pair.iota_inv(pair.iota(a)) == a
        for _ in range(10):
            u, v = sample_elem(small, rng), sample_elem(small, rng)
            assert pair.iota_delta(delta_add(u, v)).key == delta_add(
                pair.iota_delta(u), pair.iota_delta(v)
            ).key


def test_classical_pair_sigma_action():
    pair = classical_pair(sh(ofasymp, 2, F3))
    sig = sigma_linear(pair.big_shape)
    for (i, j) in pair.small.pairs:
        assert pair.image_member(sig.on_alg(pair.iota(pair.small.e(i, j))))
    pairo = classical_pair(sh(ofaorth, 2, F3))
    sigo = sigma_linear(pairo.big_shape)
    for (i, j) in pairo.small.pairs:
        x = pairo.iota(pairo.small.e(i, j))
        assert sigo.on_alg(x) == x


def test_classical_pair_coeff_ggl():
    pair = classical_pair(sh(ofalin, 1, F3))
    assert isinstance(pair.bigK, Product)
    G = enumerate_unitary(pair.big_shape)
    assert len(G) == 4
    assert sum(1 for g in G if gu_member(g, pair)) == 4


def test_parabolic_borel_symp2():
    s = sh(ofasymp, 2, F2)
    P = parabolic_p(s)
    assert len(P) == 2
    G = enumerate_unitary(s)
    assert len(P) < len(G)
    keys = {g.key for g in G}
    assert all(g.key in keys for g in P)


def test_parabolic_lin2():
    P = parabolic_p(sh(ofalin, 2, F3))
    assert len(P) == 12
    assert sum(1 for g in P if sl_member(g)) == 6


def test_generate_subgroup_identity():
    s = sh(ofasymp, 2, F3)
    assert len(generate_subgroup([u_identity(s)])) == 1


def test_json_roundtrip():
    s = sh(ofaorth, 4, F3)
    G = enumerate_unitary(s)
    g = G[17]
    data = json.loads(json.dumps(unitary_to_json(g)))
    assert unitary_from_json(s, data).key == g.key
    data["beta"] = []
    with pytest.raises(StructureError):
        unitary_from_json(s, data)
