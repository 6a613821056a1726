"""Command line surface: batch verification, enumeration, and JSON reports.

Every run writes a single JSON document (stdout or --out) with a stable
key order, so identical flags give byte-identical output.  Exit codes:
0 all checks passed, 1 a verification failed (the report carries the
witnesses), 2 usage or structural error.
"""

import argparse
import json
import sys

from .coeff_ring import (CapacityError, PolyQuotient, StructureError,
                         const_hom, parse_ring)
from .form_ring import ofalin, ofaorth, ofasymp
from .odd_form_param import DeltaShape, axioms_check
from . import unitary as ug
from .quad_module import (canon_relations_check, canonical_construction, hdet,
                          naive_canon_check, naive_construction, semiregular,
                          split_module)
from . import clifford as cf
from . import nilpotent2 as n2

FAMILIES = ("lin", "symp", "orth-even", "orth-odd")


def family_algebra(family, n, K):
    if family == "lin":
        return ofalin(n, K)
    if family == "symp":
        return ofasymp(2 * n, K)
    if family == "orth-even":
        return ofaorth(2 * n, K)
    if family == "orth-odd":
        return ofaorth(2 * n + 1, K)
    raise StructureError("unknown family %r" % family)


def family_module(family, n, K):
    if family == "lin":
        return split_module("linear", n, K)
    if family == "symp":
        return split_module("symplectic", 2 * n, K)
    if family == "orth-even":
        return split_module("orthogonal", 2 * n, K)
    if family == "orth-odd":
        return split_module("orthogonal", 2 * n + 1, K)
    raise StructureError("unknown family %r" % family)


def _emit(args, command, params, report, ok):
    doc = {
        "schema": "ofa-report/1",
        "command": command,
        "params": params,
        "pass": bool(ok),
        "report": report,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def _params(args, keys):
    out = {}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


# ---- subcommand handlers ----------------------------------------------

def cmd_algebra_build(args):
    K = parse_ring(args.ring)
    alg = family_algebra(args.family, args.n, K)
    shape = DeltaShape(alg)
    report = {
        "kind": alg.kind,
        "ring": K.name,
        "indices": sorted(alg.indices),
        "alg_rank": alg.rank,
        "delta_dim": shape.dim,
        "delta_card": shape.card(),
    }
    return _emit(args, "algebra build",
                 _params(args, ("family", "n", "ring")), report, True)


def cmd_axioms(args):
    K = parse_ring(args.ring)
    shape = DeltaShape(family_algebra(args.family, args.n, K))
    if args.mode == "sampled" and args.seed is None:
        raise StructureError("sampled mode requires --seed")
    rep = axioms_check(shape, strategy=args.mode, count=args.count,
                       seed=args.seed)
    return _emit(args, "axioms",
                 _params(args, ("family", "n", "ring", "mode", "count",
                                "seed")),
                 rep, rep["pass"])


def cmd_group(args):
    K = parse_ring(args.ring)
    shape = DeltaShape(family_algebra(args.family, args.n, K))
    # jobs deliberately left out of the echo: the report must be
    # byte-identical for any worker count
    params = _params(args, ("family", "n", "ring"))
    if args.gcmd == "order":
        order = ug.group_order(shape, jobs=args.jobs)
        return _emit(args, "group order", params, {"order": order}, True)
    if args.gcmd == "enumerate":
        group = ug.enumerate_unitary(shape, jobs=args.jobs)
        report = {"order": len(group),
                  "elements": [ug.unitary_to_json(g) for g in group]}
        return _emit(args, "group enumerate", params, report, True)
    group = ug.enumerate_unitary(shape, jobs=args.jobs)
    report = {"order": len(group)}
    if args.family == "lin":
        dets = {}
        for g in group:
            key = json.dumps([list(c) for c in ug.det_linear(g)])
            dets[key] = dets.get(key, 0) + 1
        report["det_classes"] = dets
        report["sl_order"] = sum(1 for g in group if ug.sl_member(g))
    elif args.family == "orth-even":
        dick = {}
        for g in group:
            key = json.dumps(list(ug.dickson_even(g)))
            dick[key] = dick.get(key, 0) + 1
        report["dickson_classes"] = dick
    elif args.family == "orth-odd":
        dick = {}
        for g in group:
            key = json.dumps(list(ug.dickson_odd(g)))
            dick[key] = dick.get(key, 0) + 1
        report["dickson_classes"] = dick
    return _emit(args, "group invariants", params, report, True)


def cmd_so_odd_split(args):
    K = parse_ring(args.ring)
    shape = DeltaShape(ofaorth(2 * args.n + 1, K))
    rep = ug.so_odd_split(shape)
    return _emit(args, "so-odd-split", _params(args, ("n", "ring")),
                 rep, rep["pass"])


def cmd_construct(args):
    K = parse_ring(args.ring)
    M = family_module(args.family, args.n, K)
    params = _params(args, ("family", "n", "ring", "seed", "samples"))
    if args.ccmd == "naive":
        F = naive_construction(M)
        report = {
            "t_card": F.t_card(),
            "xi_card": F.xi_card(),
            "naive_unitary_order": len(F.unitary_elements()),
        }
        return _emit(args, "construct naive", params, report, True)
    if args.ccmd == "canonical":
        C = canonical_construction(M)
        failures = canon_relations_check(M, count=args.samples,
                                         seed=args.seed or 0)
        report = {
            "s_card": C.S.card(),
            "theta_card": C.card(),
            "relation_failures": failures,
        }
        return _emit(args, "construct canonical", params, report,
                     not failures)
    rep = naive_canon_check(M, seed=args.seed or 0, samples=args.samples)
    return _emit(args, "construct compare", params, rep, rep["pass"])


def cmd_hdet(args):
    K = parse_ring(args.ring)
    M = family_module("orth-odd", args.n, K)
    value = hdet(M)
    report = {
        "rank": 2 * args.n + 1,
        "hdet": list(value),
        "semiregular": semiregular(M),
    }
    return _emit(args, "hdet", _params(args, ("n", "ring")), report, True)


def _load_nil2(path):
    with open(path) as fh:
        return n2.nil2_from_json(json.load(fh))


def _ext_hom(M, ext):
    E = parse_ring(ext)
    if not isinstance(E, PolyQuotient) or E.base != M.K:
        raise StructureError(
            "--ext must be a quotient ring over the module base")
    return const_hom(E)


def cmd_nil2(args):
    if args.ncmd == "counterexample":
        rep = n2.counterexample_sqrt2(args.modulus)
        return _emit(args, "nil2 counterexample",
                     _params(args, ("modulus",)), rep, True)
    M = _load_nil2(args.module)
    params = _params(args, ("module", "ext"))
    if args.ncmd == "extend":
        f = _ext_hom(M, args.ext)
        N, _ = n2.boxtimes(M, f)
        report = {"ext_card": N.card, "ext_x_card": len(N.X),
                  "module": n2.nil2_to_json(N)}
        return _emit(args, "nil2 extend", params, report, True)
    if args.ncmd == "probe":
        f = _ext_hom(M, args.ext)
        rep = n2.universality_probe(M, f)
        return _emit(args, "nil2 probe", params, rep, True)
    E = parse_ring(args.ext)
    rep = n2.descent_roundtrip(M, E)
    return _emit(args, "nil2 descend", params, rep, rep["iso"])


def cmd_clifford(args):
    K = parse_ring(args.ring)
    params = _params(args, ("n", "ring"))
    if args.kcmd == "spin":
        group = cf.spin_group(args.n, K)
        from .linalg import k_identity
        eye = k_identity(K, args.n)
        kernel = sum(1 for u in group if cf.vector_rep(u) == eye)
        report = {"order": len(group), "vector_kernel": kernel}
        return _emit(args, "clifford spin", params, report, True)
    if args.kcmd == "relations":
        rep = cf.clif0_relation_check(args.n, K)
        return _emit(args, "clifford relations", params, rep, rep["pass"])
    basis = cf.clif0_center(args.n, K)
    report = {"rank": len(basis),
              "basis": [cf.clif_to_json(b) for b in basis]}
    return _emit(args, "clifford center", params, report, True)


def cmd_parabolic(args):
    K = parse_ring(args.ring)
    shape = DeltaShape(family_algebra(args.family, args.n, K))
    P = ug.parabolic_p(shape)
    order = ug.group_order(shape)
    report = {"parabolic_order": len(P), "group_order": order,
              "proper": len(P) < order}
    return _emit(args, "parabolic", _params(args, ("family", "n", "ring")),
                 report, True)


# ---- parser ------------------------------------------------------------

def _add_family(p, required=True):
    p.add_argument("--family", choices=FAMILIES, required=required)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ring", required=True)


def build_parser():
    top = argparse.ArgumentParser(prog="ofa", description=__doc__)
    top.add_argument("--out", help="write the JSON report to this path")
    sub = top.add_subparsers(dest="cmd", required=True)

    alg = sub.add_parser("algebra").add_subparsers(dest="acmd", required=True)
    p = alg.add_parser("build")
    _add_family(p)
    p.set_defaults(func=cmd_algebra_build)

    p = sub.add_parser("axioms")
    _add_family(p)
    p.add_argument("--mode", choices=("exhaustive", "sampled"),
                   default="exhaustive")
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_axioms)

    grp = sub.add_parser("group").add_subparsers(dest="gcmd", required=True)
    for name in ("enumerate", "order", "invariants"):
        p = grp.add_parser(name)
        _add_family(p)
        p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=cmd_group)

    p = sub.add_parser("so-odd-split")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ring", required=True)
    p.set_defaults(func=cmd_so_odd_split)

    con = sub.add_parser("construct").add_subparsers(dest="ccmd",
                                                     required=True)
    for name in ("naive", "canonical", "compare"):
        p = con.add_parser(name)
        _add_family(p)
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int, default=100)
        p.set_defaults(func=cmd_construct)

    p = sub.add_parser("hdet")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ring", required=True)
    p.set_defaults(func=cmd_hdet)

    nil = sub.add_parser("nil2").add_subparsers(dest="ncmd", required=True)
    for name in ("extend", "probe", "descend"):
        p = nil.add_parser(name)
        p.add_argument("--module", required=True,
                       help="path to a module JSON file")
        p.add_argument("--ext", required=True,
                       help="extension ring (quotient over the module base)")
        p.set_defaults(func=cmd_nil2)
    p = nil.add_parser("counterexample")
    p.add_argument("--modulus", type=int, required=True)
    p.set_defaults(func=cmd_nil2)

    klf = sub.add_parser("clifford").add_subparsers(dest="kcmd",
                                                    required=True)
    for name in ("spin", "relations", "center"):
        p = klf.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--ring", required=True)
        p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("parabolic")
    _add_family(p)
    p.set_defaults(func=cmd_parabolic)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StructureError, CapacityError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
