"""Batch command-line front end.

Every report embeds the exact inputs, field descriptor, seed and tool version.
Exit codes: 0 success, 1 usage error, 2 domain error (with a machine-readable
error object on stdout).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import endo, fields, g2, graph, limits, poly, tuples
from .errors import CocharLabError
from .linalg import Matrix
from .poly import Polynomial

VERSION = "0.1.0"


def _report(args, result, fmt="json"):
    out = {
        "tool": "cocharlab",
        "version": VERSION,
        "command": args._command,
        "inputs": {k: v for k, v in sorted(vars(args).items())
                   if not k.startswith("_") and v is not None
                   and k not in ("format",)},
        "result": result,
    }
    if fmt == "text":
        return _textify(out)
    return json.dumps(out, indent=2, sort_keys=True)


def _textify(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_textify(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_textify(v, indent) if isinstance(v, (dict, list))
                         else f"{pad}- {v}" for v in obj)
    return f"{pad}{obj}"


def _load_json_arg(text):
    if text.strip().startswith(("{", "[")):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _matrix_arg(args, attr="matrix"):
    obj = _load_json_arg(getattr(args, attr))
    if isinstance(obj, list):
        obj = {"descriptor": args.field, "rows": obj}
    obj.setdefault("descriptor", args.field)
    return Matrix.from_json(obj)


def _poly_arg(args):
    field = fields.parse_descriptor(args.field)
    text = args.poly
    if text.strip().startswith("{"):
        return Polynomial.from_json(json.loads(text))
    return Polynomial.parse(field, text)


def _cocharacter_arg(args):
    obj = _load_json_arg(args.cochar)
    conj = None
    if obj.get("conjugator"):
        conj = Matrix.from_json({"descriptor": args.field,
                                 "rows": obj["conjugator"]})
    return limits.Cocharacter(tuple(obj["weights"]), conj)


def _budgets(args):
    b = graph.Budgets()
    if getattr(args, "budget_nodes", None):
        b.max_nodes = args.budget_nodes
    if getattr(args, "budget_group", None):
        b.max_group_order = args.budget_group
    if getattr(args, "budget_vectors", None):
        b.max_subspace_vectors = args.budget_vectors
    return b


# -- poly ---------------------------------------------------------------------


def _cmd_poly_squarefree(args):
    f = _poly_arg(args)
    return {"poly": f.literal(), "squarefree": poly.squarefree_test(f),
            "separable": poly.is_separable(f)}


def _cmd_poly_factor(args):
    f = _poly_arg(args)
    rep = poly.factor(f)
    return {"poly": f.literal(),
            "unit": rep.unit.literal(),
            "factors": [{"factor": g.literal(), "multiplicity": m}
                        for g, m in rep.factors]}


# -- endo ---------------------------------------------------------------------


def _cmd_endo_analyze(args):
    f = _matrix_arg(args)
    cls = endo.invariant_factors(f)
    rep = endo.is_cocharacter_closed(f)
    return {
        "invariant_factors": [d.literal() for d in cls.invariant_factors],
        "min_poly": cls.min_poly.literal(),
        "char_poly": cls.char_poly.literal(),
        "commutant_dimension": endo.commutant_dimension(f),
        "cocharacter_closed": rep.closed,
        "geometrically_closed": endo.is_geometrically_closed(f),
        "certificate": rep.to_json(),
    }


def _cmd_endo_limit(args):
    f = _matrix_arg(args)
    lam = _cocharacter_arg(args)
    model = limits.ConjugationModel(f.field, f.nrows)
    res = limits.limit(f, lam, model)
    return res.to_json(model)


def _cmd_endo_semisimplify(args):
    f = _matrix_arg(args)
    return endo.semisimplification(f).to_json()


def _cmd_endo_witness(args):
    f = _matrix_arg(args)
    lam, lim = endo.witness_cocharacter(f)
    return {"cocharacter": lam.to_json(),
            "limit": lim.to_json()["rows"],
            "limit_class": endo.invariant_factors(lim).to_json()}


def _cmd_endo_ru_conjugate(args):
    f = _matrix_arg(args, "matrix")
    fl = _matrix_arg(args, "limit")
    lam = _cocharacter_arg(args)
    u = endo.ru_conjugator(f, fl, lam)
    return {"conjugator": u.to_json()["rows"]}


# -- graph ---------------------------------------------------------------------


def _seed_point(model, args):
    field = model.field
    text = args.seed_point
    if model.name == "endo":
        obj = _load_json_arg(text) if text.strip().startswith(("[", "{")) \
            else None
        if obj is None:
            raise CocharLabError("endo seed point must be a matrix JSON")
        if isinstance(obj, list):
            obj = {"descriptor": args.field, "rows": obj}
        return Matrix.from_json(obj)
    if model.name == "tuple":
        obj = _load_json_arg(text)
        return tuple(Matrix.from_json({"descriptor": args.field, "rows": r})
                     for r in obj)
    if model.name == "fromf4":
        return tuple(fields.parse_element(field, c)
                     for c in text.split(","))
    return fields.parse_element(field, text)


def _cmd_graph_access(args):
    field = fields.parse_descriptor(args.field)
    budgets = _budgets(args)
    model = graph.make_model(args.model, field, budgets,
                             dim=args.dim, tuple_length=args.tuple_length)
    seed = _seed_point(model, args)
    g = graph.accessibility_graph(seed, model, budgets)
    if args.format == "dot":
        return {"dot": graph.export_dot(g)}
    return g.to_json(model)


def _cmd_graph_antisymmetry(args):
    field = fields.parse_descriptor(args.field)
    budgets = _budgets(args)
    model = graph.make_model(args.model, field, budgets,
                             dim=args.dim, tuple_length=args.tuple_length)
    if args.model == "endo":
        points = graph.all_matrices(field, args.dim, budgets)
    elif args.model == "tuple":
        points = graph.all_tuples(field, args.dim, args.tuple_length, budgets)
    else:
        raise CocharLabError("antisymmetry check needs an enumerable model")
    return graph.check_antisymmetry(model, points, budgets).to_json()


# -- tuple ---------------------------------------------------------------------


def _tuple_arg(args):
    obj = _load_json_arg(args.tuple)
    if isinstance(obj, dict):
        desc = obj.get("descriptor", args.field)
        mats = obj["matrices"]
    else:
        desc = args.field
        mats = obj
    if desc is None:
        raise CocharLabError("tuple input needs a descriptor or --field")
    return tuple(Matrix.from_json({"descriptor": desc, "rows": r})
                 for r in mats)


def _cmd_tuple_semisimple(args):
    t = _tuple_arg(args)
    return tuples.is_semisimple(t, seed=args.seed).to_json()


def _cmd_tuple_gcr(args):
    t = _tuple_arg(args)
    ok, rep = tuples.gcr_over_k(t, seed=args.seed)
    return {"completely_reducible": ok, "module": rep.to_json()}


# -- g2 -----------------------------------------------------------------------


def _g2_field(p):
    return (fields.FieldDescriptor.rationals() if p == 0
            else fields.FieldDescriptor.finite(p))


def _cmd_g2_limit(args):
    field = _g2_field(args.p)
    w = g2.UnipotentWord.parse(field, args.word)
    lam = g2.parse_coroot(args.cochar)
    lim = g2.word_limit(w, lam)
    return {"word": w.literal(), "cocharacter": list(lam),
            "exists": lim is not None,
            "limit": None if lim is None else lim.literal()}


def _cmd_g2_collect(args):
    field = _g2_field(args.p)
    w = g2.UnipotentWord.parse(field, args.word)
    return {"word": w.literal(), "collected": g2.collect(w).literal()}


def _cmd_g2_figure(args):
    if args.format == "dot":
        return {"dot": g2.figure_dot(args.p)}
    return {"p": args.p, "edges": g2.figure_edges(args.p),
            "convention": g2.generate_structure_constants().convention}


# -- demos ---------------------------------------------------------------------


def _cmd_demo_rsquares(args):
    Q = fields.FieldDescriptor.rationals()
    model = graph.RSquaresModel(Q)
    out = {}
    for seed_lit in ("1", "-1"):
        z = fields.parse_element(Q, seed_lit)
        gph = graph.accessibility_graph(z, model)
        out[seed_lit] = gph.to_json(model)
    out["orbits_distinct"] = (model.orbit_id(Q.from_int(1))
                              != model.orbit_id(Q.from_int(-1)))
    return out


def _cmd_demo_pgl2(args):
    k = fields.FieldDescriptor.function_field(2, "t")
    return graph.pgl2_adjoint_demo(k)


def _cmd_demo_fromf4(args):
    F5 = fields.FieldDescriptor.finite(5)
    model = graph.SymSquareModel(F5)
    zero, one = F5.zero(), F5.one()
    v = (zero, one, zero, one, zero)        # xy + e1
    vp = (zero, one, zero, zero, zero)      # xy
    vpp = (one, zero, zero, zero, zero)     # x^2
    steps_v = model.one_step_limits(v)
    steps_vp = model.one_step_limits(vp)
    id_vpp = model.orbit_id(vpp)
    gph = graph.accessibility_graph(v, model)
    return {
        "orbit_ids": {"v": model.orbit_id(v), "v_prime": model.orbit_id(vp),
                      "v_double_prime": id_vpp},
        "one_step_from_v": sorted(oid for oid, _, _ in steps_v),
        "one_step_from_v_prime": sorted(oid for oid, _, _ in steps_vp),
        "v_double_prime_one_step_from_v":
            id_vpp in [oid for oid, _, _ in steps_v],
        "v_double_prime_one_step_from_v_prime":
            id_vpp in [oid for oid, _, _ in steps_vp],
        "graph": gph.to_json(model),
    }


def _cmd_demo_insepext(args):
    k = fields.parse_descriptor("Fp(t):p=2")
    mu = Polynomial.parse(k, "T^12+t")
    f = Matrix.companion(mu)
    out = {"base_field": str(k), "min_poly": mu.literal()}
    rep = endo.is_cocharacter_closed(f)
    out["cocharacter_closed_over_k"] = rep.closed
    out["geometrically_closed"] = endo.is_geometrically_closed(f)
    tower = fields.parse_descriptor(
        "ext(ext(Fp(t):p=2;X^3+t;s);X^2+X+1;z)")
    mu_t = Polynomial.parse(tower, "T^12+t")
    fac = poly.factor(mu_t)
    out["separable_tower"] = str(tower)
    out["tower_squarefree"] = poly.squarefree_test(mu_t)
    out["tower_factors"] = [{"factor": g.literal(), "multiplicity": m}
                            for g, m in fac.factors]
    # the inseparable extension k(a^2): the 4-dimensional primary block
    ka2 = fields.parse_descriptor("ext(ext(Fp(t):p=2;X^3+t;s);X^2+s;b)")
    blk = Matrix.companion(Polynomial.parse(ka2, "T^4+s"))
    rep2 = endo.is_cocharacter_closed(blk)
    out["block_field"] = str(ka2)
    out["block_min_poly"] = "T^4+s"
    out["block_cocharacter_closed"] = rep2.closed
    out["block_witness"] = rep2.to_json()
    # explicit block form: a cocharacter kills the top-right entry only
    b = fields.parse_element(ka2, "b")
    z0, o = ka2.zero(), ka2.one()
    A = Matrix(ka2, [[z0, b, z0, b], [o, z0, z0, z0],
                     [z0, z0, z0, b], [z0, z0, o, z0]])
    lam = limits.Cocharacter((1, 1, 0, 0))
    model = limits.ConjugationModel(ka2, 4)
    res = limits.limit(A, lam, model, classify=False)
    lim = res.value
    out["explicit_matrix_replay"] = {
        "matrix": A.to_json()["rows"],
        "cocharacter": lam.to_json(),
        "limit": lim.to_json()["rows"],
        "limit_min_poly": endo.min_poly(lim).literal(),
        "class_changes": endo.invariant_factors(lim)
        != endo.invariant_factors(A),
    }
    return out


# -- wiring ---------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="cocharlab", add_help=True)
    sub = ap.add_subparsers(dest="group")

    def common(p):
        p.add_argument("--format", choices=("json", "text", "dot"),
                       default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-nodes", type=int, dest="budget_nodes")
        p.add_argument("--budget-group", type=int, dest="budget_group")
        p.add_argument("--budget-vectors", type=int, dest="budget_vectors")

    g_poly = sub.add_parser("poly")
    sp = g_poly.add_subparsers(dest="action")
    for action, fn in (("squarefree", _cmd_poly_squarefree),
                       ("factor", _cmd_poly_factor)):
        p = sp.add_parser(action)
        p.add_argument("--field", required=True)
        p.add_argument("--poly", required=True)
        common(p)
        p.set_defaults(_fn=fn, _command=f"poly {action}")

    g_endo = sub.add_parser("endo")
    sp = g_endo.add_subparsers(dest="action")
    for action, fn, extra in (
            ("analyze", _cmd_endo_analyze, ()),
            ("limit", _cmd_endo_limit, ("cochar",)),
            ("semisimplify", _cmd_endo_semisimplify, ()),
            ("witness", _cmd_endo_witness, ()),
            ("ru-conjugate", _cmd_endo_ru_conjugate, ("cochar", "limit"))):
        p = sp.add_parser(action)
        p.add_argument("--field", required=True)
        p.add_argument("--matrix", required=True)
        if "cochar" in extra:
            p.add_argument("--cochar", required=True)
        if "limit" in extra:
            p.add_argument("--limit", required=True)
        common(p)
        p.set_defaults(_fn=fn, _command=f"endo {action}")

    g_graph = sub.add_parser("graph")
    sp = g_graph.add_subparsers(dest="action")
    p = sp.add_parser("access")
    p.add_argument("--model", required=True,
                   choices=("endo", "tuple", "rsquares", "fromf4"))
    p.add_argument("--field", required=True)
    p.add_argument("--seed-point", required=True, dest="seed_point")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--tuple-length", type=int, default=2, dest="tuple_length")
    common(p)
    p.set_defaults(_fn=_cmd_graph_access, _command="graph access")
    p = sp.add_parser("antisymmetry")
    p.add_argument("--model", required=True, choices=("endo", "tuple"))
    p.add_argument("--field", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--tuple-length", type=int, default=2, dest="tuple_length")
    common(p)
    p.set_defaults(_fn=_cmd_graph_antisymmetry, _command="graph antisymmetry")

    g_tuple = sub.add_parser("tuple")
    sp = g_tuple.add_subparsers(dest="action")
    for action, fn in (("semisimple", _cmd_tuple_semisimple),
                       ("gcr", _cmd_tuple_gcr)):
        p = sp.add_parser(action)
        p.add_argument("--field")
        p.add_argument("--tuple", required=True)
        common(p)
        p.set_defaults(_fn=fn, _command=f"tuple {action}")

    g_g2 = sub.add_parser("g2")
    sp = g_g2.add_subparsers(dest="action")
    p = sp.add_parser("limit")
    p.add_argument("--word", required=True)
    p.add_argument("--cochar", required=True)
    p.add_argument("--p", type=int, default=0)
    common(p)
    p.set_defaults(_fn=_cmd_g2_limit, _command="g2 limit")
    p = sp.add_parser("collect")
    p.add_argument("--word", required=True)
    p.add_argument("--p", type=int, default=0)
    common(p)
    p.set_defaults(_fn=_cmd_g2_collect, _command="g2 collect")
    p = sp.add_parser("figure")
    p.add_argument("--p", type=int, required=True)
    common(p)
    p.set_defaults(_fn=_cmd_g2_figure, _command="g2 figure")

    g_demo = sub.add_parser("demo")
    sp = g_demo.add_subparsers(dest="action")
    for action, fn in (("rsquares", _cmd_demo_rsquares),
                       ("pgl2", _cmd_demo_pgl2),
                       ("fromf4", _cmd_demo_fromf4),
                       ("insepext", _cmd_demo_insepext)):
        p = sp.add_parser(action)
        common(p)
        p.set_defaults(_fn=fn, _command=f"demo {action}")

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    if not hasattr(args, "_fn"):
        ap.print_usage()
        return 1
    try:
        result = args._fn(args)
    except CocharLabError as exc:
        print(json.dumps({"tool": "cocharlab", "version": VERSION,
                          "error": {"type": type(exc).__name__,
                                    "message": str(exc)}}))
        return 2
    fmt = getattr(args, "format", "json")
    if fmt == "dot" and isinstance(result, dict) and "dot" in result:
        print(result["dot"])
    else:
        print(_report(args, result, fmt))
    return 0


if __name__ == "__main__":
    sys.exit(main())
