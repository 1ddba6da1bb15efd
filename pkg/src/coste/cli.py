"""Command-line front end: ``coste <command> [options]``.

Models are given as JSON (inline or ``@file``) or in a small presentation
syntax: ``Z/12``, ``Z/4 x Z/9`` for products and ``Z/12 / (4)`` for the
quotient by the ideal generated by the listed elements.  Spaces and maps
for ``colim``, ``lim``, ``relspec`` and ``adjunction-check`` come from a
JSON diagram given with ``--diagram``.

Exit codes: 0 on success, 1 on bad input, 2 when a verification fails.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from pathlib import Path

from .context import CONTEXTS, ContextError, get_context
from .finmodel import (
    Hom,
    ModelError,
    describe,
    enumerate_homs,
    find_isomorphism,
    make_zmod,
    model_from_json,
    model_to_json,
    quotient_by_ideal,
    ring_product,
)
from .relspec import (
    adjunction_census,
    admissible_product,
    relative_sections_local,
    relative_spec,
    triangle_corpus,
    unbased_spec,
)
from .semilattice import pit_holds, reticulation
from .space import (
    coequalizer_spaces,
    coproduct_spaces,
    equalizer_spaces,
    is_admissible_map,
    is_T_modelled,
    product_spaces,
    pullback_spaces,
    small_probe_spaces,
    verify_coequalizer,
    verify_coproduct,
    verify_limit,
)
from .spectrum import (
    ModelledMap,
    ModelledSpace,
    SpaceError,
    discrete_space,
    factorization_is_initial,
    factorize,
    gamma,
    point_space,
    sections,
    sections_local,
    spec,
    standardness_witness,
)


class InputError(ValueError):
    """Bad command-line input; exit code 1."""


class VerificationError(AssertionError):
    """A requested check failed; exit code 2."""


# ---------------------------------------------------------------------------
# model and space ingestion


_ZMOD = re.compile(r"^\s*Z\s*/\s*(\d+)\s*$")
_QUOT = re.compile(r"^(.*)/\s*\(([\d,\s]*)\)\s*$")


def parse_presentation(text: str):
    """``Z/n``, products ``A x B`` and quotients ``A / (g1, g2)``."""
    m = _QUOT.match(text)
    if m:
        base = parse_presentation(m.group(1))
        gens = [int(g) for g in m.group(2).split(",") if g.strip()]
        return quotient_by_ideal(base, gens)[0]
    parts = re.split(r"\s+x\s+|×", text)
    if len(parts) > 1:
        return ring_product([parse_presentation(p) for p in parts])
    m = _ZMOD.match(text)
    if m:
        return make_zmod(int(m.group(1)))
    raise InputError(f"cannot parse model {text!r}")


def _load_json_arg(text: str):
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as e:
            raise InputError(str(e)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON: {e}") from e


def load_model(text: str, budget: int):
    text = text.strip()
    if text.startswith("{") or text.startswith("@"):
        M = model_from_json(_load_json_arg(text))
    else:
        M = parse_presentation(text)
    if M.size > budget:
        raise InputError(f"model has {M.size} elements, above --max-carrier {budget}")
    return M


def _label(p):
    if isinstance(p, (int, str)) or p is None:
        return p
    if isinstance(p, tuple):
        return [_label(q) for q in p]
    return str(p)


def space_to_json(X: ModelledSpace) -> dict:
    return {
        "kind": X.kind,
        "points": [_label(p) for p in X.points],
        "leq": [[int(v) for v in row] for row in X.leq],
        "stalks": [model_to_json(P) for P in X.stalks],
        "transitions": [
            {"from": i, "to": j, "map": list(h.map)}
            for (i, j), h in sorted(X.transitions.items())
            if i != j
        ],
    }


def _point_key(p):
    return tuple(_point_key(q) for q in p) if isinstance(p, list) else p


def space_from_json(obj, ctx: str, budget: int) -> ModelledSpace:
    if not isinstance(obj, dict):
        raise InputError("a space must be a JSON object")
    if "spec" in obj:
        A = model_from_json(obj["spec"])
        _check_budget(A, budget)
        return spec(obj.get("context", ctx), A)
    if "point" in obj:
        M = model_from_json(obj["point"])
        _check_budget(M, budget)
        return point_space(M)
    if "discrete" in obj:
        Ms = [model_from_json(m) for m in obj["discrete"]]
        for M in Ms:
            _check_budget(M, budget)
        return discrete_space(Ms)
    try:
        stalks = [model_from_json(m) for m in obj["stalks"]]
        for M in stalks:
            _check_budget(M, budget)
        leq = tuple(tuple(bool(v) for v in row) for row in obj["leq"])
        trans = {}
        for t in obj.get("transitions", []):
            i, j = int(t["from"]), int(t["to"])
            trans[(i, j)] = Hom(stalks[i], stalks[j], tuple(int(v) for v in t["map"]))
        points = [_point_key(p) for p in obj.get("points", range(len(stalks)))]
        kind = obj.get("kind", stalks[0].kind if stalks else "ring")
        X = ModelledSpace(kind, points, leq, stalks, trans)
    except (KeyError, IndexError, TypeError) as e:
        raise InputError(f"malformed space: {e}") from e
    X.validate()
    return X


def _check_budget(M, budget):
    if M.size > budget:
        raise InputError(f"stalk has {M.size} elements, above --max-carrier {budget}")


def map_from_json(obj, spaces: dict) -> ModelledMap:
    try:
        X, Y = spaces[obj["from"]], spaces[obj["to"]]
        f = tuple(int(v) for v in obj["points"])
        flat = tuple(
            Hom(Y.stalks[f[x]], X.stalks[x], tuple(int(v) for v in m)) for x, m in enumerate(obj["flat"])
        )
    except (KeyError, IndexError, TypeError) as e:
        raise InputError(f"malformed map: {e}") from e
    u = ModelledMap(X, Y, f, flat)
    u.validate()
    return u


def map_to_json(u: ModelledMap) -> dict:
    return {"points": list(u.point_map), "flat": [list(h.map) for h in u.flat]}


def load_diagram(args):
    if not args.diagram:
        raise InputError("this command needs --diagram")
    d = _load_json_arg(args.diagram)
    if not isinstance(d, dict):
        raise InputError("the diagram must be a JSON object")
    spaces = {name: space_from_json(s, args.context, args.max_carrier) for name, s in d.get("spaces", {}).items()}
    for name, X in spaces.items():
        if X.n > args.max_points:
            raise InputError(f"space {name!r} has {X.n} points, above --max-points {args.max_points}")
    maps = {name: map_from_json(m, spaces) for name, m in d.get("maps", {}).items()}
    return d, spaces, maps


def _lookup(table: dict, name, what: str):
    if name not in table:
        raise InputError(f"unknown {what} {name!r}")
    return table[name]


# ---------------------------------------------------------------------------
# DOT export


def poset_dot(name: str, labels, leq) -> str:
    n = len(labels)
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, p in enumerate(labels):
        lines.append(f'  n{i} [label="{p}"];')
    for i in range(n):
        for j in range(n):
            if i != j and leq[i][j] and not any(
                k not in (i, j) and leq[i][k] and leq[k][j] for k in range(n)
            ):
                lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write_dot(args, name: str, labels, leq) -> str | None:
    if not args.dot:
        return None
    out = Path(args.dot)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.dot"
    path.write_text(poset_dot(name, labels, leq))
    return str(path)


# ---------------------------------------------------------------------------
# commands


def _model_summary(M) -> dict:
    return {"size": M.size, "label": describe(M)}


def tag_str(tag) -> str:
    """Flat text form of an arrow tag, e.g. ``3`` or ``0,4,8/1,3,5,7,9,11``."""
    if isinstance(tag, tuple):
        return "/".join(",".join(map(str, t)) if isinstance(t, tuple) else str(t) for t in tag)
    return str(tag)


def _witness_json(w: dict) -> dict:
    out = dict(w)
    out["sections_iso"] = {tag_str(k): v for k, v in w["sections_iso"].items()}
    return out


def cmd_spec(args) -> dict:
    A = load_model(args.model, args.max_carrier)
    c = get_context(args.context, A)
    X = spec(c, A)
    G = gamma(X)
    L = X.compact_opens
    report = {
        "context": c.name,
        "model": _model_summary(A),
        "points": [_label(p) for p in X.points],
        "order": [[int(v) for v in row] for row in X.leq],
        "stalks": [_model_summary(P) for P in X.stalks],
        "compact_opens": {
            "size": L.size,
            "opens": [sorted(U) for U in X.opens],
            "leq": [[int(v) for v in row] for row in L.leq],
        },
        "gamma": {**_model_summary(G), "iso_to_model": find_isomorphism(G, A) is not None},
        "standardness": _witness_json(standardness_witness(c, A)),
    }
    if args.verify:
        for U in X.opens:
            a, b = sections(X, U), sections_local(X, U)
            if sorted(a.values) != sorted(b.values):
                raise VerificationError(f"sections and local sections differ on {sorted(U)}")
        report["verified"] = ["sections == sections_local on every open"]
    dots = [
        _write_dot(args, "specialization", [_label(p) for p in X.points], X.leq),
        _write_dot(args, "compact_opens", [str(sorted(U)) for U in X.opens], L.leq),
    ]
    if args.dot:
        report["dot"] = dots
    return report


def cmd_gamma(args) -> dict:
    A = load_model(args.model, args.max_carrier)
    G = gamma(spec(args.context, A))
    return {**_model_summary(G), "model": model_to_json(G), "iso_to_model": find_isomorphism(G, A) is not None}


def cmd_reticulation(args) -> dict:
    A = load_model(args.model, args.max_carrier)
    R = reticulation(args.context, A)
    L = R.lattice
    report = {
        "size": L.size,
        "label": describe(L),
        "leq": [[int(v) for v in row] for row in L.leq],
        "D": {tag_str(lam.tag): R.D(lam) for lam in R.semilattice},
    }
    path = _write_dot(args, "reticulation", list(range(L.size)), L.leq)
    if path:
        report["dot"] = [path]
    return report


def cmd_pit(args) -> dict:
    A = load_model(args.model, args.max_carrier)
    return {"pit": pit_holds(args.context, A)}


def _load_hom(args) -> Hom:
    if not (args.source and args.target):
        raise InputError("this command needs --source and --target")
    A = load_model(args.source, args.max_carrier)
    B = load_model(args.target, args.max_carrier)
    if args.map:
        m = _load_json_arg(args.map)
        h = Hom(A, B, tuple(int(v) for v in (m["map"] if isinstance(m, dict) else m)))
        if not h.is_valid():
            raise InputError("--map is not a homomorphism")
        return h
    homs = enumerate_homs(A, B)
    if len(homs) != 1:
        raise InputError(f"--map is required: there are {len(homs)} homs")
    return homs[0]


def cmd_admissible(args) -> dict:
    h = _load_hom(args)
    c = get_context(args.context, h.source)
    closed = c.is_admissible(h)
    report = {"admissible": closed}
    if args.verify:
        lifting = c.is_admissible_by_lifting(h)
        report["by_lifting"] = lifting
        if lifting != closed:
            raise VerificationError("closed-form and lifting admissibility disagree")
    return report


def cmd_factorize(args) -> dict:
    h = _load_hom(args)
    c = get_context(args.context, h.source)
    fac = factorize(c, h)
    report = {
        "middle": {"tag": tag_str(fac.middle.tag), **_model_summary(fac.middle.codomain)},
        "first": list(fac.first.map),
        "second": list(fac.second.map),
        "second_admissible": c.is_admissible(fac.second),
    }
    if args.verify:
        report["initial"] = factorization_is_initial(c, h, fac)
        if not report["initial"]:
            raise VerificationError("factorization is not initial")
    return report


def _probes(X_list, args):
    kind = X_list[0].kind if X_list else get_context(args.context).sort
    models = []
    for X in X_list:
        for P in X.stalks:
            if not any(P is Q for Q in models):
                models.append(P)
    return small_probe_spaces(kind, models[:2], min(args.max_points, 3))


def cmd_colim(args) -> dict:
    d, spaces, maps = load_diagram(args)
    c = get_context(args.context)
    if "coproduct" in d:
        Xs = [_lookup(spaces, n, "space") for n in d["coproduct"]]
        col = coproduct_spaces(c, Xs)
        check = lambda probes: verify_coproduct(c, col, Xs, probes)
        inputs = Xs
    elif "coequalizer" in d:
        f, g = (_lookup(maps, n, "map") for n in d["coequalizer"])
        col = coequalizer_spaces(c, f, g, check=not d.get("allow_nonadmissible", False))
        check = lambda probes: verify_coequalizer(c, col, f, g, probes)
        inputs = [f.source, f.target]
    else:
        raise InputError("colim diagram needs 'coproduct' or 'coequalizer'")
    report = {
        "apex": space_to_json(col.apex),
        "legs": [map_to_json(u) for u in col.legs],
        "T_modelled": is_T_modelled(c, col.apex),
        "legs_admissible": all(is_admissible_map(c, u) for u in col.legs),
    }
    if args.verify:
        report["universal"] = check(_probes(inputs, args))
        if not (report["universal"] and report["T_modelled"] and report["legs_admissible"]):
            raise VerificationError(json.dumps(report, sort_keys=True))
    return report


def cmd_lim(args) -> dict:
    d, spaces, maps = load_diagram(args)
    c = get_context(args.context)
    compatible = None
    if "product" in d:
        targets = [_lookup(spaces, n, "space") for n in d["product"]]
        lim = product_spaces(c, targets)
    elif "admissible_product" in d:
        targets = [_lookup(spaces, n, "space") for n in d["admissible_product"]]
        lim, _ = admissible_product(c, targets)
    elif "equalizer" in d:
        f, g = (_lookup(maps, n, "map") for n in d["equalizer"])
        lim = equalizer_spaces(c, f, g)
        targets = [f.source]
        compatible = lambda cone: cone[0].then(f).same_as(cone[0].then(g))
    elif "pullback" in d:
        g, f = (_lookup(maps, n, "map") for n in d["pullback"])
        lim = pullback_spaces(c, g, f)
        targets = [g.source, f.source]
        compatible = lambda cone: cone[0].then(g).same_as(cone[1].then(f))
    else:
        raise InputError("lim diagram needs 'product', 'admissible_product', 'equalizer' or 'pullback'")
    report = {"apex": space_to_json(lim.apex), "legs": [map_to_json(u) for u in lim.legs]}
    if args.verify:
        admissible = "admissible_product" in d
        report["universal"] = verify_limit(
            lim, targets, _probes(targets, args), c if admissible else None, compatible
        )
        if not report["universal"]:
            raise VerificationError(json.dumps(report, sort_keys=True))
    return report


def cmd_relspec(args) -> dict:
    d, spaces, maps = load_diagram(args)
    c = get_context(args.context)
    if "map" in d:
        rs = relative_spec(c, _lookup(maps, d["map"], "map"))
    elif "unbased" in d:
        rs = unbased_spec(c, _lookup(spaces, d["unbased"], "space"))
    else:
        raise InputError("relspec diagram needs 'map' or 'unbased'")
    report = {
        "space": space_to_json(rs.space),
        "structure_map": map_to_json(rs.g),
        "legs": [map_to_json(u) for u in rs.legs],
    }
    if args.verify:
        basis = rs.basis_law_holds()
        order = rs.order_from_basis() == rs.space.leq
        local = all(
            sorted(sections(rs.space, W).values) == sorted(relative_sections_local(rs, W).values)
            for W in rs.space.opens
        )
        report["verification"] = {"basis_law": basis, "order_from_basis": order, "sections_local": local}
        if not (basis and order and local):
            raise VerificationError(json.dumps(report, sort_keys=True))
    return report


def cmd_adjunction(args) -> dict:
    results = []
    if args.diagram:
        d, spaces, maps = load_diagram(args)
        f = _lookup(maps, d["f"], "map")
        k = _lookup(maps, d["k"], "map")
        Z = _lookup(spaces, d["Z"], "space")
        results.append({"name": "diagram", **adjunction_census(args.context, f, Z, k)})
    else:
        corpus = triangle_corpus()
        if args.sample:
            corpus = random.Random(args.seed).sample(corpus, min(args.sample, len(corpus)))
        for T in corpus:
            results.append({"name": T.name, **adjunction_census(T.context, T.f, T.Z, T.k)})
    ok = all(r["ok"] for r in results)
    report = {"triangles": len(results), "ok": ok, "results": results}
    if args.verify and not ok:
        raise VerificationError(json.dumps(report, sort_keys=True))
    return report


def cmd_standardness(args) -> dict:
    A = load_model(args.model, args.max_carrier)
    w = _witness_json(standardness_witness(args.context, A))
    if args.verify and not w["standard"]:
        raise VerificationError(json.dumps(w, sort_keys=True))
    return w


COMMANDS = {
    "spec": cmd_spec,
    "gamma": cmd_gamma,
    "reticulation": cmd_reticulation,
    "pit": cmd_pit,
    "admissible": cmd_admissible,
    "factorize": cmd_factorize,
    "colim": cmd_colim,
    "lim": cmd_lim,
    "relspec": cmd_relspec,
    "adjunction-check": cmd_adjunction,
    "standardness": cmd_standardness,
}

_NEEDS_MODEL = {"spec", "gamma", "reticulation", "pit", "standardness"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coste", description="Spectra of finite models in Coste contexts.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--context", default="zariski", choices=sorted(CONTEXTS))
    parser.add_argument("--model", help="model as JSON, @file or presentation such as Z/12")
    parser.add_argument("--source", help="source model of a hom")
    parser.add_argument("--target", help="target model of a hom")
    parser.add_argument("--map", help="the hom as a JSON list of images, or {\"map\": [...]}")
    parser.add_argument("--diagram", help="JSON diagram of spaces and maps, inline or @file")
    parser.add_argument("--dot", metavar="DIR", help="write DOT digraphs into DIR")
    parser.add_argument("--verify", action="store_true", help="run the exhaustive checks")
    parser.add_argument("--seed", type=int, default=0, help="seed for corpus sampling")
    parser.add_argument("--sample", type=int, default=0, help="sample this many corpus triangles")
    parser.add_argument("--max-carrier", type=int, default=64, help="largest model accepted")
    parser.add_argument("--max-points", type=int, default=4, help="largest space accepted")
    return parser


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    if args.command in _NEEDS_MODEL and not args.model:
        return 1, {"error": "--model is required"}
    try:
        return 0, COMMANDS[args.command](args)
    except VerificationError as e:
        return 2, {"error": "verification failed", "detail": str(e)}
    except (InputError, ModelError, ContextError, SpaceError, KeyError) as e:
        return 1, {"error": str(e)}


def main(argv=None) -> int:
    code, report = run(argv)
    stream = sys.stdout if code == 0 else sys.stderr
    stream.write(json.dumps(report, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
