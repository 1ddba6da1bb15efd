"""Finite modelled spaces: admissibility, colimits and T₀ limits.

Colimits are taken in the category of T-modelled spaces with admissible
maps; limits here are the T₀ ones (the admissible versions come from the
relative spectrum, see ``relspec``).  Every construction can be checked
against its universal property by enumerating maps into or out of small
probe spaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .context import get_context
from .finmodel import (
    Hom,
    ModelError,
    chain,
    enumerate_homs,
    extend_hom,
    initial_model,
    model_coproduct,
    quotient_by_pairs,
)
from .spectrum import (
    ModelledMap,
    ModelledSpace,
    SpaceError,
    _pointwise_model,
    discrete_space,
    empty_space,
    point_space,
    sections,
)


def is_admissible_map(ctx, f: ModelledMap) -> bool:
    if not f.flat:
        return True
    c = get_context(ctx, f.flat[0].source)
    return all(c.is_admissible(h) for h in f.flat)


def is_T_modelled(ctx, X: ModelledSpace) -> bool:
    if X.n == 0:
        return True
    c = get_context(ctx, X.stalks[0])
    return all(c.is_T_model(P) for P in X.stalks)


# ---------------------------------------------------------------------------
# enumeration of maps


@lru_cache(maxsize=None)
def _homs(Q, P) -> tuple:
    return tuple(enumerate_homs(Q, P))


def enumerate_maps(X: ModelledSpace, Y: ModelledSpace, ctx=None) -> Iterator[ModelledMap]:
    """All modelled maps X -> Y; only admissible ones when ``ctx`` is given."""
    c = None
    if ctx is not None and X.n and Y.n:
        c = get_context(ctx, X.stalks[0])
    n = X.n
    order = sorted(range(n), key=lambda x: sum(X.leq[y][x] for y in range(n)))
    f = [-1] * n
    flat: list = [None] * n

    def candidates(y, x):
        hs = _homs(Y.stalks[y], X.stalks[x])
        if c is not None:
            hs = tuple(h for h in hs if c.is_admissible(h))
        return hs

    def rec(t):
        if t == n:
            yield ModelledMap(X, Y, tuple(f), tuple(flat))
            return
        x = order[t]
        for y in range(Y.n):
            if any(f[x2] != -1 and X.leq[x2][x] and not Y.leq[f[x2]][y] for x2 in range(n)):
                continue
            if any(f[x2] != -1 and X.leq[x][x2] and not Y.leq[y][f[x2]] for x2 in range(n)):
                continue
            for h in candidates(y, x):
                ok = True
                for x2 in range(n):
                    if f[x2] == -1:
                        continue
                    if X.leq[x2][x]:
                        ok = flat[x2].then(X.transition(x2, x)).map == Y.transition(f[x2], y).then(h).map
                    elif X.leq[x][x2]:
                        ok = h.then(X.transition(x, x2)).map == Y.transition(y, f[x2]).then(flat[x2]).map
                    if not ok:
                        break
                if not ok:
                    continue
                f[x], flat[x] = y, h
                yield from rec(t + 1)
                f[x], flat[x] = -1, None

    yield from rec(0)


def restrict_maps(maps: Iterable[ModelledMap], ctx) -> list[ModelledMap]:
    return [m for m in maps if is_admissible_map(ctx, m)]


# ---------------------------------------------------------------------------
# coproducts


@dataclass(eq=False)
class Colimit:
    apex: ModelledSpace
    legs: list


def coproduct_spaces(ctx, Xs: Sequence[ModelledSpace]) -> Colimit:
    """Disjoint union; stalks and transitions unchanged."""
    kind = Xs[0].kind if Xs else _kind_of(ctx)
    points, stalks, trans, offsets = [], [], {}, []
    for i, X in enumerate(Xs):
        offsets.append(len(points))
        points.extend((i, p) for p in X.points)
        stalks.extend(X.stalks)
    n = len(points)
    leq = [[False] * n for _ in range(n)]
    for i, X in enumerate(Xs):
        o = offsets[i]
        for a in range(X.n):
            for b in range(X.n):
                if X.leq[a][b]:
                    leq[o + a][o + b] = True
                    trans[(o + a, o + b)] = X.transition(a, b)
    C = ModelledSpace(kind, points, tuple(map(tuple, leq)), stalks, trans)
    legs = [
        ModelledMap(X, C, tuple(offsets[i] + a for a in range(X.n)), tuple(Hom.identity(P) for P in X.stalks))
        for i, X in enumerate(Xs)
    ]
    return Colimit(C, legs)


def _kind_of(ctx) -> str:
    c = get_context(ctx)
    return c.sort


def coproduct_mediator(col: Colimit, cocone: Sequence[ModelledMap]) -> ModelledMap:
    C = col.apex
    f, flat = [None] * C.n, [None] * C.n
    for leg, k in zip(col.legs, cocone):
        for a, c_pt in enumerate(leg.point_map):
            f[c_pt] = k.point_map[a]
            flat[c_pt] = k.flat[a]
    target = cocone[0].target if cocone else empty_space(C.kind)
    return ModelledMap(C, target, tuple(f), tuple(flat))


def verify_coproduct(ctx, col: Colimit, Xs, probes: Sequence[ModelledSpace]) -> bool:
    """Each cocone into each probe has exactly one mediating admissible map."""
    for V in probes:
        hom_sets = [restrict_maps(enumerate_maps(X, V, ctx), ctx) for X in Xs]
        mediators = restrict_maps(enumerate_maps(col.apex, V, ctx), ctx)
        for cocone in itertools.product(*hom_sets):
            hits = sum(
                1
                for u in mediators
                if all(leg.then(u).same_as(k) for leg, k in zip(col.legs, cocone))
            )
            if hits != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# coequalizers


def _quotient_poset(Y: ModelledSpace, pairs) -> list[int]:
    """Class of each point after identifying ``pairs`` and collapsing the preorder."""
    n = Y.n
    reach = [[Y.leq[a][b] for b in range(n)] for a in range(n)]
    for a, b in pairs:
        reach[a][b] = reach[b][a] = True
    for k in range(n):
        for a in range(n):
            if reach[a][k]:
                for b in range(n):
                    if reach[k][b]:
                        reach[a][b] = True
    cls = [-1] * n
    reps = []
    for a in range(n):
        if cls[a] == -1:
            for b in range(n):
                if reach[a][b] and reach[b][a]:
                    cls[b] = len(reps)
            reps.append(a)
    return cls


def coequalizer_spaces(ctx, f: ModelledMap, g: ModelledMap, check: bool = True) -> Colimit:
    """Coequalizer of f, g: (X,P) ⇉ (Y,Q).

    With ``check`` the inputs must be admissible maps of T-modelled spaces and
    the output is asserted to be T-modelled with p admissible.
    """
    X, Y = f.source, f.target
    if g.source is not X or g.target is not Y:
        raise SpaceError("coequalizer needs parallel maps")
    if check:
        for space in (X, Y):
            if not is_T_modelled(ctx, space):
                raise ModelError("coequalizer inputs must be T-modelled")
        if not (is_admissible_map(ctx, f) and is_admissible_map(ctx, g)):
            raise ModelError("coequalizer inputs must be admissible")
    cls = _quotient_poset(Y, [(f.point_map[x], g.point_map[x]) for x in range(X.n)])
    m = max(cls) + 1 if cls else 0
    members = [[y for y in range(Y.n) if cls[y] == z] for z in range(m)]
    zleq = tuple(
        tuple(any(Y.leq[a][b] for a in members[z] for b in members[z2]) or z == z2 for z2 in range(m))
        for z in range(m)
    )
    # close the induced relation transitively
    zl = [list(r) for r in zleq]
    for k in range(m):
        for a in range(m):
            if zl[a][k]:
                for b in range(m):
                    if zl[k][b]:
                        zl[a][b] = True
    zleq = tuple(map(tuple, zl))

    stalk_data = []
    for z in range(m):
        W = [z2 for z2 in range(m) if zleq[z][z2]]
        pW = tuple(y for y in range(Y.n) if cls[y] in W)
        hW = [x for x in range(X.n) if cls[f.point_map[x]] in W]
        secs = sections(Y, pW)
        pos = {y: k for k, y in enumerate(pW)}
        keep = [
            s
            for s in secs.values
            if all(
                f.flat[x].map[s[pos[f.point_map[x]]]] == g.flat[x].map[s[pos[g.point_map[x]]]]
                for x in hW
            )
        ]
        R = _pointwise_model(Y.kind, [Y.stalks[y] for y in pW], keep)
        stalk_data.append((pW, keep, R))

    trans = {}
    for z in range(m):
        for z2 in range(m):
            if zleq[z][z2]:
                pW, vals, R = stalk_data[z]
                pW2, vals2, R2 = stalk_data[z2]
                pos = [pW.index(y) for y in pW2]
                idx = {v: i for i, v in enumerate(vals2)}
                trans[(z, z2)] = Hom(R, R2, tuple(idx[tuple(v[k] for k in pos)] for v in vals))
    Z = ModelledSpace(
        Y.kind,
        [tuple(Y.points[y] for y in members[z]) for z in range(m)],
        zleq,
        [d[2] for d in stalk_data],
        trans,
    )
    pflat = []
    for y in range(Y.n):
        pW, vals, R = stalk_data[cls[y]]
        k = pW.index(y)
        pflat.append(Hom(R, Y.stalks[y], tuple(v[k] for v in vals)))
    p = ModelledMap(Y, Z, tuple(cls), tuple(pflat))
    if check:
        if not is_T_modelled(ctx, Z):
            raise AssertionError("coequalizer of admissible maps is not T-modelled")
        if not is_admissible_map(ctx, p):
            raise AssertionError("coequalizer projection is not admissible")
    return Colimit(Z, [p])


def verify_coequalizer(ctx, col: Colimit, f: ModelledMap, g: ModelledMap, probes) -> bool:
    p = col.legs[0]
    for V in probes:
        ks = [
            k
            for k in restrict_maps(enumerate_maps(f.target, V, ctx), ctx)
            if f.then(k).same_as(g.then(k))
        ]
        us = restrict_maps(enumerate_maps(col.apex, V, ctx), ctx)
        for k in ks:
            if sum(1 for u in us if p.then(u).same_as(k)) != 1:
                return False
    return True


def nonadmissible_coequalizer_example():
    """Lattice maps (pt, 2) ⇉ (two points, 3-chain each) whose comparison
    0, m, 1 -> 0, 1, 1 does not reflect 1.  The T₀ coequalizer has a single
    point whose stalk is the five-element diamond, which is not local."""
    two, three = chain(2), chain(3)
    X = point_space(two)
    Y = discrete_space([three, three], labels=["left", "right"])
    squash = Hom(three, two, (0, 1, 1))
    f = ModelledMap(X, Y, (0,), (squash,))
    g = ModelledMap(X, Y, (1,), (squash,))
    return f, g


# ---------------------------------------------------------------------------
# T₀ limits


@dataclass(eq=False)
class Limit:
    apex: ModelledSpace
    legs: list


def _coproduct_many(models):
    C = models[0]
    coprojs = [Hom.identity(C)]
    for M in models[1:]:
        C2, i1, i2 = model_coproduct(C, M)
        coprojs = [h.then(i1) for h in coprojs] + [i2]
        C = C2
    return C, coprojs


def product_spaces(ctx, Xs: Sequence[ModelledSpace]) -> Limit:
    """T₀ product: product poset with stalks the coproducts of the factor stalks."""
    if not Xs:
        kind = _kind_of(ctx)
        return Limit(point_space(initial_model(kind)), [])
    kind = Xs[0].kind
    pts = list(itertools.product(*(range(X.n) for X in Xs)))
    n = len(pts)
    leq = tuple(
        tuple(all(X.leq[a][b] for X, a, b in zip(Xs, z, w)) for w in pts) for z in pts
    )
    stalks, coprojs = [], []
    for z in pts:
        C, cps = _coproduct_many([X.stalks[a] for X, a in zip(Xs, z)])
        stalks.append(C)
        coprojs.append(cps)
    trans = {}
    for i, z in enumerate(pts):
        for j, w in enumerate(pts):
            if leq[i][j] and i != j:
                partial = {}
                for k, X in enumerate(Xs):
                    t = X.transition(z[k], w[k])
                    for a in X.stalks[z[k]].elements:
                        partial[coprojs[i][k].map[a]] = coprojs[j][k].map[t.map[a]]
                h = extend_hom(stalks[i], stalks[j], partial)
                if h is None:
                    raise AssertionError("induced transition between coproduct stalks failed")
                trans[(i, j)] = h
    Z = ModelledSpace(kind, [tuple(X.points[a] for X, a in zip(Xs, z)) for z in pts], leq, stalks, trans)
    legs = [
        ModelledMap(Z, X, tuple(z[k] for z in pts), tuple(coprojs[i][k] for i in range(n)))
        for k, X in enumerate(Xs)
    ]
    return Limit(Z, legs)


def product_mediator(lim: Limit, cone: Sequence[ModelledMap]) -> ModelledMap | None:
    Z = lim.apex
    V = cone[0].source
    pts = {tuple(leg.point_map[i] for leg in lim.legs): i for i in range(Z.n)}
    f, flat = [], []
    for v in range(V.n):
        i = pts[tuple(a.point_map[v] for a in cone)]
        partial = {}
        for leg, a in zip(lim.legs, cone):
            cp = leg.flat[i]
            for s in cp.source.elements:
                partial[cp.map[s]] = a.flat[v].map[s]
        h = extend_hom(Z.stalks[i], V.stalks[v], partial)
        if h is None:
            return None
        f.append(i)
        flat.append(h)
    return ModelledMap(V, Z, tuple(f), tuple(flat))


def verify_limit(lim: Limit, targets: Sequence[ModelledSpace], probes, ctx=None, compatible=None) -> bool:
    """Every cone from a probe factors uniquely through the limit.

    ``compatible(cone)`` filters tuples of maps that form cones over the diagram.
    With ``ctx`` all maps are taken admissible.
    """
    for V in probes:
        hom_sets = [list(enumerate_maps(V, X, ctx)) for X in targets]
        us = list(enumerate_maps(V, lim.apex, ctx))
        for cone in itertools.product(*hom_sets):
            if compatible is not None and not compatible(cone):
                continue
            hits = sum(1 for u in us if all(u.then(leg).same_as(a) for leg, a in zip(lim.legs, cone)))
            if hits != 1:
                return False
    return True


def equalizer_spaces(ctx, f: ModelledMap, g: ModelledMap) -> Limit:
    """T₀ equalizer of f, g: (Y,Q) ⇉ (X,P).

    Points where f and g agree, with the induced order; the stalk at y is Q_y
    modulo the congruence generated by f♭_y(s) ~ g♭_y(s).
    """
    Y = f.source
    E_pts = [y for y in range(Y.n) if f.point_map[y] == g.point_map[y]]
    stalks, quots = [], []
    for y in E_pts:
        fl, gl = f.flat[y], g.flat[y]
        Qe, q = quotient_by_pairs(Y.stalks[y], [(fl.map[s], gl.map[s]) for s in fl.source.elements])
        stalks.append(Qe)
        quots.append(q)
    k = len(E_pts)
    leq = tuple(tuple(Y.leq[a][b] for b in E_pts) for a in E_pts)
    trans = {}
    for i, a in enumerate(E_pts):
        for j, b in enumerate(E_pts):
            if leq[i][j] and i != j:
                t = Y.transition(a, b)
                trans[(i, j)] = Hom(
                    stalks[i], stalks[j], tuple(quots[j].map[t.map[x]] for x in _sections_of(quots[i]))
                )
    E = ModelledSpace(Y.kind, [Y.points[y] for y in E_pts], leq, stalks, trans)
    e = ModelledMap(E, Y, tuple(E_pts), tuple(quots))
    if k and not all(h.is_valid() for h in trans.values()):
        raise AssertionError("equalizer transitions are not homs")
    return Limit(E, [e])


def _sections_of(q: Hom) -> list[int]:
    pre = [-1] * q.target.size
    for x in q.source.elements:
        if pre[q.map[x]] == -1:
            pre[q.map[x]] = x
    return pre


def pullback_spaces(ctx, g: ModelledMap, f: ModelledMap) -> Limit:
    """T₀ pullback of (Z,R) -g-> (X,P) <-f- (Y,Q), as an equalizer in the product.

    Legs: [to Z, to Y]."""
    prod = product_spaces(ctx, [g.source, f.source])
    a, b = prod.legs
    eq = equalizer_spaces(ctx, a.then(g), b.then(f))
    e = eq.legs[0]
    return Limit(eq.apex, [e.then(a), e.then(b)])


def small_probe_spaces(kind: str, models: Sequence, max_points: int = 2) -> list[ModelledSpace]:
    """Probe spaces for universal-property checks: points, 2-chains and
    2-point discrete spaces built from ``models`` with their valid transitions,
    plus the 3-point posets with constant stalks when ``max_points >= 3``."""
    out = [empty_space(kind)] if max_points >= 0 else []
    for M in models:
        out.append(point_space(M))
    if max_points >= 2:
        for M, N in itertools.product(models, repeat=2):
            out.append(discrete_space([M, N]))
            for t in enumerate_homs(M, N)[:2]:
                out.append(ModelledSpace(kind, [0, 1], ((True, True), (False, True)), [M, N], {(0, 1): t}))
    if max_points >= 3:
        # three-point shapes with a single stalk and identity transitions
        shapes = [
            [(0, 1), (1, 2), (0, 2)],
            [(0, 1), (0, 2)],
            [(0, 2), (1, 2)],
            [(0, 1)],
            [],
        ]
        for M in models:
            ident = Hom.identity(M)
            for rel in shapes:
                le = tuple(tuple(a == b or (a, b) in rel for b in range(3)) for a in range(3))
                out.append(ModelledSpace(kind, [0, 1, 2], le, [M, M, M], {r: ident for r in rel}))
    return out
