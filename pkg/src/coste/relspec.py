"""Relative spectra of finite modelled spaces.

Given maps f_i: (Y,Q) -> (X_i,P_i) into T-modelled spaces, the points of the
spectrum are pairs (y, ν) with ν a point of Spec(Q_y) whose pullback along
every (f_i)♭_y is the trivial ideal.  With one leg this is the relative
spectrum over a base; with none it is the unbased spectrum; over a T₀ limit
cone it is the limit in the admissible category.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .context import get_context
from .finmodel import Hom, ModelError
from .space import (
    Limit,
    enumerate_maps,
    is_admissible_map,
    is_T_modelled,
    product_spaces,
    pullback_spaces,
)
from .spectrum import (
    ModelledMap,
    ModelledSpace,
    Sections,
    SpaceError,
    _check_open,
    _pointwise_model,
    comparison_hom,
    sections,
)


@dataclass(eq=False)
class RelativeSpectrum:
    context: object
    base: ModelledSpace
    space: ModelledSpace
    g: ModelledMap
    legs: list
    point_data: list = field(repr=False)
    base_maps: list = field(default_factory=list, repr=False)

    @property
    def leg(self) -> ModelledMap:
        """The structural map to the (single) base, f ∘ g."""
        return self.legs[0]

    def point_index(self, y: int, nu) -> int:
        for i, (y2, nu2) in enumerate(self.point_data):
            if y2 == y and nu2 == nu:
                return i
        raise KeyError((y, nu))

    @cached_property
    def basic_opens(self) -> list[tuple]:
        """All (V, λ, D(V, λ)) with V open in Y and λ in V of the sections over V."""
        c, Y = self.context, self.base
        out = []
        for V in Y.opens:
            secs = sections(Y, V)
            if secs.model.kind != c.sort:
                continue
            S = c.etale_semilattice(secs.model)
            projs = {y: secs.projection(y) for y in V}
            for lam in S:
                D = frozenset(
                    i
                    for i, (y, nu) in enumerate(self.point_data)
                    if y in V
                    and c.etale_semilattice(Y.stalks[y]).leq(c.pushforward(projs[y], lam), nu)
                )
                out.append((V, lam, D))
        return out

    def order_from_basis(self) -> tuple:
        n = self.space.n
        opens = [D for _, _, D in self.basic_opens]
        return tuple(
            tuple(all(j in D for D in opens if i in D) for j in range(n)) for i in range(n)
        )

    def basis_law_holds(self) -> bool:
        """D(V,λ) ∩ D(V',λ') = D(V∩V', μ ∨ μ') for every pair of basic opens."""
        c, Y = self.context, self.base
        table = {(V, lam): D for V, lam, D in self.basic_opens}
        sec_cache = {}

        def secs(V):
            if V not in sec_cache:
                sec_cache[V] = sections(Y, V)
            return sec_cache[V]

        for (V, lam, D), (V2, lam2, D2) in itertools.product(self.basic_opens, repeat=2):
            W = V & V2
            sW = secs(W)
            r1 = secs(V).restriction(sW)
            r2 = secs(V2).restriction(sW)
            SW = c.etale_semilattice(sW.model)
            mu = SW.join(c.pushforward(r1, lam), c.pushforward(r2, lam2))
            if table[(W, mu)] != D & D2:
                return False
        return True


def cone_spec(ctx, Y: ModelledSpace, legs: Sequence[ModelledMap], check: bool = True) -> RelativeSpectrum:
    """Spectrum of (Y,Q) relative to a cone of maps into T-modelled spaces."""
    kind = Y.kind
    c = get_context(ctx, Y.stalks[0]) if Y.n else get_context(ctx)
    if check:
        for leg in legs:
            if not is_T_modelled(c, leg.target):
                raise ModelError("the base of a relative spectrum must be T-modelled")
    point_data = []
    for y in range(Y.n):
        S = c.etale_semilattice(Y.stalks[y])
        for nu in S:
            if not c.is_T_model(nu.codomain):
                continue
            ok = True
            for leg in legs:
                flat = leg.flat[y]
                for lam in c.etale_semilattice(flat.source):
                    if not lam.is_identity and S.leq(c.pushforward(flat, lam), nu):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                point_data.append((y, nu))
    n = len(point_data)
    leq, trans = [], {}
    for i, (y, nu) in enumerate(point_data):
        row = []
        for j, (y2, nu2) in enumerate(point_data):
            if not Y.leq[y][y2]:
                row.append(False)
                continue
            t = Y.transition(y, y2)
            le = c.etale_semilattice(Y.stalks[y2]).leq(c.pushforward(t, nu), nu2)
            row.append(le)
            if le:
                trans[(i, j)] = comparison_hom(nu, t, nu2)
        leq.append(tuple(row))
    space = ModelledSpace(
        kind,
        [(Y.points[y], nu.tag) for y, nu in point_data],
        tuple(leq),
        [nu.codomain for _, nu in point_data],
        trans,
    )
    g = ModelledMap(space, Y, tuple(y for y, _ in point_data), tuple(nu.hom for _, nu in point_data))
    out_legs = [g.then(leg) for leg in legs]
    rs = RelativeSpectrum(c, Y, space, g, out_legs, point_data, list(legs))
    if check:
        space.validate()
        if not is_T_modelled(c, space):
            raise AssertionError("relative spectrum has a stalk that is not a T-model")
        for leg in out_legs:
            if not is_admissible_map(c, leg):
                raise AssertionError("structural map of the relative spectrum is not admissible")
        if rs.order_from_basis() != space.leq:
            raise AssertionError("specialization order disagrees with the D(V, λ) basis")
    return rs


def relative_spec(ctx, f: ModelledMap, check: bool = True) -> RelativeSpectrum:
    return cone_spec(ctx, f.source, [f], check=check)


def unbased_spec(ctx, Y: ModelledSpace, check: bool = True) -> RelativeSpectrum:
    return cone_spec(ctx, Y, [], check=check)


def relative_sections_local(rs: RelativeSpectrum, W=None) -> Sections:
    """Sections over W given by local agreement with some t ∈ (QV)_λ on a
    basic open D(V, λ) ⊆ W."""
    X = rs.space
    W = _check_open(X, range(X.n) if W is None else W)
    Wset = set(W)
    pos = {p: k for k, p in enumerate(W)}
    c, Y = rs.context, rs.base
    patches_at: dict[int, list[dict]] = {p: [] for p in W}
    for V, lam, D in rs.basic_opens:
        if not D or not D <= Wset:
            continue
        secs = sections(Y, V)
        for t in lam.codomain.elements:
            x = lam.section[t]
            patch = {}
            for q in D:
                y, nu = rs.point_data[q]
                patch[q] = nu.hom.map[secs.projection(y).map[x]]
            for q in D:
                patches_at[q].append(patch)
    found = set()
    cur: dict[int, int] = {}

    def rec(t):
        if t == len(W):
            fam = tuple(cur[p] for p in W)
            if all(
                any(all(fam[pos[q]] == v for q, v in patch.items()) for patch in patches_at[p])
                for p in W
            ):
                found.add(fam)
            return
        p = W[t]
        tried = set()
        for patch in patches_at[p]:
            if any(cur.get(q, v) != v for q, v in patch.items()):
                continue
            key = tuple(sorted(patch.items()))
            if key in tried:
                continue
            tried.add(key)
            added = [q for q in patch if q not in cur]
            for q in added:
                cur[q] = patch[q]
            rec(t + 1)
            for q in added:
                del cur[q]

    rec(0)
    values = sorted(found)
    return Sections(X, W, _pointwise_model(X.kind, [X.stalks[p] for p in W], values), values)


# ---------------------------------------------------------------------------
# the adjunction


def transpose(ctx, rs: RelativeSpectrum, k: ModelledMap, h: ModelledMap, check: bool = True) -> ModelledMap:
    """The unique admissible h̄: (Z,R) -> Spec(f) over the base with g ∘ h̄ = h."""
    c = rs.context
    Z = h.source
    if check:
        if not h.then(rs.base_maps[0]).same_as(k):
            raise SpaceError("triangle f ∘ h = k does not commute")
        if not is_T_modelled(c, Z):
            raise ModelError("the source of a transpose must be T-modelled")
    pts, flat = [], []
    for z in range(Z.n):
        y = h.point_map[z]
        hz = h.flat[z]
        S = c.etale_semilattice(hz.source)
        J = S.join_all(mu for mu in S if c.pushforward(hz, mu).is_identity)
        i = rs.point_index(y, J)
        pts.append(i)
        flat.append(Hom(J.codomain, hz.target, tuple(hz.map[x] for x in J.section)))
    u = ModelledMap(Z, rs.space, tuple(pts), tuple(flat))
    if check:
        u.validate()
        if not is_admissible_map(c, u):
            raise AssertionError("transpose is not admissible")
    return u


def adjunction_census(ctx, f: ModelledMap, Z: ModelledSpace, k: ModelledMap) -> dict:
    """Compare Hom_{T₀/X}(Z, Y) with Hom_{A/X}(Z, Spec f) for one triangle."""
    rs = relative_spec(ctx, f)
    left = [h for h in enumerate_maps(Z, f.source) if h.then(f).same_as(k)]
    right = [u for u in enumerate_maps(Z, rs.space, ctx) if u.then(rs.leg).same_as(k)]
    forward_ok = all(transpose(ctx, rs, k, h).then(rs.g).same_as(h) for h in left)
    backward_ok = all(transpose(ctx, rs, k, u.then(rs.g)).same_as(u) for u in right)
    ident = transpose(ctx, rs, rs.leg, rs.g).same_as(ModelledMap.identity(rs.space))
    return {
        "left": len(left),
        "right": len(right),
        "equal": len(left) == len(right),
        "transpose_then_g": forward_ok,
        "g_then_transpose": backward_ok,
        "triangle_identity": ident,
        "ok": len(left) == len(right) and forward_ok and backward_ok and ident,
    }


# ---------------------------------------------------------------------------
# limits in the admissible category


def admissible_product(ctx, Xs: Sequence[ModelledSpace]) -> tuple[Limit, RelativeSpectrum]:
    """Product of T-modelled spaces: the cone spectrum over the T₀ product."""
    T0 = product_spaces(ctx, Xs)
    rs = cone_spec(ctx, T0.apex, T0.legs)
    return Limit(rs.space, rs.legs), rs


def pullback_spectra_check(ctx, g: ModelledMap, f: ModelledMap, probes: Sequence[ModelledSpace] = ()) -> dict:
    """Spec(h) over (Z,R) with the induced map to Spec(f) is a pullback of
    Spec(f) -> (X,P) along the admissible g: (Z,R) -> (X,P)."""
    c = get_context(ctx, g.target.stalks[0]) if g.target.n else get_context(ctx)
    if not is_admissible_map(c, g):
        raise ModelError("g must be admissible")
    W = pullback_spaces(c, g, f)
    hW, fW = W.legs
    Sh = relative_spec(c, hW)
    Sf = relative_spec(c, f)
    k = Sh.leg.then(g)
    top = transpose(c, Sf, k, Sh.g.then(fW))
    commutes = top.then(Sf.leg).same_as(Sh.leg.then(g))
    universal = True
    cones = 0
    for V in probes:
        if not is_T_modelled(c, V):
            continue
        us = list(enumerate_maps(V, Sh.space, c))
        for a in enumerate_maps(V, g.source, c):
            for b in enumerate_maps(V, Sf.space, c):
                if not a.then(g).same_as(b.then(Sf.leg)):
                    continue
                cones += 1
                hits = sum(1 for u in us if u.then(Sh.leg).same_as(a) and u.then(top).same_as(b))
                if hits != 1:
                    universal = False
    return {
        "pullback_points": W.apex.n,
        "spec_h_points": Sh.space.n,
        "spec_f_points": Sf.space.n,
        "commutes": commutes,
        "cones_checked": cones,
        "universal": universal,
        "ok": commutes and universal,
        "spec_h": Sh,
        "spec_f": Sf,
        "top": top,
    }


# ---------------------------------------------------------------------------
# a fixed corpus of small triangles


@dataclass(frozen=True)
class Triangle:
    name: str
    context: str
    f: ModelledMap
    Z: ModelledSpace
    k: ModelledMap


def triangle_corpus(per_case: int = 1) -> list[Triangle]:
    """Triangles Z -k-> X <-f- Y with at most two points per space and stalks
    of size at most 8, over rings (Zariski) and lattices (DL)."""
    from .finmodel import chain, diamond, dual_numbers, enumerate_homs, make_zmod, ring_product
    from .spectrum import discrete_space, point_space, spec

    F2, F3, Z4 = make_zmod(2), make_zmod(3), make_zmod(4)
    eps = dual_numbers(2)
    chain_local = ModelledSpace("ring", ["g", "s"], ((True, True), (False, True)), [Z4, F2],
                                {(0, 1): enumerate_homs(Z4, F2)[0]})
    ring_bases = [
        ("F2", point_space(F2)),
        ("Z4", point_space(Z4)),
        ("F3", point_space(F3)),
        ("F2[e]", point_space(eps)),
        ("Spec Z6", spec("zariski", make_zmod(6))),
        ("Z4>F2", chain_local),
    ]
    ring_totals = [
        ("F2", point_space(F2)),
        ("Z4", point_space(Z4)),
        ("F2xF2", point_space(ring_product([F2, F2]))),
        ("Z6", point_space(make_zmod(6))),
        ("F2[e]", point_space(eps)),
        ("F2+F2", discrete_space([F2, F2])),
        ("Z8", point_space(make_zmod(8))),
    ]
    ring_sources = [
        ("F2", point_space(F2)),
        ("Z4", point_space(Z4)),
        ("F3", point_space(F3)),
        ("F2+F2", discrete_space([F2, F2])),
    ]
    two, three = chain(2), chain(3)
    lat_bases = [("2", point_space(two)), ("3", point_space(three))]
    lat_totals = [
        ("M", point_space(diamond())),
        ("2+2", discrete_space([two, two])),
        ("3", point_space(three)),
    ]
    lat_sources = [("2", point_space(two)), ("3", point_space(three))]

    out = []
    for ctx, bases, totals, sources in (
        ("zariski", ring_bases, ring_totals, ring_sources),
        ("dl", lat_bases, lat_totals, lat_sources),
    ):
        for (bn, X), (yn, Y), (zn, Z) in itertools.product(bases, totals, sources):
            fs = list(itertools.islice(enumerate_maps(Y, X), per_case))
            ks = list(itertools.islice(enumerate_maps(Z, X, ctx), per_case))
            for i, f in enumerate(fs):
                for j, k in enumerate(ks):
                    out.append(Triangle(f"{ctx}: {zn} -> {bn} <- {yn} [{i},{j}]", ctx, f, Z, k))
    return out
