"""Spectra of finite models as finite modelled spaces.

A finite T₀ space is a poset under specialization (``x ≤ y`` iff ``x`` lies
in the closure of ``y``); opens are up-sets.  A sheaf of models on it is a
functor from the poset to models, so a modelled space is stored as stalks
plus transition homs ``P_x -> P_y`` for ``x ≤ y``.  Sections over an open are
computed on demand as the limit of that functor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .context import EtaleArrow, get_context
from .finmodel import (
    Hom,
    ModelError,
    enumerate_homs,
    lattice_from_elements,
    ring_from_elements,
)
from .semilattice import reticulation


class SpaceError(ValueError):
    """Malformed modelled space or map."""


# ---------------------------------------------------------------------------
# modelled spaces and maps


@dataclass(eq=False)
class ModelledSpace:
    kind: str
    points: list
    leq: tuple
    stalks: list
    transitions: dict = field(repr=False)

    def __post_init__(self):
        n = len(self.points)
        if len(self.stalks) != n or len(self.leq) != n:
            raise SpaceError("points, order and stalks have different lengths")
        for i in range(n):
            self.transitions.setdefault((i, i), Hom.identity(self.stalks[i]))

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def transition(self, i: int, j: int) -> Hom:
        return self.transitions[(i, j)]

    def up(self, i: int) -> frozenset:
        return frozenset(j for j in range(self.n) if self.leq[i][j])

    def is_open(self, U: Iterable[int]) -> bool:
        U = set(U)
        return all(self.leq[i][j] <= (j in U) for i in U for j in range(self.n))

    @cached_property
    def opens(self) -> list[frozenset]:
        out = []
        for mask in range(1 << self.n):
            U = frozenset(i for i in range(self.n) if mask >> i & 1)
            if self.is_open(U):
                out.append(U)
        return out

    def minimal(self, U: Iterable[int]) -> list[int]:
        U = sorted(U)
        return [i for i in U if not any(j != i and self.leq[j][i] for j in U)]

    def validate(self) -> None:
        n = self.n
        le = self.leq
        for i in range(n):
            if not le[i][i]:
                raise SpaceError("order is not reflexive")
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    raise SpaceError("order is not antisymmetric (space not T0)")
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        raise SpaceError("order is not transitive")
        for (i, j), h in self.transitions.items():
            if not le[i][j]:
                raise SpaceError(f"transition {i}->{j} between incomparable points")
            if h.source != self.stalks[i] or h.target != self.stalks[j] or not h.is_valid():
                raise SpaceError(f"transition {i}->{j} is not a hom between the stalks")
        for i in range(n):
            for j in range(n):
                if le[i][j] and (i, j) not in self.transitions:
                    raise SpaceError(f"missing transition {i}->{j}")
                for k in range(n):
                    if le[i][j] and le[j][k]:
                        if self.transition(i, j).then(self.transition(j, k)).map != self.transition(i, k).map:
                            raise SpaceError("transitions do not compose")


def empty_space(kind: str) -> ModelledSpace:
    return ModelledSpace(kind, [], (), [], {})


def point_space(M, label="*") -> ModelledSpace:
    return ModelledSpace(M.kind, [label], ((True,),), [M], {})


def discrete_space(stalks: Sequence, labels=None) -> ModelledSpace:
    n = len(stalks)
    labels = list(labels) if labels is not None else list(range(n))
    kind = stalks[0].kind if stalks else "ring"
    return ModelledSpace(kind, labels, tuple(tuple(i == j for j in range(n)) for i in range(n)), list(stalks), {})


@dataclass(eq=False)
class ModelledMap:
    """(f, f♭): f maps points of ``source`` to ``target``; ``flat[x]: Q_{f x} -> P_x``."""

    source: ModelledSpace
    target: ModelledSpace
    point_map: tuple
    flat: tuple

    def validate(self) -> None:
        X, Y, f = self.source, self.target, self.point_map
        if len(f) != X.n or len(self.flat) != X.n:
            raise SpaceError("point map / comparison list has the wrong length")
        for x in range(X.n):
            h = self.flat[x]
            if h.source != Y.stalks[f[x]] or h.target != X.stalks[x] or not h.is_valid():
                raise SpaceError(f"comparison at point {x} is not a hom Q_fx -> P_x")
        for x in range(X.n):
            for x2 in range(X.n):
                if X.leq[x][x2]:
                    if not Y.leq[f[x]][f[x2]]:
                        raise SpaceError("point map is not monotone")
                    lhs = self.flat[x].then(X.transition(x, x2))
                    rhs = Y.transition(f[x], f[x2]).then(self.flat[x2])
                    if lhs.map != rhs.map:
                        raise SpaceError(f"naturality fails on {x} <= {x2}")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except SpaceError:
            return False
        return True

    def then(self, other: "ModelledMap") -> "ModelledMap":
        """The composite ``other ∘ self``."""
        f = self.point_map
        return ModelledMap(
            self.source,
            other.target,
            tuple(other.point_map[y] for y in f),
            tuple(other.flat[f[x]].then(self.flat[x]) for x in range(self.source.n)),
        )

    def same_as(self, other: "ModelledMap") -> bool:
        return self.point_map == other.point_map and all(
            a.map == b.map for a, b in zip(self.flat, other.flat)
        )

    @staticmethod
    def identity(X: ModelledSpace) -> "ModelledMap":
        return ModelledMap(X, X, tuple(range(X.n)), tuple(Hom.identity(P) for P in X.stalks))


# ---------------------------------------------------------------------------
# sections


@dataclass(eq=False)
class Sections:
    space: ModelledSpace
    open: tuple
    model: object
    values: list

    def projection(self, p: int) -> Hom:
        k = self.open.index(p)
        return Hom(self.model, self.space.stalks[p], tuple(v[k] for v in self.values))

    def restriction(self, other: "Sections") -> Hom:
        pos = [self.open.index(p) for p in other.open]
        idx = {v: i for i, v in enumerate(other.values)}
        return Hom(self.model, other.model, tuple(idx[tuple(v[k] for k in pos)] for v in self.values))

    def index_of(self, family: Sequence[int]) -> int:
        return self.values.index(tuple(family))


def _pointwise_model(kind, stalks, values):
    if kind == "ring":
        return ring_from_elements(
            values,
            lambda s, t: tuple(P.add[a][b] for P, a, b in zip(stalks, s, t)),
            lambda s, t: tuple(P.mul[a][b] for P, a, b in zip(stalks, s, t)),
            tuple(P.zero for P in stalks),
            tuple(P.one for P in stalks),
        )
    return lattice_from_elements(
        values, lambda s, t: all(P.leq[a][b] for P, a, b in zip(stalks, s, t))
    )


def _check_open(X: ModelledSpace, U) -> tuple:
    U = tuple(sorted(set(U)))
    if not X.is_open(U):
        raise SpaceError("sections are only defined over open (up-closed) sets")
    return U


def sections(X: ModelledSpace, U: Iterable[int] | None = None) -> Sections:
    """Limit of the stalk functor over the open ``U`` (default: everything)."""
    U = _check_open(X, range(X.n) if U is None else U)
    pos = {p: k for k, p in enumerate(U)}
    mins = X.minimal(U)
    values: list[tuple] = []
    cur = [-1] * len(U)

    def rec(t):
        if t == len(mins):
            values.append(tuple(cur))
            return
        m = mins[t]
        for a in X.stalks[m].elements:
            changed = []
            ok = True
            for p in U:
                if X.leq[m][p]:
                    b = X.transition(m, p).map[a]
                    k = pos[p]
                    if cur[k] == -1:
                        cur[k] = b
                        changed.append(k)
                    elif cur[k] != b:
                        ok = False
                        break
            if ok:
                rec(t + 1)
            for k in changed:
                cur[k] = -1

    rec(0)
    values.sort()
    stalks = [X.stalks[p] for p in U]
    return Sections(X, U, _pointwise_model(X.kind, stalks, values), values)


def gamma(X: ModelledSpace):
    return sections(X).model


# ---------------------------------------------------------------------------
# spectra


@dataclass(eq=False)
class SpecSpace(ModelledSpace):
    context: object = None
    model: object = None
    arrows: list = field(default_factory=list, repr=False)
    semilattice: object = field(default=None, repr=False)

    @cached_property
    def reticulation(self):
        return reticulation(self.context, self.model)

    def D(self, lam: EtaleArrow | int) -> frozenset:
        """Basic open of λ: the points whose ideal contains λ."""
        i = lam if isinstance(lam, int) else lam.index
        le = self.semilattice.leq_matrix
        return frozenset(k for k, mu in enumerate(self.arrows) if le[i][mu.index])

    @cached_property
    def compact_opens(self):
        """Up-sets of the finite point poset, as a lattice under inclusion."""
        return lattice_from_elements(self.opens, lambda a, b: a <= b)

    def point_of(self, lam: EtaleArrow) -> int:
        return self.arrows.index(lam)


def points_by_covering(ctx, A) -> list[int]:
    """Arrows ν such that ↓ν meets every covering family of each of its members."""
    c = get_context(ctx, A)
    S = c.etale_semilattice(A)
    le = S.leq_matrix
    out = []
    for nu in S:
        good = True
        for lam in S:
            if not le[lam.index][nu.index]:
                continue
            for fam in c.covering_families(A, lam):
                if not any(le[mu.index][nu.index] for mu in fam.covers):
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(nu.index)
    return out


def spec(ctx, A) -> SpecSpace:
    c = get_context(ctx, A)
    S = c.etale_semilattice(A)
    direct = [mu.index for mu in S if c.is_T_model(mu.codomain)]
    by_cover = points_by_covering(c, A)
    if direct != by_cover:
        raise AssertionError(
            f"point criteria disagree for {c.name}: T-model test {direct}, coverings {by_cover}"
        )
    arrows = [S[i] for i in direct]
    le = S.leq_matrix
    n = len(arrows)
    leq = tuple(tuple(le[a.index][b.index] for b in arrows) for a in arrows)
    trans = {}
    for i, a in enumerate(arrows):
        for j, b in enumerate(arrows):
            if leq[i][j]:
                trans[(i, j)] = S.transition(a, b)
    return SpecSpace(
        A.kind,
        [a.tag for a in arrows],
        leq,
        [a.codomain for a in arrows],
        trans,
        context=c,
        model=A,
        arrows=arrows,
        semilattice=S,
    )


def sections_local(X: SpecSpace, U: Iterable[int] | None = None) -> Sections:
    """Families that agree near every point with the image of a single a ∈ A_λ
    on some basic open D_λ inside U."""
    U = _check_open(X, range(X.n) if U is None else U)
    Uset = set(U)
    S = X.semilattice
    # patches: (λ, a) -> values on D_λ
    patches_at: dict[int, set] = {p: set() for p in U}
    for lam in S:
        D = X.D(lam)
        if not D or not D <= Uset:
            continue
        for a in lam.codomain.elements:
            patch = tuple(sorted((q, S.transition(lam, X.arrows[q]).map[a]) for q in D))
            for q in D:
                patches_at[q].add(patch)
    order = {p: sorted(patches_at[p]) for p in U}
    found = set()
    cur: dict[int, int] = {}

    # the patch chosen at p stays consistent with everything set later, so
    # each finished family is covered near every point by construction
    def rec(t):
        if t == len(U):
            found.add(tuple(cur[p] for p in U))
            return
        p = U[t]
        tried = set()
        for patch in order[p]:
            if any(cur.get(q, v) != v for q, v in patch):
                continue
            added = tuple((q, v) for q, v in patch if q not in cur)
            if added in tried:
                continue
            tried.add(added)
            for q, v in added:
                cur[q] = v
            rec(t + 1)
            for q, _ in added:
                del cur[q]

    rec(0)
    values = sorted(found)
    stalks = [X.stalks[p] for p in U]
    return Sections(X, U, _pointwise_model(X.kind, stalks, values), values)


def unit_eta(ctx, A) -> Hom:
    X = spec(ctx, A)
    G = sections(X)
    fams = [tuple(mu.hom.map[a] for mu in X.arrows) for a in A.elements]
    idx = {v: i for i, v in enumerate(G.values)}
    for v in fams:
        if v not in idx:
            raise AssertionError("unit family is not compatible with the transitions")
    return Hom(A, G.model, tuple(idx[v] for v in fams))


def _localization_to_sections(X: SpecSpace, lam: EtaleArrow) -> Hom:
    S = X.semilattice
    sec = sections(X, X.D(lam))
    idx = {v: i for i, v in enumerate(sec.values)}
    m = []
    for b in lam.codomain.elements:
        v = tuple(S.transition(lam, X.arrows[q]).map[b] for q in sec.open)
        m.append(idx[v])
    return Hom(lam.codomain, sec.model, tuple(m))


def sheaf_condition_holds(ctx, A, lam: EtaleArrow, fam) -> bool:
    """A_λ is the equalizer of ∏ A_{μ_i} ⇉ ∏ A_{μ_i ∨ μ_j}."""
    c = get_context(ctx, A)
    S = c.etale_semilattice(A)
    covers = list(fam.covers)
    restr = [S.transition(lam, mu) for mu in covers]
    images = {tuple(r.map[a] for r in restr) for a in lam.codomain.elements}
    if len(images) != lam.codomain.size:
        return False
    compatible = set()
    for fam_vals in itertools.product(*(mu.codomain.elements for mu in covers)):
        ok = True
        for i, j in itertools.combinations(range(len(covers)), 2):
            w = S.join(covers[i], covers[j])
            if S.transition(covers[i], w).map[fam_vals[i]] != S.transition(covers[j], w).map[fam_vals[j]]:
                ok = False
                break
        if ok:
            compatible.add(tuple(fam_vals))
    return compatible == images


def standardness_witness(ctx, A) -> dict:
    c = get_context(ctx, A)
    X = spec(c, A)
    S = X.semilattice
    per_lambda = {}
    for lam in S:
        h = _localization_to_sections(X, lam)
        per_lambda[lam.tag] = h.is_bijective and h.is_valid()
    eta = unit_eta(c, A)
    sheaf = all(
        sheaf_condition_holds(c, A, lam, fam) for lam in S for fam in c.covering_families(A, lam)
    )
    return {
        "context": c.name,
        "sections_iso": per_lambda,
        "all_sections_iso": all(per_lambda.values()),
        "eta_iso": eta.is_bijective,
        "sheaf_condition": sheaf,
        "standard": all(per_lambda.values()) and eta.is_bijective and sheaf,
    }


# ---------------------------------------------------------------------------
# functoriality and factorization


def comparison_hom(lam: EtaleArrow, alpha: Hom, nu: EtaleArrow) -> Hom:
    """A_λ -> B_ν induced by α when the kernel of λ lands in that of ν."""
    return Hom(lam.codomain, nu.codomain, tuple(nu.hom.map[alpha.map[x]] for x in lam.section))


def pullback_point(ctx, alpha: Hom, nu: EtaleArrow) -> EtaleArrow:
    """max{λ ∈ V_A : α_*(λ) ≤ ν}."""
    c = get_context(ctx, alpha.source)
    SA = c.etale_semilattice(alpha.source)
    SB = c.etale_semilattice(alpha.target)
    return SA.join_all(lam for lam in SA if SB.leq(c.pushforward(alpha, lam), nu))


def spec_of_hom(ctx, alpha: Hom, XA: SpecSpace | None = None, XB: SpecSpace | None = None) -> ModelledMap:
    """Spec(α): Spec(B) -> Spec(A) with comparisons A_{α̃ν} -> B_ν."""
    c = get_context(ctx, alpha.source)
    XA = XA or spec(c, alpha.source)
    XB = XB or spec(c, alpha.target)
    f, flat = [], []
    for nu in XB.arrows:
        lam = pullback_point(c, alpha, nu)
        if lam not in XA.arrows:
            raise AssertionError("pulled-back ideal is not a point of the spectrum")
        h = comparison_hom(lam, alpha, nu)
        if not c.is_admissible(h):
            raise AssertionError("comparison hom of Spec(α) is not admissible")
        f.append(XA.point_of(lam))
        flat.append(h)
    return ModelledMap(XB, XA, tuple(f), tuple(flat))


@dataclass(frozen=True)
class Factorization:
    middle: EtaleArrow
    first: Hom
    second: Hom


def factorize(ctx, alpha: Hom) -> Factorization:
    c = get_context(ctx, alpha.source)
    if not c.is_T_model(alpha.target):
        raise ModelError("factorization needs a T-model as codomain")
    SA = c.etale_semilattice(alpha.source)
    mu = SA.join_all(lam for lam in SA if c.pushforward(alpha, lam).is_identity)
    second = Hom(mu.codomain, alpha.target, tuple(alpha.map[x] for x in mu.section))
    if not second.is_valid() or not c.is_admissible(second):
        raise AssertionError("second leg of the factorization is not admissible")
    return Factorization(mu, mu.hom, second)


def factorization_is_initial(ctx, alpha: Hom, fac: Factorization | None = None) -> bool:
    """Every A -> A_λ -> B factors uniquely through A_μ, compatibly with both legs."""
    c = get_context(ctx, alpha.source)
    fac = fac or factorize(c, alpha)
    SA = c.etale_semilattice(alpha.source)
    for lam in SA:
        legs = [g for g in enumerate_homs(lam.codomain, alpha.target) if lam.hom.then(g).map == alpha.map]
        for g in legs:
            bridges = [
                t
                for t in enumerate_homs(lam.codomain, fac.middle.codomain)
                if lam.hom.then(t).map == fac.first.map and t.then(fac.second).map == g.map
            ]
            if len(bridges) != 1:
                return False
    return True


def d_is_order_reflecting(X: SpecSpace) -> bool:
    """D_λ ⊆ D_μ implies μ ≤ λ in V_A."""
    S = X.semilattice
    return all(
        S.leq(mu, lam) for lam in S for mu in S if X.D(lam) <= X.D(mu)
    )


# ---------------------------------------------------------------------------
# isomorphism of modelled spaces


def find_space_isomorphism(X: ModelledSpace, Y: ModelledSpace) -> ModelledMap | None:
    """An invertible modelled map X -> Y, by backtracking over points and stalk isos."""
    if X.n != Y.n or X.kind != Y.kind:
        return None
    from .finmodel import find_isomorphism  # local to keep the import list short

    n = X.n
    order = sorted(range(n), key=lambda x: sum(X.leq[y][x] for y in range(n)))
    f = [-1] * n
    flat: list = [None] * n
    used = set()

    def isos(Q, P):
        if Q.size != P.size or find_isomorphism(Q, P) is None:
            return []
        return [h for h in enumerate_homs(Q, P) if h.is_bijective]

    def rec(t):
        if t == n:
            return True
        x = order[t]
        for y in range(n):
            if y in used:
                continue
            if any(
                f[x2] != -1 and (X.leq[x][x2] != Y.leq[y][f[x2]] or X.leq[x2][x] != Y.leq[f[x2]][y])
                for x2 in range(n)
            ):
                continue
            for h in isos(Y.stalks[y], X.stalks[x]):
                ok = True
                for x2 in range(n):
                    if f[x2] == -1:
                        continue
                    if X.leq[x2][x]:
                        lhs = flat[x2].then(X.transition(x2, x))
                        rhs = Y.transition(f[x2], y).then(h)
                        ok = lhs.map == rhs.map
                    elif X.leq[x][x2]:
                        lhs = h.then(X.transition(x, x2))
                        rhs = Y.transition(y, f[x2]).then(flat[x2])
                        ok = lhs.map == rhs.map
                    if not ok:
                        break
                if not ok:
                    continue
                f[x], flat[x] = y, h
                used.add(y)
                if rec(t + 1):
                    return True
                used.discard(y)
                f[x], flat[x] = -1, None
        return False

    if not rec(0):
        return None
    return ModelledMap(X, Y, tuple(f), tuple(flat))


def spaces_isomorphic(X: ModelledSpace, Y: ModelledSpace) -> bool:
    return find_space_isomorphism(X, Y) is not None

