"""Coste contexts on finite models and their étale semilattices.

A context fixes a sort (rings or lattices), the predicate picking out
T-models, the admissible homomorphisms and the étale generators.  For finite
models every étale arrow out of ``A`` is a surjection, so an element of
``V_A`` is pinned down by its kernel: the ideal sent to 0 (rings) or the
filter sent to 1 (lattices).  Order is kernel inclusion and the join is the
arrow whose kernel is generated by both.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from .finmodel import (
    FiniteDistLattice,
    FiniteRing,
    Hom,
    ModelError,
    filter_quotient,
    ideal_generated,
    idempotent_power,
    localize_at,
    quotient_ring,
    radical_leq,
)


class ContextError(ModelError):
    """Sort mismatch or an unknown context name."""


# ---------------------------------------------------------------------------
# kernels


def generated_kernel(M, seeds: Iterable[int]) -> frozenset:
    """Ideal (rings) or filter (lattices) generated by ``seeds``."""
    seeds = list(seeds)
    if M.kind == "ring":
        return ideal_generated(M, seeds)
    m = M.top
    for s in seeds:
        m = M.meet[m][s]
    return M.up(m)


def kill_kernel(B: FiniteRing, x: int) -> frozenset:
    return ideal_generated(B, [x])


def invert_kernel(B: FiniteRing, x: int) -> frozenset:
    e = idempotent_power(B, x)
    return ideal_generated(B, [B.sub(B.one, e)])


def force_one_kernel(B, x: int) -> frozenset:
    if B.kind == "ring":
        return ideal_generated(B, [B.sub(B.one, x)])
    return B.up(x)


# ---------------------------------------------------------------------------
# étale arrows and semilattices


@dataclass(frozen=True, eq=False)
class EtaleArrow:
    """An element of V_A: a surjection A -> A_λ with its kernel and tag."""

    source: object
    codomain: object
    hom: Hom
    kernel: frozenset
    tag: object
    index: int = -1

    def __eq__(self, other):
        return (
            isinstance(other, EtaleArrow)
            and self.source == other.source
            and self.kernel == other.kernel
        )

    def __hash__(self):
        return hash((self.source, self.kernel))

    def __repr__(self):
        return f"EtaleArrow({self.tag!r}, |A_λ|={self.codomain.size})"

    @property
    def is_identity(self) -> bool:
        return self.tag == "id"

    @cached_property
    def section(self) -> tuple:
        """A chosen preimage for each element of the codomain."""
        pre = [-1] * self.codomain.size
        for x in self.source.elements:
            y = self.hom.map[x]
            if pre[y] == -1:
                pre[y] = x
        return tuple(pre)


@dataclass(frozen=True)
class CoveringFamily:
    base: EtaleArrow
    covers: tuple
    axiom: str
    witness: tuple = ()

    @property
    def is_empty(self) -> bool:
        return not self.covers


@dataclass(eq=False)
class EtaleSemilattice:
    context: "Context"
    source: object
    elements: list
    _by_kernel: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_kernel = {lam.kernel: lam for lam in self.elements}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i) -> EtaleArrow:
        return self.elements[i]

    @property
    def bottom(self) -> EtaleArrow:
        return self.elements[0]

    @cached_property
    def top(self) -> EtaleArrow:
        t = self.bottom
        for lam in self.elements:
            t = self.join(t, lam)
        return t

    def by_kernel(self, K: frozenset) -> EtaleArrow:
        try:
            return self._by_kernel[K]
        except KeyError:
            raise ModelError("kernel does not belong to the étale semilattice") from None

    def by_tag(self, tag) -> EtaleArrow:
        for lam in self.elements:
            if lam.tag == tag:
                return lam
        raise KeyError(tag)

    @cached_property
    def leq_matrix(self) -> tuple:
        return tuple(tuple(a.kernel <= b.kernel for b in self.elements) for a in self.elements)

    def leq(self, lam: EtaleArrow, mu: EtaleArrow) -> bool:
        return lam.kernel <= mu.kernel

    @cached_property
    def join_table(self) -> tuple:
        out = []
        for a in self.elements:
            row = []
            for b in self.elements:
                K = generated_kernel(self.source, a.kernel | b.kernel)
                row.append(self.by_kernel(K).index)
            out.append(tuple(row))
        return tuple(out)

    def join(self, lam: EtaleArrow, mu: EtaleArrow) -> EtaleArrow:
        return self.elements[self.join_table[lam.index][mu.index]]

    def join_all(self, lams: Iterable[EtaleArrow]) -> EtaleArrow:
        out = self.bottom
        for lam in lams:
            out = self.join(out, lam)
        return out

    def transition(self, lam: EtaleArrow, mu: EtaleArrow) -> Hom:
        """The unique hom A_λ -> A_μ under A, for λ ≤ μ."""
        if not self.leq(lam, mu):
            raise ModelError(f"{lam.tag!r} is not below {mu.tag!r}")
        return Hom(lam.codomain, mu.codomain, tuple(mu.hom.map[x] for x in lam.section))

    def after_move(self, lam: EtaleArrow, kernel_in_codomain: frozenset) -> EtaleArrow:
        """The arrow A -> A_λ -> A_λ/K, looked up by its kernel in A."""
        K = frozenset(x for x in self.source.elements if lam.hom.map[x] in kernel_in_codomain)
        return self.by_kernel(K)


# ---------------------------------------------------------------------------
# contexts


class Context:
    """A spatial Coste context on finite models of one sort."""

    name: str = ""
    sort: str = "ring"
    # each Λ pair: (arity of u, arity of v, φ(M, u), ψ(M, u, v))
    lambda_pairs: tuple = ()
    has_bottom_axiom = True

    def __repr__(self):
        return f"<context {self.name}>"

    def check_sort(self, M) -> None:
        if M.kind != self.sort:
            raise ContextError(f"the {self.name} context works on {self.sort}s, got a {M.kind}")

    # -- T-models and admissibility

    def is_T_model(self, M) -> bool:
        self.check_sort(M)
        if self.has_bottom_axiom and M.is_trivial:
            return False
        return self._extra_axioms_hold(M)

    def _extra_axioms_hold(self, M) -> bool:
        return True

    def is_admissible(self, h: Hom) -> bool:
        self.check_sort(h.source)
        self.check_sort(h.target)
        return self._closed_form_admissible(h)

    def _closed_form_admissible(self, h: Hom) -> bool:
        return True

    def is_admissible_by_lifting(self, h: Hom) -> bool:
        """Unique right lifting against every Λ pair, by brute force."""
        A, B = h.source, h.target
        m = h.map
        for nu, nv, phi, psi in self.lambda_pairs:
            for us in itertools.product(A.elements, repeat=nu):
                if not phi(A, us):
                    continue
                hus = tuple(m[u] for u in us)
                for vs_b in itertools.product(B.elements, repeat=nv):
                    if not psi(B, hus, vs_b):
                        continue
                    lifts = sum(
                        1
                        for vs in itertools.product(A.elements, repeat=nv)
                        if psi(A, us, vs) and tuple(m[v] for v in vs) == vs_b
                    )
                    if lifts != 1:
                        return False
        return True

    # -- the étale semilattice

    def etale_semilattice(self, A) -> EtaleSemilattice:
        self.check_sort(A)
        cache = _SEMILATTICE_CACHE.setdefault(self.name, {})
        S = cache.get(A)
        if S is None:
            raw = self._arrows(A)
            # a linear extension of the order, ties broken by tag
            kernels = [lam.kernel for lam in raw]
            raw.sort(
                key=lambda lam: (
                    not lam.is_identity,
                    sum(K < lam.kernel for K in kernels),
                    _tag_key(lam.tag),
                )
            )
            elems = [
                EtaleArrow(lam.source, lam.codomain, lam.hom, lam.kernel, lam.tag, i)
                for i, lam in enumerate(raw)
            ]
            S = EtaleSemilattice(self, A, elems)
            cache[A] = S
        return S

    def _arrows(self, A) -> list:
        raise NotImplementedError

    def _identity_arrow(self, A) -> EtaleArrow:
        K = generated_kernel(A, [])
        return EtaleArrow(A, A, Hom.identity(A), K, "id")

    # -- coverings

    def covering_families(self, A, lam: EtaleArrow) -> list[CoveringFamily]:
        S = self.etale_semilattice(A)
        B = lam.codomain
        out: list[CoveringFamily] = []
        seen = set()

        def add(axiom, witness, kernels):
            covers = tuple(sorted({S.after_move(lam, K).index for K in kernels}))
            if covers in seen:
                return
            seen.add(covers)
            out.append(CoveringFamily(lam, tuple(S[i] for i in covers), axiom, witness))

        if self.has_bottom_axiom and B.is_trivial:
            add("0=1 |- false", (), [])
        for axiom, witness, kernels in self._cover_moves(B):
            add(axiom, witness, kernels)
        return out

    def _cover_moves(self, B):
        return ()

    # -- functoriality

    def pushforward(self, alpha: Hom, lam: EtaleArrow) -> EtaleArrow:
        """Pushout of λ along α, as an element of V_B."""
        SB = self.etale_semilattice(alpha.target)
        K = generated_kernel(alpha.target, (alpha.map[x] for x in lam.kernel))
        return SB.by_kernel(K)


_SEMILATTICE_CACHE: dict = {}


def _tag_key(tag):
    if tag == "id":
        return (0, ())
    return (1, tag if isinstance(tag, tuple) else (tag,))


def _ring_arrow(A: FiniteRing, e: int, tag) -> EtaleArrow:
    R, h = localize_at(A, e)
    K = frozenset(x for x in A.elements if h.map[x] == R.zero)
    return EtaleArrow(A, R, h, K, tag)


class TrivialContext(Context):
    """T = T₀ with no étale generators; one instance per sort."""

    has_bottom_axiom = False

    def __init__(self, sort: str = "ring"):
        self.sort = sort
        self.name = "trivial" if sort == "ring" else "trivial-dl"

    def _arrows(self, A):
        return [self._identity_arrow(A)]


def _unit(M, x):
    return x in M.units


class ZariskiContext(Context):
    name = "zariski"
    lambda_pairs = (
        (1, 1, lambda M, u: True, lambda M, u, v: M.mul[u[0]][v[0]] == M.one),
        (1, 1, lambda M, u: True, lambda M, u, v: M.mul[M.sub(M.one, u[0])][v[0]] == M.one),
    )

    def _extra_axioms_hold(self, A):
        return all(_unit(A, x) or _unit(A, A.sub(A.one, x)) for x in A.elements)

    def _closed_form_admissible(self, h):
        return all(x in h.source.units for x in h.source.elements if h.map[x] in h.target.units)

    def _arrows(self, A):
        # one arrow per class of the preorder b ∈ √<a>, named by its smallest member
        reps: list[int] = []
        for a in A.elements:
            if not any(radical_leq(A, a, r) and radical_leq(A, r, a) for r in reps):
                reps.append(a)
        out = []
        for r in reps:
            lam = _ring_arrow(A, r, r)
            if lam.kernel == frozenset({A.zero}) or A.is_trivial:
                lam = self._identity_arrow(A)
            out.append(lam)
        return out

    def _cover_moves(self, B):
        for x in B.elements:
            yield "|- inv(u) or inv(1-u)", (x,), [invert_kernel(B, x), invert_kernel(B, B.sub(B.one, x))]


class FieldContext(Context):
    name = "field"
    lambda_pairs = (
        (1, 0, lambda M, u: True, lambda M, u, v: u[0] == M.zero),
        (1, 1, lambda M, u: True, lambda M, u, v: M.mul[u[0]][v[0]] == M.one),
    )

    def _extra_axioms_hold(self, A):
        return all(x == A.zero or _unit(A, x) for x in A.elements)

    def _closed_form_admissible(self, h):
        return h.is_injective and ZARISKI._closed_form_admissible(h)

    def _moves(self, B):
        for x in B.elements:
            yield kill_kernel(B, x)
            yield invert_kernel(B, x)

    def _arrows(self, A):
        return _saturate_quotients(A, self._moves)

    def _cover_moves(self, B):
        for x in B.elements:
            yield "|- u=0 or inv(u)", (x,), [kill_kernel(B, x), invert_kernel(B, x)]


class DomainContext(FieldContext):
    name = "domain"
    lambda_pairs = (
        (2, 0, lambda M, u: M.mul[u[0]][u[1]] == M.zero, lambda M, u, v: u[0] == M.zero),
        (2, 0, lambda M, u: M.mul[u[0]][u[1]] == M.zero, lambda M, u, v: u[1] == M.zero),
    )

    def _extra_axioms_hold(self, A):
        return all(
            A.mul[x][y] != A.zero for x in A.elements for y in A.elements if x != A.zero and y != A.zero
        )

    def _closed_form_admissible(self, h):
        return h.is_injective

    def _moves(self, B):
        # kill u for any pair u u' = 0; u' = 0 is always a partner
        for x in B.elements:
            yield kill_kernel(B, x)

    def _cover_moves(self, B):
        for x in B.elements:
            for y in B.elements:
                if x <= y and B.mul[x][y] == B.zero:
                    yield "uu'=0 |- u=0 or u'=0", (x, y), [kill_kernel(B, x), kill_kernel(B, y)]


def _saturate_quotients(A: FiniteRing, moves: Callable) -> list:
    """Close {A -> A} under the moves, each applied in the current quotient."""
    start = frozenset({A.zero})
    quotients = {start: quotient_ring(A, start)}
    todo = [start]
    while todo:
        K = todo.pop()
        B, q = quotients[K]
        for KB in moves(B):
            K2 = frozenset(x for x in A.elements if q.map[x] in KB)
            if K2 not in quotients:
                quotients[K2] = quotient_ring(A, K2)
                todo.append(K2)
    out = []
    for K, (B, q) in quotients.items():
        if K == start:
            out.append(EtaleArrow(A, A, Hom.identity(A), K, "id"))
        else:
            inv = tuple(x for x in A.elements if q.map[x] in B.units)
            out.append(EtaleArrow(A, B, q, K, (tuple(sorted(K)), inv)))
    return out


class PierceContext(Context):
    name = "pierce"
    lambda_pairs = (
        (1, 0, lambda M, u: M.mul[u[0]][u[0]] == u[0], lambda M, u, v: u[0] == M.zero),
        (1, 0, lambda M, u: M.mul[u[0]][u[0]] == u[0], lambda M, u, v: u[0] == M.one),
    )

    def _extra_axioms_hold(self, A):
        return set(A.idempotents) == {A.zero, A.one}

    def _closed_form_admissible(self, h):
        # reflects 0 and 1 on idempotents, i.e. injective on idempotents
        A, B = h.source, h.target
        return all(
            (h.map[e] != B.zero or e == A.zero) and (h.map[e] != B.one or e == A.one)
            for e in A.idempotents
        )

    def _arrows(self, A):
        out = []
        for e in A.idempotents:
            if e == A.one:
                out.append(self._identity_arrow(A))
            else:
                out.append(_ring_arrow(A, e, e))
        return out

    def _cover_moves(self, B):
        for e in B.idempotents:
            yield "u^2=u |- u=0 or u=1", (e,), [kill_kernel(B, e), force_one_kernel(B, e)]


class DLContext(Context):
    name = "dl"
    sort = "lattice"
    lambda_pairs = (
        (2, 0, lambda M, u: M.join[u[0]][u[1]] == M.top, lambda M, u, v: u[0] == M.top),
        (2, 0, lambda M, u: M.join[u[0]][u[1]] == M.top, lambda M, u, v: u[1] == M.top),
    )

    def _extra_axioms_hold(self, L):
        return all(
            x == L.top or y == L.top
            for x in L.elements
            for y in L.elements
            if L.join[x][y] == L.top
        )

    def _closed_form_admissible(self, h):
        return all(x == h.source.top for x in h.source.elements if h.map[x] == h.target.top)

    def _arrows(self, L: FiniteDistLattice):
        out = []
        for a in L.elements:
            if a == L.top:
                out.append(self._identity_arrow(L))
            else:
                Q, h = filter_quotient(L, a)
                out.append(EtaleArrow(L, Q, h, L.up(a), a))
        return out

    def _cover_moves(self, B):
        for x in B.elements:
            for y in B.elements:
                if x <= y and B.join[x][y] == B.top:
                    yield "sup(u,u')=1 |- u=1 or u'=1", (x, y), [B.up(x), B.up(y)]


TRIVIAL = TrivialContext("ring")
TRIVIAL_DL = TrivialContext("lattice")
ZARISKI = ZariskiContext()
FIELD = FieldContext()
DOMAIN = DomainContext()
PIERCE = PierceContext()
DL = DLContext()

CONTEXTS = {
    "trivial": TRIVIAL,
    "trivial-dl": TRIVIAL_DL,
    "zariski": ZARISKI,
    "field": FIELD,
    "domain": DOMAIN,
    "pierce": PIERCE,
    "dl": DL,
}


def get_context(ctx, model=None) -> Context:
    """Resolve a context name; ``trivial`` adapts to the sort of ``model``."""
    if isinstance(ctx, Context):
        if ctx.name.startswith("trivial") and model is not None and model.kind != ctx.sort:
            return TRIVIAL_DL if model.kind == "lattice" else TRIVIAL
        return ctx
    try:
        c = CONTEXTS[str(ctx).lower()]
    except KeyError:
        raise ContextError(f"unknown context {ctx!r}") from None
    return get_context(c, model)


# module-level API mirroring the context methods


def is_T_model(ctx, M) -> bool:
    return get_context(ctx, M).is_T_model(M)


def is_admissible(ctx, h: Hom) -> bool:
    return get_context(ctx, h.source).is_admissible(h)


def is_admissible_by_lifting(ctx, h: Hom) -> bool:
    return get_context(ctx, h.source).is_admissible_by_lifting(h)


def etale_semilattice(ctx, A) -> EtaleSemilattice:
    return get_context(ctx, A).etale_semilattice(A)


def covering_families(ctx, A, lam: EtaleArrow) -> list[CoveringFamily]:
    return get_context(ctx, A).covering_families(A, lam)


def pushforward(ctx, alpha: Hom, lam: EtaleArrow) -> EtaleArrow:
    return get_context(ctx, alpha.source).pushforward(alpha, lam)
