"""Finite join-semilattices: ideals, the free distributive lattice, reticulations.

The free lattice here is built on the opposite of a join-semilattice S, which
is how it is used for spectra: a generator ``D(s)`` for each ``s`` with
``D(s) ∧ D(t) = D(s ∨ t)`` and ``D(bottom) = 1``.  An element is a finite
formal join of generators, kept as an antichain of *minimal* elements of S.
Equivalently it is an up-set of S, ordered by inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .context import EtaleSemilattice, get_context
from .finmodel import FiniteDistLattice, Hom, _downsets, lattice_quotient


@dataclass(frozen=True)
class FinSemilattice:
    """A bare finite join-semilattice with bottom given by its order matrix."""

    leq_matrix: tuple
    names: tuple | None = None

    def __len__(self):
        return len(self.leq_matrix)

    @cached_property
    def join_table(self) -> tuple:
        n = len(self)
        le = self.leq_matrix
        out = []
        for a in range(n):
            row = []
            for b in range(n):
                ub = [c for c in range(n) if le[a][c] and le[b][c]]
                least = [c for c in ub if all(le[c][d] for d in ub)]
                if len(least) != 1:
                    raise ValueError(f"{a} and {b} have no join")
                row.append(least[0])
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def bottom_index(self) -> int:
        n = len(self)
        for a in range(n):
            if all(self.leq_matrix[a]):
                return a
        raise ValueError("no bottom element")


def chain_semilattice(n: int) -> FinSemilattice:
    return FinSemilattice(tuple(tuple(a <= b for b in range(n)) for a in range(n)))


def _order(S) -> tuple:
    return S.leq_matrix


def _bottom(S) -> int:
    if isinstance(S, EtaleSemilattice):
        return S.bottom.index
    return S.bottom_index


@dataclass(frozen=True)
class SemiIdeal:
    owner: object
    members: frozenset
    generator: int

    def __contains__(self, i):
        return i in self.members


def principal_ideal(S, g: int) -> SemiIdeal:
    le = _order(S)
    return SemiIdeal(S, frozenset(i for i in range(len(S)) if le[i][g]), g)


def all_ideals(S) -> list[SemiIdeal]:
    """Every ideal of a finite join-semilattice; all are principal."""
    out = [principal_ideal(S, g) for g in range(len(S))]
    return sorted(out, key=lambda I: (len(I.members), sorted(I.members)))


def all_ideals_oracle(S) -> list[frozenset]:
    """Nonempty down-sets closed under joins, by subset enumeration."""
    n = len(S)
    le, J = _order(S), S.join_table
    out = []
    for mask in range(1, 1 << n):
        I = frozenset(i for i in range(n) if mask >> i & 1)
        if all(j in I for i in I for j in range(n) if le[j][i]) and all(
            J[a][b] in I for a in I for b in I
        ):
            out.append(I)
    return sorted(out, key=lambda I: (len(I), sorted(I)))


# ---------------------------------------------------------------------------
# free distributive lattice


@dataclass(eq=False)
class FreeDL:
    base: object
    lattice: FiniteDistLattice
    antichains: tuple
    _index: dict

    def element(self, antichain: Iterable[int]) -> int:
        return self._index[self.normalize(antichain)]

    def generator(self, s: int) -> int:
        return self._index[(s,)]

    @property
    def size(self) -> int:
        return self.lattice.size

    def normalize(self, items: Iterable[int]) -> tuple:
        """Keep the minimal elements of the base; the formal join is unchanged."""
        le = _order(self.base)
        items = set(items)
        return tuple(sorted(r for r in items if not any(t != r and le[t][r] for t in items)))

    def leq(self, R: Sequence[int], T: Sequence[int]) -> bool:
        le = _order(self.base)
        return all(any(le[t][r] for t in T) for r in R)

    def join(self, R, T) -> tuple:
        return self.normalize(set(R) | set(T))

    def meet(self, R, T) -> tuple:
        J = self.base.join_table
        return self.normalize({J[r][t] for r in R for t in T})


def free_dl(S) -> FreeDL:
    n = len(S)
    le = _order(S)
    # up-sets of S are the down-sets of the opposite order
    ups = _downsets(n, [[le[j][i] for j in range(n)] for i in range(n)])
    antichains = []
    for U in ups:
        antichains.append(tuple(sorted(r for r in U if not any(t != r and le[t][r] for t in U))))
    antichains.sort(key=lambda R: (_upset_size(le, R), R))
    ups_of = [frozenset(i for i in range(n) if any(le[r][i] for r in R)) for R in antichains]
    L = FiniteDistLattice(
        tuple(tuple(ups_of[a] <= ups_of[b] for b in range(len(antichains))) for a in range(len(antichains))),
        labels=tuple(antichains),
    )
    return FreeDL(S, L, tuple(antichains), {R: i for i, R in enumerate(antichains)})


def _upset_size(le, R) -> int:
    return sum(1 for i in range(len(le)) if any(le[r][i] for r in R))


def join_maps_to_two(S) -> list[tuple]:
    """Maps S -> {0,1} preserving finite joins (including the empty one)."""
    n = len(S)
    J = S.join_table
    b = _bottom(S)
    out = []
    for mask in range(1 << n):
        f = tuple(mask >> i & 1 for i in range(n))
        if f[b] == 0 and all(f[J[x][y]] == max(f[x], f[y]) for x in range(n) for y in range(n)):
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# reticulation and PIT


@dataclass(eq=False)
class Reticulation:
    context: object
    source: object
    semilattice: EtaleSemilattice
    free: FreeDL
    lattice: FiniteDistLattice
    classify: Hom
    relations: tuple

    def D(self, lam) -> int:
        """Class of the basic open of λ in the reticulation."""
        i = lam if isinstance(lam, int) else lam.index
        return self.classify.map[self.free.generator(i)]


def reticulation(ctx, A) -> Reticulation:
    c = get_context(ctx, A)
    S = c.etale_semilattice(A)
    F = free_dl(S)
    pairs = []
    for lam in S:
        for fam in c.covering_families(A, lam):
            rhs = F.element(mu.index for mu in fam.covers)
            pairs.append((F.generator(lam.index), rhs))
    L, q = lattice_quotient(F.lattice, pairs)
    return Reticulation(c, A, S, F, L, q, tuple(pairs))


def spec_point_indices(ctx, A) -> list[int]:
    """Indices of the arrows μ of V_A whose codomain is a T-model."""
    c = get_context(ctx, A)
    return [mu.index for mu in c.etale_semilattice(A) if c.is_T_model(mu.codomain)]


def pit_holds(ctx, A) -> bool:
    """Whenever λ ≰ μ some point ν ≥ μ omits λ."""
    S = get_context(ctx, A).etale_semilattice(A)
    le = S.leq_matrix
    pts = spec_point_indices(ctx, A)
    n = len(S)
    for lam in range(n):
        for mu in range(n):
            if le[lam][mu]:
                continue
            if not any(le[mu][nu] and not le[lam][nu] for nu in pts):
                return False
    return True
