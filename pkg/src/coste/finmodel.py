"""Finite commutative rings and finite bounded distributive lattices.

Models are stored as explicit operation tables over the carrier ``0..n-1``.
Everything here is plain table arithmetic; the spectra modules build on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class ModelError(ValueError):
    """Raised when tables do not describe a valid model or hom."""


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class FiniteRing:
    add: tuple
    mul: tuple
    zero: int
    one: int
    labels: tuple | None = field(default=None, compare=False, repr=False)

    kind = "ring"

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.add, self.mul, self.zero, self.one))

    @property
    def size(self) -> int:
        return len(self.add)

    @property
    def elements(self) -> range:
        return range(len(self.add))

    def label(self, x: int):
        return self.labels[x] if self.labels is not None else x

    @cached_property
    def neg(self) -> tuple:
        out = [0] * self.size
        for x in self.elements:
            row = self.add[x]
            out[x] = row.index(self.zero)
        return tuple(out)

    def sub(self, x: int, y: int) -> int:
        return self.add[x][self.neg[y]]

    def power(self, x: int, n: int) -> int:
        r = self.one
        for _ in range(n):
            r = self.mul[r][x]
        return r

    def times(self, k: int, x: int) -> int:
        """Additive multiple ``k * x`` for ``k >= 0``."""
        r = self.zero
        for _ in range(k):
            r = self.add[r][x]
        return r

    @cached_property
    def units(self) -> frozenset:
        return frozenset(x for x in self.elements if self.one in self.mul[x])

    @cached_property
    def idempotents(self) -> tuple:
        return tuple(x for x in self.elements if self.mul[x][x] == x)

    @property
    def is_trivial(self) -> bool:
        return self.zero == self.one

    def validate(self) -> None:
        n = self.size
        if n == 0:
            raise ModelError("empty carrier")
        add = np.asarray(self.add, dtype=np.int64)
        mul = np.asarray(self.mul, dtype=np.int64)
        if add.shape != (n, n) or mul.shape != (n, n):
            raise ModelError("tables must be n x n")
        if add.min() < 0 or add.max() >= n or mul.min() < 0 or mul.max() >= n:
            raise ModelError("table entry out of range")
        idx = np.arange(n)
        if not (add == add.T).all() or not (mul == mul.T).all():
            raise ModelError("operations must be commutative")
        if not (add[self.zero] == idx).all():
            raise ModelError("zero is not additive identity")
        if not (mul[self.one] == idx).all():
            raise ModelError("one is not multiplicative identity")
        if not (add == self.zero).any(axis=1).all():
            raise ModelError("missing additive inverses")
        # (a+b)+c == a+(b+c), and likewise for mul and distributivity
        lhs = add[add[:, :, None], idx[None, None, :]]
        rhs = add[idx[:, None, None], add[None, :, :]]
        if not (lhs == rhs).all():
            raise ModelError("addition is not associative")
        lhs = mul[mul[:, :, None], idx[None, None, :]]
        rhs = mul[idx[:, None, None], mul[None, :, :]]
        if not (lhs == rhs).all():
            raise ModelError("multiplication is not associative")
        lhs = mul[idx[:, None, None], add[None, :, :]]
        rhs = add[mul[:, :, None], mul[:, None, :]]
        if not (lhs == rhs).all():
            raise ModelError("multiplication does not distribute over addition")


def ring_from_elements(elems: Sequence, add, mul, zero, one) -> FiniteRing:
    """Index a ring given by Python values and operations on them."""
    elems = list(elems)
    index = {e: i for i, e in enumerate(elems)}
    add_t = tuple(tuple(index[add(a, b)] for b in elems) for a in elems)
    mul_t = tuple(tuple(index[mul(a, b)] for b in elems) for a in elems)
    return FiniteRing(add_t, mul_t, index[zero], index[one], labels=tuple(elems))


def make_zmod(n: int) -> FiniteRing:
    if n < 1:
        raise ModelError(f"Z/{n} is not a finite ring; need n >= 1")
    r = range(n)
    add = tuple(tuple((a + b) % n for b in r) for a in r)
    mul = tuple(tuple((a * b) % n for b in r) for a in r)
    return FiniteRing(add, mul, 0, 1 % n)


def ring_product(rings: Sequence[FiniteRing]) -> FiniteRing:
    """Cartesian product; the empty product is the trivial ring."""
    if not rings:
        return make_zmod(1)
    elems = list(itertools.product(*(R.elements for R in rings)))
    return ring_from_elements(
        elems,
        lambda a, b: tuple(R.add[x][y] for R, x, y in zip(rings, a, b)),
        lambda a, b: tuple(R.mul[x][y] for R, x, y in zip(rings, a, b)),
        tuple(R.zero for R in rings),
        tuple(R.one for R in rings),
    )


def dual_numbers(p: int = 2) -> FiniteRing:
    """F_p[e]/(e^2), the local ring used for the relative-spectrum examples."""
    elems = [(a, b) for a in range(p) for b in range(p)]
    return ring_from_elements(
        elems,
        lambda x, y: ((x[0] + y[0]) % p, (x[1] + y[1]) % p),
        lambda x, y: ((x[0] * y[0]) % p, (x[0] * y[1] + x[1] * y[0]) % p),
        (0, 0),
        (1, 0),
    )


def ideal_generated(A: FiniteRing, gens: Iterable[int]) -> frozenset:
    seeds = {A.mul[g][x] for g in gens for x in A.elements}
    seeds.add(A.zero)
    return _additive_closure(A, seeds)


def _additive_closure(A: FiniteRing, seeds) -> frozenset:
    out = set(seeds)
    todo = list(out)
    while todo:
        x = todo.pop()
        for y in list(out):
            s = A.add[x][y]
            if s not in out:
                out.add(s)
                todo.append(s)
    return frozenset(out)


def subring_generated(A: FiniteRing, gens: Iterable[int]) -> frozenset:
    out = {A.zero, A.one, *gens}
    todo = list(out)
    while todo:
        x = todo.pop()
        for y in list(out):
            for z in (A.add[x][y], A.mul[x][y]):
                if z not in out:
                    out.add(z)
                    todo.append(z)
    return frozenset(out)


def idempotent_power(A: FiniteRing, a: int) -> int:
    """The idempotent among the powers a, a^2, ... (exists by pigeonhole)."""
    p = a
    for _ in range(A.size + 1):
        if A.mul[p][p] == p:
            return p
        p = A.mul[p][a]
    raise AssertionError("no idempotent power found")  # unreachable for finite rings


def localize_at(A: FiniteRing, a: int) -> tuple[FiniteRing, "Hom"]:
    """A[a^-1] as eA, where e is the idempotent power of a."""
    e = idempotent_power(A, a)
    carrier = sorted({A.mul[e][x] for x in A.elements})
    R = ring_from_elements(
        carrier, lambda x, y: A.add[x][y], lambda x, y: A.mul[x][y], A.zero, e
    )
    index = {x: i for i, x in enumerate(carrier)}
    return R, Hom(A, R, tuple(index[A.mul[e][x]] for x in A.elements))


def radical_leq(A: FiniteRing, a: int, b: int) -> bool:
    """True iff b lies in the radical of the principal ideal <a>."""
    principal = {A.mul[a][c] for c in A.elements}
    p = b
    for _ in range(A.size):
        if p in principal:
            return True
        p = A.mul[p][b]
    return False


def quotient_ring(A: FiniteRing, ideal: frozenset) -> tuple[FiniteRing, "Hom"]:
    """A/I on smallest coset representatives."""
    rep = [-1] * A.size
    reps = []
    for x in A.elements:
        if rep[x] != -1:
            continue
        reps.append(x)
        for i in ideal:
            rep[A.add[x][i]] = x
    R = ring_from_elements(
        reps,
        lambda x, y: rep[A.add[x][y]],
        lambda x, y: rep[A.mul[x][y]],
        rep[A.zero],
        rep[A.one],
    )
    index = {x: i for i, x in enumerate(reps)}
    return R, Hom(A, R, tuple(index[rep[x]] for x in A.elements))


def quotient_by_ideal(A: FiniteRing, gens: Iterable[int]) -> tuple[FiniteRing, "Hom"]:
    return quotient_ring(A, ideal_generated(A, gens))


def prime_ideals_oracle(A: FiniteRing) -> list[frozenset]:
    """All prime ideals, found by enumerating every ideal and testing primality."""
    primes = [
        I
        for I in all_ring_ideals(A)
        if A.one not in I
        and all(a in I or b in I for a in A.elements for b in A.elements if A.mul[a][b] in I)
    ]
    return sorted(primes, key=lambda I: sorted(I))


def all_ring_ideals(A: FiniteRing) -> list[frozenset]:
    start = frozenset({A.zero})
    seen = {start}
    todo = [start]
    while todo:
        I = todo.pop()
        for x in A.elements:
            if x not in I:
                J = ideal_generated(A, set(I) | {x})
                if J not in seen:
                    seen.add(J)
                    todo.append(J)
    return sorted(seen, key=lambda I: (len(I), sorted(I)))


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class FiniteDistLattice:
    leq: tuple
    labels: tuple | None = field(default=None, compare=False, repr=False)

    kind = "lattice"

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self.leq)

    @property
    def size(self) -> int:
        return len(self.leq)

    @property
    def elements(self) -> range:
        return range(len(self.leq))

    def label(self, x: int):
        return self.labels[x] if self.labels is not None else x

    @cached_property
    def bot(self) -> int:
        for x in self.elements:
            if all(self.leq[x]):
                return x
        raise ModelError("no bottom element")

    @cached_property
    def top(self) -> int:
        for x in self.elements:
            if all(self.leq[y][x] for y in self.elements):
                return x
        raise ModelError("no top element")

    @property
    def is_trivial(self) -> bool:
        return self.size == 1

    @cached_property
    def _masks(self) -> tuple:
        """Bitmasks of up-sets and down-sets, keyed back to elements."""
        n, leq = self.size, self.leq
        ups = [sum(1 << c for c in range(n) if leq[a][c]) for a in range(n)]
        downs = [sum(1 << c for c in range(n) if leq[c][a]) for a in range(n)]
        return ups, downs, {m: a for a, m in enumerate(ups)}, {m: a for a, m in enumerate(downs)}

    def _bound(self, a, b, upper):
        # in a lattice ↑(a ∨ b) = ↑a ∩ ↑b and ↓(a ∧ b) = ↓a ∩ ↓b
        ups, downs, by_up, by_down = self._masks
        if upper:
            c = by_up.get(ups[a] & ups[b])
        else:
            c = by_down.get(downs[a] & downs[b])
        if c is None:
            raise ModelError(f"no {'join' if upper else 'meet'} for {a}, {b}")
        return c

    @cached_property
    def join(self) -> tuple:
        return tuple(tuple(self._bound(a, b, True) for b in self.elements) for a in self.elements)

    @cached_property
    def meet(self) -> tuple:
        return tuple(tuple(self._bound(a, b, False) for b in self.elements) for a in self.elements)

    def up(self, a: int) -> frozenset:
        return frozenset(x for x in self.elements if self.leq[a][x])

    @cached_property
    def join_irreducibles(self) -> tuple:
        """Elements with exactly one lower cover, in a linear extension order."""
        out = []
        for j in self.elements:
            below = [x for x in self.elements if x != j and self.leq[x][j]]
            covers = [x for x in below if not any(y != x and self.leq[x][y] for y in below)]
            if len(covers) == 1:
                out.append(j)
        return tuple(sorted(out, key=lambda j: sum(self.leq[x][j] for x in self.elements)))

    def validate(self) -> None:
        n = self.size
        if n == 0:
            raise ModelError("empty carrier")
        leq = np.asarray(self.leq, dtype=bool)
        if leq.shape != (n, n):
            raise ModelError("order matrix must be n x n")
        if not leq.diagonal().all():
            raise ModelError("order is not reflexive")
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            raise ModelError("order is not antisymmetric")
        if ((leq.astype(int) @ leq.astype(int) > 0) & ~leq).any():
            raise ModelError("order is not transitive")
        self.bot, self.top  # noqa: B018 - raise if absent
        J, M = self.join, self.meet
        for a in self.elements:
            for b in self.elements:
                for c in self.elements:
                    if M[a][J[b][c]] != J[M[a][b]][M[a][c]]:
                        raise ModelError("lattice is not distributive")


def lattice_from_elements(elems: Sequence, leq) -> FiniteDistLattice:
    elems = list(elems)
    mat = tuple(tuple(bool(leq(a, b)) for b in elems) for a in elems)
    return FiniteDistLattice(mat, labels=tuple(elems))


def chain(n: int) -> FiniteDistLattice:
    """The n-element chain 0 < 1 < ... < n-1."""
    if n < 1:
        raise ModelError("a chain needs at least one element")
    return FiniteDistLattice(tuple(tuple(a <= b for b in range(n)) for a in range(n)))


def diamond() -> FiniteDistLattice:
    """The five-element lattice 0 < a∧b < a, b < 1 presented by sup(a, b) = 1."""
    names = ["0", "ab", "a", "b", "1"]
    below = {"0": {"0"}, "ab": {"0", "ab"}, "a": {"0", "ab", "a"}, "b": {"0", "ab", "b"}}
    below["1"] = set(names)
    return lattice_from_elements(names, lambda x, y: x in below[y])


def downset_lattice(n: int, relations: Iterable[tuple[int, int]] = ()) -> FiniteDistLattice:
    """Lattice of down-sets of the poset on 0..n-1 generated by ``i <= j`` pairs."""
    le = [[i == j for j in range(n)] for i in range(n)]
    for i, j in relations:
        le[i][j] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if le[i][k] and le[k][j]:
                    le[i][j] = True
    sets = _downsets(n, le)
    return lattice_from_elements(sets, lambda a, b: a <= b)


def _downsets(n, le) -> list[frozenset]:
    out = []
    # order points by a linear extension so predecessors are decided first
    order = sorted(range(n), key=lambda i: sum(le[j][i] for j in range(n)))
    le2 = [[le[order[a]][order[b]] for b in range(n)] for a in range(n)]

    def rec2(i, chosen):
        if i == n:
            out.append(frozenset(order[k] for k in chosen))
            return
        rec2(i + 1, chosen)
        if all(j in chosen for j in range(i) if le2[j][i]):
            rec2(i + 1, chosen | {i})

    rec2(0, frozenset())
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def filter_quotient(L: FiniteDistLattice, a: int) -> tuple[FiniteDistLattice, "Hom"]:
    """L / ↑a, where x ~ y iff x ∧ c = y ∧ c for some c in ↑a."""
    F = L.up(a)
    M = L.meet
    cls = [-1] * L.size
    reps = []
    for x in L.elements:
        if cls[x] != -1:
            continue
        reps.append(x)
        for y in L.elements:
            if cls[y] == -1 and any(M[x][c] == M[y][c] for c in F):
                cls[y] = len(reps) - 1
    # ↑a is a filter, so the relation is already an equivalence and [x] ≤ [y] iff x∧a ≤ y∧a
    Q = FiniteDistLattice(
        tuple(tuple(L.leq[M[x][a]][M[y][a]] for y in reps) for x in reps),
        labels=tuple(L.label(x) for x in reps),
    )
    return Q, Hom(L, Q, tuple(cls))


def lattice_quotient(L: FiniteDistLattice, pairs: Iterable[tuple[int, int]]):
    """Quotient of L by the lattice congruence generated by ``pairs``."""
    parent = congruence_closure(L.size, pairs, L.join, L.meet)
    reps = sorted({parent[x] for x in L.elements})
    index = {r: i for i, r in enumerate(reps)}
    # [x] ≤ [y] iff x ∨ y ~ y
    J = L.join
    Q = FiniteDistLattice(
        tuple(tuple(parent[J[x][y]] == parent[y] for y in reps) for x in reps),
        labels=tuple(L.label(r) for r in reps),
    )
    return Q, Hom(L, Q, tuple(index[parent[x]] for x in L.elements))


def congruence_closure(n: int, pairs, join, meet) -> list[int]:
    """Union-find closure of ``pairs`` under translations by join and meet.

    Returns the canonical representative (smallest index) of each class.
    """
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    todo = list(pairs)
    while todo:
        x, y = todo.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        if rx < ry:
            parent[ry] = rx
        else:
            parent[rx] = ry
        for z in range(n):
            todo.append((join[x][z], join[y][z]))
            todo.append((meet[x][z], meet[y][z]))
    return [find(x) for x in range(n)]


def prime_filters_oracle(L: FiniteDistLattice) -> list[frozenset]:
    """All prime filters, by enumerating every filter and testing primality."""
    J, M = L.join, L.meet
    primes = [
        F
        for F in all_lattice_filters(L)
        if L.bot not in F
        and all(a in F or b in F for a in L.elements for b in L.elements if J[a][b] in F)
    ]
    return sorted(primes, key=lambda F: sorted(F))


def all_lattice_filters(L: FiniteDistLattice) -> list[frozenset]:
    M = L.meet

    def generated(S):
        out = set(S) | {L.top}
        changed = True
        while changed:
            changed = False
            for x in list(out):
                for y in list(out):
                    if M[x][y] not in out:
                        out.add(M[x][y])
                        changed = True
        return frozenset(z for z in L.elements if any(L.leq[x][z] for x in out))

    start = generated(())
    seen = {start}
    todo = [start]
    while todo:
        F = todo.pop()
        for x in L.elements:
            if x not in F:
                G = generated(set(F) | {x})
                if G not in seen:
                    seen.add(G)
                    todo.append(G)
    return sorted(seen, key=lambda F: (len(F), sorted(F)))


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Hom:
    source: object
    target: object
    map: tuple

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __hash__(self):
        return hash((self.source, self.target, self.map))

    @staticmethod
    def identity(M) -> "Hom":
        return Hom(M, M, tuple(M.elements))

    def then(self, other: "Hom") -> "Hom":
        """The composite ``other ∘ self``."""
        if other.source != self.target:
            raise ModelError("composite of non-composable homs")
        return Hom(self.source, other.target, tuple(other.map[x] for x in self.map))

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def is_valid(self) -> bool:
        return is_hom(self.source, self.target, self.map)


def is_hom(A, B, m: Sequence[int]) -> bool:
    if A.kind != B.kind or len(m) != A.size:
        return False
    if any(not 0 <= y < B.size for y in m):
        return False
    if A.kind == "ring":
        if m[A.zero] != B.zero or m[A.one] != B.one:
            return False
        for x in A.elements:
            for y in A.elements:
                if m[A.add[x][y]] != B.add[m[x]][m[y]] or m[A.mul[x][y]] != B.mul[m[x]][m[y]]:
                    return False
        return True
    if m[A.bot] != B.bot or m[A.top] != B.top:
        return False
    for x in A.elements:
        for y in A.elements:
            if m[A.join[x][y]] != B.join[m[x]][m[y]] or m[A.meet[x][y]] != B.meet[m[x]][m[y]]:
                return False
    return True


def same_sort(A, B) -> bool:
    return A.kind == B.kind


def ring_generators(A: FiniteRing) -> list[int]:
    gens: list[int] = []
    span = subring_generated(A, gens)
    for x in A.elements:
        if x not in span:
            gens.append(x)
            span = subring_generated(A, gens)
    return gens


def _extend_ring_map(A: FiniteRing, B: FiniteRing, gens, imgs):
    m = [-1] * A.size
    known: list[int] = []
    todo = []

    def assign(x, y):
        if m[x] == -1:
            m[x] = y
            todo.append(x)
            return True
        return m[x] == y

    if not assign(A.zero, B.zero) or not assign(A.one, B.one):
        return None
    for g, h in zip(gens, imgs):
        if not assign(g, h):
            return None
    while todo:
        x = todo.pop()
        known.append(x)
        for y in known:
            if not assign(A.add[x][y], B.add[m[x]][m[y]]):
                return None
            if not assign(A.mul[x][y], B.mul[m[x]][m[y]]):
                return None
    return tuple(m)


def extend_hom(A, B, partial: dict) -> Hom | None:
    """The unique hom A -> B extending ``partial`` when its keys generate A.

    Returns None if the assignment is inconsistent or does not reach all of A.
    """
    m = [-1] * A.size
    done: list[int] = []
    todo: list[int] = []

    def assign(x, y):
        if m[x] == -1:
            m[x] = y
            todo.append(x)
            return True
        return m[x] == y

    if A.kind == "ring":
        consts = [(A.zero, B.zero), (A.one, B.one)]
        ops = [(A.add, B.add), (A.mul, B.mul)]
    else:
        consts = [(A.bot, B.bot), (A.top, B.top)]
        ops = [(A.join, B.join), (A.meet, B.meet)]
    for x, y in list(consts) + list(partial.items()):
        if not assign(x, y):
            return None
    while todo:
        x = todo.pop()
        done.append(x)
        for z in done:
            for opA, opB in ops:
                if not assign(opA[x][z], opB[m[x]][m[z]]):
                    return None
    if -1 in m:
        return None
    return Hom(A, B, tuple(m))


def enumerate_homs(A, B) -> list[Hom]:
    """Every homomorphism A -> B (same signature)."""
    if A.kind != B.kind:
        raise ModelError("homs between models of different sorts")
    if A.kind == "ring":
        gens = ring_generators(A)
        out = []
        for imgs in itertools.product(B.elements, repeat=len(gens)):
            m = _extend_ring_map(A, B, gens, imgs)
            if m is not None:
                out.append(Hom(A, B, m))
        return out
    return [Hom(A, B, m) for m in _lattice_homs(A, B)]


def _lattice_homs(L: FiniteDistLattice, M: FiniteDistLattice):
    # a bounded hom is the join-extension of its values on join-irreducibles;
    # it preserves meets iff phi(j) ∧ phi(k) ≤ ⋁{phi(i) : i ≤ j, k} for all j, k
    Js = L.join_irreducibles
    below = {j: [i for i in Js if L.leq[i][j]] for j in Js}
    phi: dict[int, int] = {}

    def lower_join(j, k):
        acc = M.bot
        for i in Js:
            if i in phi and L.leq[i][j] and L.leq[i][k]:
                acc = M.join[acc][phi[i]]
        return acc

    def rec(pos):
        if pos == len(Js):
            m = []
            for x in L.elements:
                acc = M.bot
                for j in Js:
                    if L.leq[j][x]:
                        acc = M.join[acc][phi[j]]
                m.append(acc)
            if m[L.top] == M.top and m[L.bot] == M.bot:
                yield tuple(m)
            return
        j = Js[pos]
        for y in M.elements:
            if any(not M.leq[phi[i]][y] for i in below[j] if i != j):
                continue
            phi[j] = y
            ok = all(M.leq[M.meet[y][phi[k]]][lower_join(j, k)] for k in Js[:pos])
            if ok:
                yield from rec(pos + 1)
            del phi[j]

    yield from rec(0)


def find_isomorphism(A, B) -> Hom | None:
    if A.kind != B.kind or A.size != B.size:
        return None
    if A.kind == "ring":
        if len(A.units) != len(B.units) or len(A.idempotents) != len(B.idempotents):
            return None
    elif len(A.join_irreducibles) != len(B.join_irreducibles):
        return None
    for h in enumerate_homs(A, B):
        if h.is_bijective:
            return h
    return None


def is_isomorphic(A, B) -> bool:
    return find_isomorphism(A, B) is not None


def trivial_model(kind: str):
    return make_zmod(1) if kind == "ring" else FiniteDistLattice(((True,),))


def initial_model(kind: str):
    if kind == "lattice":
        return chain(2)
    raise ModelError("the initial commutative ring Z is infinite and has no finite table")


def quotient_by_pairs(M, pairs) -> tuple[object, Hom]:
    """Coequalizing quotient: identify each pair (x, y)."""
    pairs = list(pairs)
    if M.kind == "ring":
        return quotient_ring(M, ideal_generated(M, [M.sub(x, y) for x, y in pairs]))
    return lattice_quotient(M, pairs)


# ---------------------------------------------------------------------------
# coproducts


def model_coproduct(A, B) -> tuple[object, Hom, Hom]:
    """Coproduct with both coprojections: tensor product of rings, or the
    lattice dual to the product of the join-irreducible posets."""
    if A.kind != B.kind:
        raise ModelError("coproduct of models of different sorts")
    if A.kind == "ring":
        return _ring_tensor(A, B)
    return _lattice_coproduct(A, B)


def _additive_presentation(A: FiniteRing):
    """Greedy additive generators with a triangular relation basis.

    Returns (gens, relation rows, coordinate map).  Every element has a unique
    mixed-radix coordinate vector over ``gens``.
    """
    gens: list[int] = []
    coords = {A.zero: ()}
    rows: list[list[int]] = []
    for x in A.elements:
        if x in coords:
            continue
        n, mx = 1, x
        while mx not in coords:
            n += 1
            mx = A.add[mx][x]
        rel = [-c for c in coords[mx]] + [n]
        k = len(gens)
        gens.append(x)
        for r in rows:
            r.append(0)
        rows.append(rel)
        new = {}
        mult = A.zero
        for t in range(n):
            for s, c in coords.items():
                new[A.add[s][mult]] = c + (t,)
            mult = A.add[mult][x]
        coords = new
        assert all(len(c) == k + 1 for c in coords.values())
    return gens, rows, coords


def _lattice_basis(vectors: Iterable[Sequence[int]], m: int) -> list[list[int] | None]:
    """Upper-triangular basis (row per pivot) of the integer lattice spanned."""
    basis: list[list[int] | None] = [None] * m
    for v in vectors:
        v = list(v)
        for p in range(m):
            if v[p] == 0:
                continue
            row = basis[p]
            if row is None:
                if v[p] < 0:
                    v = [-a for a in v]
                basis[p] = v
                break
            # combine row and v into a row with pivot gcd and a vector with zero there
            a, b = row[p], v[p]
            g, s, t = _xgcd(a, b)
            new_row = [s * r + t * w for r, w in zip(row, v)]
            v = [(b // g) * r - (a // g) * w for r, w in zip(row, v)]
            basis[p] = new_row
        # v reduced to zero or placed
    return basis


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _ring_tensor(A: FiniteRing, B: FiniteRing):
    ga, ra, ca = _additive_presentation(A)
    gb, rb, cb = _additive_presentation(B)
    k, l = len(ga), len(gb)
    m = k * l
    if m == 0:
        Z = make_zmod(1)
        return Z, Hom(A, Z, (0,) * A.size), Hom(B, Z, (0,) * B.size)
    rels = []
    for r in ra:
        for j in range(l):
            v = [0] * m
            for i in range(k):
                v[i * l + j] = r[i]
            rels.append(v)
    for s in rb:
        for i in range(k):
            v = [0] * m
            for j in range(l):
                v[i * l + j] = s[j]
            rels.append(v)
    basis = _lattice_basis(rels, m)
    assert all(row is not None for row in basis), "tensor of finite groups must be finite"
    diag = [row[p] for p, row in enumerate(basis)]

    def reduce(v):
        v = list(v)
        for p, row in enumerate(basis):
            q = v[p] // diag[p]
            if q:
                v = [a - q * r for a, r in zip(v, row)]
        return tuple(v)

    carrier = [tuple(c) for c in itertools.product(*(range(d) for d in diag))]
    index = {c: i for i, c in enumerate(carrier)}
    # structure constants: (a_i ⊗ b_j)(a_p ⊗ b_q) = (a_i a_p) ⊗ (b_j b_q)
    C = np.zeros((m, m, m), dtype=np.int64)
    for i in range(k):
        for p in range(k):
            va = ca[A.mul[ga[i]][ga[p]]]
            for j in range(l):
                for q in range(l):
                    vb = cb[B.mul[gb[j]][gb[q]]]
                    C[i * l + j, p * l + q] = np.outer(va, vb).reshape(-1)
    V = np.asarray(carrier, dtype=np.int64)
    n = len(carrier)
    add = tuple(tuple(index[reduce(V[x] + V[y])] for y in range(n)) for x in range(n))
    prods = np.einsum("ap,bq,pqr->abr", V, V, C)
    mul = tuple(tuple(index[reduce(prods[x, y])] for y in range(n)) for x in range(n))
    one_a, one_b = ca[A.one], cb[B.one]

    def inj(va, vb):
        return index[reduce(np.outer(va, vb).reshape(-1))]

    T = FiniteRing(add, mul, index[reduce([0] * m)], inj(one_a, one_b), labels=tuple(carrier))
    ia = Hom(A, T, tuple(inj(ca[x], one_b) for x in A.elements))
    ib = Hom(B, T, tuple(inj(one_a, cb[y]) for y in B.elements))
    return T, ia, ib


def _lattice_coproduct(A: FiniteDistLattice, B: FiniteDistLattice):
    JA, JB = A.join_irreducibles, B.join_irreducibles
    pts = [(a, b) for a in JA for b in JB]
    idx = {p: i for i, p in enumerate(pts)}
    le = [[A.leq[p[0]][q[0]] and B.leq[p[1]][q[1]] for q in pts] for p in pts]
    sets = _downsets(len(pts), le)
    C = lattice_from_elements(sets, lambda s, t: s <= t)
    index = {s: i for i, s in enumerate(sets)}

    def down_a(x):
        return frozenset(idx[(a, b)] for a in JA for b in JB if A.leq[a][x])

    def down_b(y):
        return frozenset(idx[(a, b)] for a in JA for b in JB if B.leq[b][y])

    ia = Hom(A, C, tuple(index[down_a(x)] for x in A.elements))
    ib = Hom(B, C, tuple(index[down_b(y)] for y in B.elements))
    return C, ia, ib


def model_pushout(f: Hom, g: Hom) -> tuple[object, Hom, Hom]:
    """Pushout of B <-f- A -g-> C as a quotient of the coproduct."""
    C, ib, ic = model_coproduct(f.target, g.target)
    Q, q = quotient_by_pairs(C, [(ib(f(a)), ic(g(a))) for a in f.source.elements])
    return Q, ib.then(q), ic.then(q)


# ---------------------------------------------------------------------------
# JSON


def model_from_json(obj):
    if not isinstance(obj, dict):
        raise ModelError("model must be a JSON object")
    kind = obj.get("kind")
    if kind is None:
        if any(k in obj for k in ("zmod", "product", "tables", "dual_numbers", "quotient")):
            kind = "ring"
        elif any(k in obj for k in ("chain", "diamond", "downsets", "leq")):
            kind = "lattice"
    if kind == "ring":
        if "zmod" in obj:
            return make_zmod(int(obj["zmod"]))
        if "product" in obj:
            factors = [
                make_zmod(int(f)) if isinstance(f, int) else model_from_json(f)
                for f in obj["product"]
            ]
            return ring_product(factors)
        if "dual_numbers" in obj:
            return dual_numbers(int(obj["dual_numbers"]))
        if "quotient" in obj:
            spec = obj["quotient"]
            base = model_from_json(spec["of"])
            return quotient_by_ideal(base, [int(g) for g in spec["by"]])[0]
        if "tables" in obj:
            t = obj["tables"]
            R = FiniteRing(
                tuple(tuple(int(v) for v in row) for row in t["add"]),
                tuple(tuple(int(v) for v in row) for row in t["mul"]),
                int(t["zero"]),
                int(t["one"]),
            )
            R.validate()
            return R
        raise ModelError("unrecognised ring description")
    if kind == "lattice":
        if "chain" in obj:
            return chain(int(obj["chain"]))
        if obj.get("diamond"):
            return diamond()
        if "downsets" in obj:
            d = obj["downsets"]
            return downset_lattice(int(d["n"]), [tuple(p) for p in d.get("leq", [])])
        if "leq" in obj:
            L = FiniteDistLattice(tuple(tuple(bool(v) for v in row) for row in obj["leq"]))
            L.validate()
            return L
        raise ModelError("unrecognised lattice description")
    raise ModelError(f"unknown model kind {kind!r}")


def model_to_json(M) -> dict:
    if M.kind == "ring":
        return {
            "kind": "ring",
            "tables": {
                "add": [list(r) for r in M.add],
                "mul": [list(r) for r in M.mul],
                "zero": M.zero,
                "one": M.one,
            },
        }
    return {"kind": "lattice", "leq": [list(r) for r in M.leq]}


def hom_to_json(h: Hom) -> dict:
    return {"map": list(h.map)}


def hom_from_json(obj, source, target) -> Hom:
    h = Hom(source, target, tuple(int(v) for v in obj["map"]))
    if not h.is_valid():
        raise ModelError("map is not a homomorphism")
    return h


def describe(M) -> str:
    """Short iso-class label when one is recognised, e.g. ``Z/4`` or ``chain(3)``."""
    if M.kind == "ring":
        n = M.size
        if n == 1:
            return "0"
        # cyclic additive group generated by 1
        if _additive_order(M, M.one) == n:
            return f"Z/{n}"
        return f"ring({n})"
    if all(M.leq[a][b] or M.leq[b][a] for a in M.elements for b in M.elements):
        return f"chain({M.size})"
    return f"lattice({M.size})"


def _additive_order(A: FiniteRing, x: int) -> int:
    k, y = 1, x
    while y != A.zero:
        y = A.add[y][x]
        k += 1
    return k


def zmod_iso_label(n: int) -> str:
    return f"Z/{n}"

