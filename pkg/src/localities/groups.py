"""Finite groups as fully materialized multiplication tables over 0-based ids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Perm = tuple[int, ...]

DEFAULT_ORDER_CAP = 10_000


class SizeCapExceeded(ValueError):
    """A closure grew past the configured order cap."""


# ---------------------------------------------------------------------------
# permutations


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def pad_perm(p: Sequence[int], degree: int) -> Perm:
    return tuple(p) + tuple(range(len(p), degree))


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply p, then q (maps compose left to right)."""
    degree = max(len(p), len(q))
    pp = pad_perm(p, degree)
    qq = pad_perm(q, degree)
    return tuple(qq[pp[i]] for i in range(degree))


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_string(p: Perm) -> str:
    """Cycle notation on 1-based points; the identity prints as '()'."""
    seen = [False] * len(p)
    parts: list[str] = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        nxt = p[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = p[nxt]
        parts.append("(" + " ".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts) if parts else "()"


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """A finite group given by a total multiplication table.

    Elements are ids 0..order-1.  Associativity, the two-sided identity and
    two-sided inverses are checked exhaustively on construction, so anything
    holding a FiniteGroup holds an actual group.
    """

    def __init__(
        self,
        mult: Sequence[Sequence[int]] | np.ndarray,
        labels: Sequence[str] | None = None,
        perms: Sequence[Perm] | None = None,
    ):
        table = np.asarray(mult, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("multiplication table must be square")
        n = int(table.shape[0])
        if n == 0:
            raise ValueError("a group has at least one element")
        if table.min() < 0 or table.max() >= n:
            raise ValueError("table entries out of range")

        line = np.arange(n, dtype=np.int32)
        identity = None
        for e in range(n):
            if np.array_equal(table[e], line) and np.array_equal(table[:, e], line):
                identity = e
                break
        if identity is None:
            raise ValueError("table has no two-sided identity")
        for a in range(n):
            if not np.array_equal(table[table[a]], table[a][table]):
                raise ValueError(f"table is not associative (row {a})")
        inv = np.full(n, -1, dtype=np.int64)
        for a, b in zip(*np.nonzero(table == identity)):
            if table[b, a] != identity:
                raise ValueError(f"element {a} has a one-sided inverse only")
            inv[a] = b
        if (inv < 0).any():
            raise ValueError("some element has no inverse")

        self.order = n
        self.mult = table
        self.inv: tuple[int, ...] = tuple(int(x) for x in inv)
        self.identity = int(identity)
        self.perms: tuple[Perm, ...] | None = tuple(perms) if perms is not None else None
        if labels is not None:
            if len(labels) != n:
                raise ValueError("label count does not match order")
            self.labels = tuple(str(s) for s in labels)
        elif self.perms is not None:
            self.labels = tuple(cycle_string(p) for p in self.perms)
        else:
            self.labels = tuple(f"g{i}" for i in range(n))
        self._perm_index = {p: i for i, p in enumerate(self.perms)} if self.perms else None
        self._subgroup_cache: list[SubgroupRef] | None = None

    def mul(self, a: int, b: int) -> int:
        return int(self.mult[a, b])

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def conj(self, x: int, g: int) -> int:
        """Right conjugation x^g = g^-1 x g."""
        return int(self.mult[self.mult[self.inv[g], x], g])

    def fold(self, word: Iterable[int]) -> int:
        out = self.identity
        for x in word:
            out = int(self.mult[out, x])
        return out

    def elements(self) -> range:
        return range(self.order)

    def index_of_perm(self, p: Sequence[int]) -> int:
        if self._perm_index is None:
            raise ValueError("group was not built from permutations")
        key = tuple(p)
        degree = len(next(iter(self._perm_index)))
        return self._perm_index[pad_perm(key, degree)]

    def __repr__(self) -> str:  # pragma: no cover
        return f"FiniteGroup(order={self.order})"


def generate_group(
    generators: Sequence[Sequence[int]], order_cap: int = DEFAULT_ORDER_CAP
) -> FiniteGroup:
    """Close permutations under composition and return the Cayley table.

    Elements are ordered by their image tuples, which puts the identity at
    id 0 and makes every derived report reproducible.
    """
    degree = max((len(p) for p in generators), default=0)
    gens = [pad_perm(tuple(p), degree) for p in generators]
    for g in gens:
        if not is_perm(g):
            raise ValueError(f"not a permutation: {g}")
    e = identity_perm(degree)
    found = {e}
    frontier = [e]
    while frontier:
        fresh = []
        for p in frontier:
            for g in gens:
                q = compose(p, g)
                if q not in found:
                    if len(found) >= order_cap:
                        raise SizeCapExceeded(
                            f"closure exceeds the order cap of {order_cap}"
                        )
                    found.add(q)
                    fresh.append(q)
        frontier = fresh
    elems = sorted(found)
    index = {p: i for i, p in enumerate(elems)}
    mult = [[index[compose(a, b)] for b in elems] for a in elems]
    return FiniteGroup(mult, perms=elems)


class SubgroupRef:
    """A validated subgroup of a FiniteGroup, kept as a member id set."""

    def __init__(self, parent: FiniteGroup, members: Iterable[int]):
        mem = frozenset(int(x) for x in members)
        if parent.identity not in mem:
            raise ValueError("subgroup must contain the identity")
        for a in mem:
            if parent.inv[a] not in mem:
                raise ValueError(f"subgroup not closed under inversion at {a}")
            row = parent.mult[a]
            for b in mem:
                if int(row[b]) not in mem:
                    raise ValueError(f"subgroup not closed under products at ({a},{b})")
        self.parent = parent
        self.members = mem

    @property
    def order(self) -> int:
        return len(self.members)

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """Export as a standalone FiniteGroup plus the member id map."""
        elems = self.sorted_members()
        pos = {g: i for i, g in enumerate(elems)}
        mult = [[pos[self.parent.mul(a, b)] for b in elems] for a in elems]
        labels = [self.parent.labels[g] for g in elems]
        return FiniteGroup(mult, labels=labels), elems

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SubgroupRef)
            and other.parent is self.parent
            and other.members == self.members
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:  # pragma: no cover
        return f"SubgroupRef(order={self.order})"


def closure_members(G: FiniteGroup, seed: Iterable[int]) -> frozenset[int]:
    """Member set of the least subgroup containing seed."""
    inside = np.zeros(G.order, dtype=bool)
    inside[G.identity] = True
    frontier = np.unique([int(x) for x in seed if not inside[int(x)]]).astype(np.int64)
    inside[frontier] = True
    while frontier.size:
        members = np.nonzero(inside)[0]
        prods = np.concatenate(
            (
                G.mult[np.ix_(members, frontier)].ravel(),
                G.mult[np.ix_(frontier, members)].ravel(),
                np.asarray(G.inv, dtype=np.int64)[frontier],
            )
        )
        fresh = np.unique(prods)
        fresh = fresh[~inside[fresh]]
        inside[fresh] = True
        frontier = fresh
    return frozenset(int(x) for x in np.nonzero(inside)[0])


def subgroup_closure(G: FiniteGroup, seed: Iterable[int]) -> SubgroupRef:
    """Least subgroup of G containing the seed elements."""
    return SubgroupRef(G, closure_members(G, seed))


def all_subgroups(G: FiniteGroup) -> list[SubgroupRef]:
    """Every subgroup of G, sorted by (order, member ids).

    Breadth-first closure search: grow each known subgroup by one outside
    element and close.  Exhaustive at the desk scale this engine targets.
    """
    if G._subgroup_cache is not None:
        return list(G._subgroup_cache)
    trivial = frozenset({G.identity})
    found = {trivial}
    queue = [trivial]
    while queue:
        base = queue.pop()
        # one extension candidate per coset: closure(H ∪ {hx}) = closure(H ∪ {x})
        covered = set(base)
        base_list = sorted(base)
        for x in G.elements():
            if x in covered:
                continue
            covered.update(int(G.mult[h, x]) for h in base_list)
            grown = closure_members(G, base | {x})
            if grown not in found:
                found.add(grown)
                queue.append(grown)
    refs = [SubgroupRef(G, mem) for mem in found]
    refs.sort(key=lambda r: (r.order, r.sorted_members()))
    G._subgroup_cache = refs
    return list(refs)


def is_normal_subset(G: FiniteGroup, members: frozenset[int]) -> bool:
    return all(G.conj(x, g) in members for x in members for g in G.elements())


@dataclass
class Landmarks:
    center: SubgroupRef
    frattini: SubgroupRef
    normal_subgroups: list[SubgroupRef]


def group_landmarks(G: FiniteGroup) -> Landmarks:
    """Center, Frattini subgroup and the list of normal subgroups."""
    center = frozenset(
        int(g) for g in G.elements() if np.array_equal(G.mult[g], G.mult[:, g])
    )
    subs = all_subgroups(G)
    proper = [s.members for s in subs if s.order < G.order]
    maximal = [
        m for m in proper if not any(m < other for other in proper)
    ]
    frat = frozenset(G.elements())
    for m in maximal:
        frat &= m
    normals = [s for s in subs if is_normal_subset(G, s.members)]
    return Landmarks(
        center=SubgroupRef(G, center),
        frattini=SubgroupRef(G, frat),
        normal_subgroups=normals,
    )


def _p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        out *= p
        n //= p
    return out


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def sylow_p(G: FiniteGroup, p: int) -> SubgroupRef:
    """One Sylow p-subgroup, chosen as the least candidate member list.

    Brute force over the subgroup lattice; deterministic and plenty fast at
    the orders this engine works with.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    target = _p_part(G.order, p)
    if target == 1:
        return SubgroupRef(G, {G.identity})
    best = min(
        (s for s in all_subgroups(G) if s.order == target),
        key=lambda s: s.sorted_members(),
    )
    return best
