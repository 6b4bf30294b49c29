"""Localities: finite partial groups with a distinguished p-subgroup S and
an object family Delta of subgroups of S.

The word domain of a locality is decided by threading: a word is
multipliable exactly when the subgroup of S that conjugates successfully
through all its letters (staying inside S at every step) belongs to Delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .groups import (
    FiniteGroup,
    SubgroupRef,
    all_subgroups,
    closure_members,
    sylow_p,
    _is_prime,
    _p_part,
)
from .partial import (
    PartialGroup,
    SubsetHandle,
    Word,
    classify_subset,
    partial_subgroup_closure,
)
from .report import CheckRecord, VerificationReport


class LocalityConstructionError(RuntimeError):
    """Construction produced an object that fails its own axioms."""

    def __init__(self, report: VerificationReport):
        super().__init__("construction failed verification:\n" + report.text())
        self.report = report


@dataclass
class DeltaFamily:
    """The object family: a set of subgroups of S, given by member id sets."""

    sylow: frozenset[int]
    members: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("Delta must be nonempty")
        for P in self.members:
            if not P <= self.sylow:
                raise ValueError("Delta members must be subgroups of S")
        if self.sylow not in self.members:
            raise ValueError("Delta must contain S itself")

    def __contains__(self, P: frozenset[int]) -> bool:
        return P in self.members

    def translate(self, mapping: dict[int, int]) -> "DeltaFamily":
        return DeltaFamily(
            sylow=frozenset(mapping[x] for x in self.sylow),
            members=frozenset(
                frozenset(mapping[x] for x in P) for P in self.members
            ),
        )


def delta_close(
    S: SubgroupRef, seeds: Sequence[SubgroupRef], ambient_group: FiniteGroup
) -> DeltaFamily:
    """Least family containing the seeds that is closed under overgroups in S
    and under adding every Q <= S containing an ambient conjugate of a member.
    """
    if not seeds:
        raise ValueError("delta_close needs at least one seed")
    for seed in seeds:
        if not seed.members <= S.members:
            raise ValueError("seeds must be subgroups of S")
    s_group, s_elems = S.as_group()
    pos = {g: i for i, g in enumerate(s_elems)}
    lattice = [frozenset(s_elems[i] for i in sub.members) for sub in all_subgroups(s_group)]

    family: set[frozenset[int]] = set()
    queue = [seed.members for seed in seeds]
    while queue:
        P = queue.pop()
        if P in family:
            continue
        family.add(P)
        for Q in lattice:
            if P < Q and Q not in family:
                queue.append(Q)
        for g in ambient_group.elements():
            img = frozenset(ambient_group.conj(x, g) for x in P)
            if img <= S.members and img not in family:
                queue.append(img)
    return DeltaFamily(sylow=S.members, members=frozenset(family))


# ---------------------------------------------------------------------------
# the threading automaton


class ThreadAutomaton:
    """Tracks, per word prefix, which elements of S conjugate through it.

    A state is the injective partial map start -> current over S positions;
    prefixes with the same state behave identically under extension, which
    collapses word sweeps to walks over a small interned state set.
    """

    def __init__(
        self,
        s_elems: tuple[int, ...],
        step_of: Callable[[int], tuple[int, ...]],
        n_elements: int,
        in_delta_of: Callable[[frozenset[int]], bool],
    ):
        self.s_elems = s_elems
        self._step_of = step_of
        self._n = n_elements
        self._in_delta_of = in_delta_of
        self._steps: dict[int, tuple[int, ...]] = {}
        start = tuple((i, i) for i in range(len(s_elems)))
        self.states: list[tuple[tuple[int, int], ...]] = [start]
        self._state_ids: dict[tuple, int] = {start: 0}
        self.start_sets: list[frozenset[int]] = [frozenset(s_elems)]
        self.in_delta: list[bool] = [in_delta_of(self.start_sets[0])]
        self._trans: dict[tuple[int, int], int] = {}

    def _step_map(self, g: int) -> tuple[int, ...]:
        got = self._steps.get(g)
        if got is None:
            got = self._step_of(g)
            self._steps[g] = got
        return got

    def step(self, sid: int, g: int) -> int:
        key = (sid, g)
        got = self._trans.get(key)
        if got is not None:
            return got
        mp = self._step_map(g)
        new_pairs = []
        for start, cur in self.states[sid]:
            img = mp[cur]
            if img >= 0:
                new_pairs.append((start, img))
        state = tuple(new_pairs)
        nid = self._state_ids.get(state)
        if nid is None:
            nid = len(self.states)
            self.states.append(state)
            self._state_ids[state] = nid
            starts = frozenset(self.s_elems[a] for a, _ in state)
            self.start_sets.append(starts)
            self.in_delta.append(self._in_delta_of(starts))
        self._trans[key] = nid
        return nid

    def walk(self, word: Word) -> int:
        sid = 0
        for g in word:
            sid = self.step(sid, g)
        return sid

    def full_closure(self, letters: Iterable[int] | None = None) -> tuple[bool, Word | None]:
        """Explore all states reachable over the letters (default: everything).

        Returns (every reachable state lies in Delta, witness word if not).
        """
        alphabet = list(letters) if letters is not None else list(range(self._n))
        seen = {0}
        queue: list[tuple[int, Word]] = [(0, ())]
        ok = True
        witness = None
        while queue:
            sid, path = queue.pop()
            if not self.in_delta[sid]:
                return False, path
            for g in alphabet:
                nid = self.step(sid, g)
                if nid not in seen:
                    seen.add(nid)
                    queue.append((nid, path + (g,)))
        return ok, witness


class LocalityPartialGroup(PartialGroup):
    """Partial group whose domain is decided by the threading subgroup."""

    def __init__(
        self,
        size: int,
        identity: int,
        inv: tuple[int, ...],
        labels: tuple[str, ...],
        mul_raw: Callable[[int, int], int],
        p: int,
        s_elems: tuple[int, ...],
        delta_sets: frozenset[frozenset[int]],
        conj_step_of: Callable[[int], tuple[int, ...]],
    ):
        self.size = size
        self.identity = identity
        self._inv = inv
        self.labels = labels
        self._mul_raw = mul_raw
        self.p = p
        self.s_elems = s_elems
        self.delta_sets = delta_sets
        self.automaton = ThreadAutomaton(
            s_elems, conj_step_of, size, lambda starts: starts in delta_sets
        )
        self._total: bool | None = None

    def inverse(self, x: int) -> int:
        return self._inv[x]

    def in_domain(self, word: Word) -> bool:
        return self.automaton.in_delta[self.automaton.walk(word)]

    def _raw_product(self, word: Word) -> int:
        out = self.identity
        for x in word:
            out = self._mul_raw(out, x)
        return out

    def mul2(self, a: int, b: int) -> int | None:
        if self.in_domain((a, b)):
            return self._mul_raw(a, b)
        return None

    def walk_start(self):
        return 0

    def walk_step(self, state: int, x: int):
        nid = self.automaton.step(state, x)
        return nid if self.automaton.in_delta[nid] else None

    @property
    def domain_is_total(self) -> bool:  # type: ignore[override]
        if self._total is None:
            ok, _ = self.automaton.full_closure()
            self._total = ok
        return self._total

    def thread_subgroup(self, word: Word) -> frozenset[int]:
        """The subgroup of S whose elements conjugate through the word."""
        return self.automaton.start_sets[self.automaton.walk(word)]

    def words_all_in_domain(self, members: frozenset[int]):
        ok, witness = self.automaton.full_closure(sorted(members))
        return ok, "domain-closure", witness

    def _vector_components(self):
        if not self.domain_is_total:
            return None
        elems = tuple(self.elements())
        mult = [[self._mul_raw(a, b) for b in elems] for a in elems]
        return [(elems, FiniteGroup(mult, labels=self.labels))]


# ---------------------------------------------------------------------------
# the locality proper


@dataclass
class ConjChain:
    """A witnessing chain of Delta members for a domain word."""

    word: Word
    stations: tuple[frozenset[int], ...]


class Locality:
    """A partial group together with S, Delta, and conjugation machinery."""

    def __init__(
        self,
        pg: PartialGroup,
        p: int,
        sylow: Iterable[int],
        delta: DeltaFamily,
        thread_step_of: Callable[[int], tuple[int, ...]] | None = None,
    ):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.pg = pg
        self.p = p
        self.sylow = tuple(sorted(sylow))
        self.sylow_set = frozenset(self.sylow)
        if delta.sylow != self.sylow_set:
            raise ValueError("delta family is not over S")
        self.delta = delta
        self._s_pos = {g: i for i, g in enumerate(self.sylow)}
        if isinstance(pg, LocalityPartialGroup):
            self.automaton = pg.automaton
        else:
            step = thread_step_of or self._definitional_step
            self.automaton = ThreadAutomaton(
                self.sylow, step, pg.size, lambda starts: starts in delta.members
            )
        self._s_group: FiniteGroup | None = None
        self._s_group_elems: tuple[int, ...] | None = None
        self._conj_full: list[tuple[int, ...]] | None = None

    # -- basic maps ----------------------------------------------------------

    def _definitional_step(self, g: int) -> tuple[int, ...]:
        """Conjugation map on S positions computed straight from pi."""
        out = []
        ginv = self.pg.inverse(g)
        for s in self.sylow:
            v = self.pg.pi((ginv, s, g))
            out.append(self._s_pos.get(v, -1) if v is not None else -1)
        return tuple(out)

    def conjugate(self, x: int, g: int) -> int | None:
        """x^g = pi((g^-1, x, g)) when defined."""
        return self.pg.pi((self.pg.inverse(g), x, g))

    def conj_table(self) -> list[tuple[int, ...]]:
        """Full table x -> (x^g per g), with -1 for undefined pairs."""
        if self._conj_full is None:
            tbl = []
            for x in self.pg.elements():
                row = []
                for g in self.pg.elements():
                    v = self.conjugate(x, g)
                    row.append(-1 if v is None else v)
                tbl.append(tuple(row))
            self._conj_full = tbl
        return self._conj_full

    def conjugate_set(self, X: Iterable[int], g: int) -> frozenset[int] | None:
        out = set()
        for x in X:
            v = self.conjugate(x, g)
            if v is None:
                return None
            out.add(v)
        return frozenset(out)

    def thread_subgroup(self, word: Word) -> frozenset[int]:
        """S_w: the members of S threading through the word inside S."""
        return self.automaton.start_sets[self.automaton.walk(tuple(word))]

    def s_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """S as an honest FiniteGroup plus the member id map."""
        if self._s_group is None:
            elems = self.sylow
            pos = self._s_pos
            mult = [
                [pos[self.pg.mul2(a, b)] for b in elems] for a in elems
            ]
            labels = [self.pg.labels[g] for g in elems]
            self._s_group = FiniteGroup(mult, labels=labels)
            self._s_group_elems = elems
        return self._s_group, self.sylow

    def s_subgroup_sets(self) -> list[frozenset[int]]:
        grp, elems = self.s_group()
        return [
            frozenset(elems[i] for i in sub.members) for sub in all_subgroups(grp)
        ]

    def in_domain(self, word: Word) -> bool:
        return self.pg.in_domain(tuple(word))

    def pi(self, word: Word) -> int | None:
        return self.pg.pi(tuple(word))

    def elements(self) -> range:
        return self.pg.elements()

    @property
    def size(self) -> int:
        return self.pg.size

    @property
    def identity(self) -> int:
        return self.pg.identity

    def normalizer(self, X: Iterable[int]) -> frozenset[int]:
        """N_L(X): elements g with X inside D(g) and X^g = X."""
        X = frozenset(X)
        out = set()
        for g in self.pg.elements():
            img = self.conjugate_set(X, g)
            if img is not None and img == X:
                out.add(g)
        return frozenset(out)


def s_of_word(loc: Locality, word: Iterable[int]) -> frozenset[int]:
    """The threading subgroup S_w of a word (S itself for the empty word)."""
    return loc.thread_subgroup(tuple(word))


def conjugate_elem(loc: Locality, x: int, g: int) -> int | None:
    return loc.conjugate(x, g)


def domain_chain(loc: Locality, word: Iterable[int]) -> ConjChain | None:
    """A canonical witnessing chain for a domain word, None outside the domain.

    The canonical choice starts at S_w and conjugates station by station.
    """
    word = tuple(word)
    if not loc.in_domain(word):
        return None
    station = loc.thread_subgroup(word)
    stations = [station]
    for g in word:
        nxt = loc.conjugate_set(station, g)
        if nxt is None:
            return None
        station = nxt
        stations.append(station)
    return ConjChain(word=word, stations=tuple(stations))


def chain_is_valid(loc: Locality, chain: ConjChain) -> bool:
    """Check the chain condition: consecutive stations conjugate correctly."""
    if len(chain.stations) != len(chain.word) + 1:
        return False
    for P, g, Q in zip(chain.stations, chain.word, chain.stations[1:]):
        if P not in loc.delta.members or Q not in loc.delta.members:
            return False
        img = loc.conjugate_set(P, g)
        if img is None or img != Q:
            return False
    return bool(chain.stations) and chain.stations[0] in loc.delta.members


@dataclass
class NormalizerResult:
    handle: SubsetHandle
    group: FiniteGroup | None
    member_map: tuple[int, ...] | None


def normalizer_in_L(loc: Locality, X: Iterable[int]) -> NormalizerResult:
    """N_L(X) classified; exported as a FiniteGroup when X is in Delta."""
    X = frozenset(X)
    members = loc.normalizer(X)
    handle = classify_subset(loc.pg, members, p=loc.p)
    group = None
    mapping = None
    if X in loc.delta.members and handle.is_subgroup:
        elems = tuple(sorted(members))
        pos = {g: i for i, g in enumerate(elems)}
        mult = [[pos[loc.pg.mul2(a, b)] for b in elems] for a in elems]
        group = FiniteGroup(mult, labels=[loc.pg.labels[g] for g in elems])
        mapping = elems
    return NormalizerResult(handle=handle, group=group, member_map=mapping)


@dataclass
class ConjIso:
    """The conjugation isomorphism N_L(P) -> N_L(P^g) induced by g."""

    g: int
    source: frozenset[int]
    target: frozenset[int]
    source_members: frozenset[int]
    target_members: frozenset[int]
    mapping: dict[int, int]
    bijective: bool
    product_preserving: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.product_preserving


def conj_iso(loc: Locality, P: Iterable[int], g: int) -> ConjIso:
    """Build and verify the conjugation map c_g on N_L(P), P in Delta, P <= S_g."""
    P = frozenset(P)
    if P not in loc.delta.members:
        raise ValueError("P must belong to Delta")
    if not P <= loc.thread_subgroup((g,)):
        raise ValueError("P must lie inside S_g")
    Q = loc.conjugate_set(P, g)
    if Q is None:
        raise ValueError("P does not conjugate through g")
    src = loc.normalizer(P)
    tgt = loc.normalizer(Q)
    mapping = {}
    bijective = True
    for x in sorted(src):
        v = loc.conjugate(x, g)
        if v is None or v not in tgt:
            bijective = False
            break
        mapping[x] = v
    if bijective:
        bijective = len(set(mapping.values())) == len(src) == len(tgt)
    preserving = bijective
    if bijective:
        for x in src:
            for y in src:
                xy = loc.pg.mul2(x, y)
                fg = loc.pg.mul2(mapping[x], mapping[y])
                if xy is None or fg is None or mapping.get(xy) != fg:
                    preserving = False
                    break
            if not preserving:
                break
    return ConjIso(
        g=g,
        source=P,
        target=Q if Q is not None else frozenset(),
        source_members=src,
        target_members=tgt,
        mapping=mapping,
        bijective=bijective,
        product_preserving=preserving,
    )


# ---------------------------------------------------------------------------
# construction from a group


def locality_from_group(
    M: FiniteGroup, p: int, delta: DeltaFamily, check_len: int = 2
) -> Locality:
    """Restrict M to {g : S cap S^(g^-1) in Delta} with threading-decided words.

    Delta lives in M's id space (over a Sylow p-subgroup of M).  The result
    is verified with check_locality and rejected if any axiom fails.
    """
    S_m = delta.sylow
    target = _p_part(M.order, p)
    if len(S_m) != target:
        raise ValueError("delta is not over a full Sylow p-subgroup")
    SubgroupRef(M, S_m)

    s_sorted = tuple(sorted(S_m))
    keep = []
    for g in M.elements():
        sg = frozenset(s for s in s_sorted if M.conj(s, g) in S_m)
        if sg in delta.members:
            keep.append(g)
    to_ambient = tuple(keep)
    to_local = {g: i for i, g in enumerate(keep)}
    for g in keep:
        if M.inv[g] not in to_local:
            raise LocalityConstructionError(
                VerificationReport(
                    "locality construction",
                    [
                        CheckRecord(
                            name="inversion-closure",
                            status="fail",
                            detail=f"element {M.labels[g]} kept but its inverse dropped",
                        )
                    ],
                )
            )

    local_delta = delta.translate(to_local)
    s_local = tuple(to_local[s] for s in s_sorted)
    keep_set = set(keep)

    def mul_raw(a: int, b: int) -> int:
        v = M.mul(to_ambient[a], to_ambient[b])
        if v not in keep_set:
            raise LocalityConstructionError(
                VerificationReport(
                    "locality construction",
                    [
                        CheckRecord(
                            name="product-closure",
                            status="fail",
                            detail=f"domain product escapes the element set at ({a},{b})",
                        )
                    ],
                )
            )
        return to_local[v]

    s_pos_local = {to_local[s]: i for i, s in enumerate(s_sorted)}

    def conj_step(gl: int) -> tuple[int, ...]:
        g = to_ambient[gl]
        out = []
        for s in s_sorted:
            v = M.conj(s, g)
            out.append(s_pos_local[to_local[v]] if v in S_m else -1)
        return tuple(out)

    pg = LocalityPartialGroup(
        size=len(keep),
        identity=to_local[M.identity],
        inv=tuple(to_local[M.inv[g]] for g in keep),
        labels=tuple(M.labels[g] for g in keep),
        mul_raw=mul_raw,
        p=p,
        s_elems=s_local,
        delta_sets=local_delta.members,
        conj_step_of=conj_step,
    )
    loc = Locality(pg, p, s_local, local_delta)
    loc.to_ambient = to_ambient  # type: ignore[attr-defined]
    loc.to_local = to_local  # type: ignore[attr-defined]
    loc.ambient = M  # type: ignore[attr-defined]
    report = check_locality(loc, max_len=check_len)
    if not report.ok:
        raise LocalityConstructionError(report)
    return loc


def as_locality(
    pg: PartialGroup, p: int, sylow: Iterable[int], delta_members: Iterable[frozenset[int]]
) -> Locality:
    """Wrap an arbitrary partial group as a locality candidate (unchecked).

    Conjugation for the threading machinery is read off pi directly; run
    check_locality to find out whether the axioms actually hold.
    """
    sylow = frozenset(sylow)
    delta = DeltaFamily(sylow=sylow, members=frozenset(delta_members) | {sylow})
    return Locality(pg, p, sylow, delta)


# ---------------------------------------------------------------------------
# verification


def _p_subgroup_above(loc: Locality, base: frozenset[int]) -> tuple | None:
    """A p-subgroup strictly above base reached by one closure extension."""
    pg = loc.pg
    for x in pg.elements():
        if x in base:
            continue
        grown = partial_subgroup_closure(pg, base | {x})
        if len(grown) == len(base):
            continue
        k = len(grown)
        while k % loc.p == 0:
            k //= loc.p
        if k != 1:
            continue
        ok, _, _ = pg.words_all_in_domain(grown)
        if ok:
            return (x, grown)
    return None


def check_locality(loc: Locality, max_len: int = 2) -> VerificationReport:
    """Verify the three locality axioms plus structural sanity.

    (L1) S is maximal among p-subgroups; (L2) a word is in the domain iff a
    conjugation chain through Delta witnesses it, for all words up to
    max_len; (L3) Delta is closed under overgroups of images inside S.
    """
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    checks: list[CheckRecord] = []
    pg = loc.pg

    # S in Delta and Delta members are proper subgroups of S
    delta_ok = loc.sylow_set in loc.delta.members
    lattice = set(loc.s_subgroup_sets())
    stray = [P for P in loc.delta.members if P not in lattice]
    checks.append(
        CheckRecord(
            name="delta-well-formed",
            status="pass" if delta_ok and not stray else "fail",
            witnesses=[sorted(next(iter(stray)))] if stray else [],
            detail="S belongs to Delta and members are subgroups of S",
        )
    )

    # (L1)
    ok_s, _, bad_word = pg.words_all_in_domain(loc.sylow_set)
    order = len(loc.sylow_set)
    k = order
    while k % loc.p == 0:
        k //= loc.p
    is_p_group = k == 1
    above = _p_subgroup_above(loc, loc.sylow_set) if ok_s and is_p_group else None
    l1_ok = ok_s and is_p_group and above is None
    wit = []
    if not ok_s:
        wit.append(("S-not-fully-multipliable", bad_word))
    if not is_p_group:
        wit.append(("S-order-not-p-power", order))
    if above is not None:
        wit.append(("larger-p-subgroup", sorted(above[1])))
    checks.append(
        CheckRecord(
            name="L1-sylow-maximal",
            status="pass" if l1_ok else "fail",
            witnesses=wit,
            detail="S is a p-subgroup and no p-subgroup properly contains it",
        )
    )

    # (L2): domain decision vs chain existence, all words up to max_len
    delta_list = sorted(loc.delta.members, key=sorted)
    delta_idx = {P: i for i, P in enumerate(delta_list)}
    chain_step: list[tuple[int, ...]] = []
    for P in delta_list:
        row = []
        for g in pg.elements():
            img = loc.conjugate_set(P, g)
            row.append(delta_idx.get(img, -1) if img is not None else -1)
        chain_step.append(tuple(row))
    full_front = frozenset(range(len(delta_list)))
    mismatches: list[tuple] = []
    prop_e_mismatches: list[tuple] = []

    def sweep(word: Word, front: frozenset[int], budget: int) -> None:
        if budget == 0 or len(mismatches) + len(prop_e_mismatches) > 20:
            return
        for g in pg.elements():
            w = word + (g,)
            nxt = frozenset(
                t for t in (chain_step[i][g] for i in front) if t >= 0
            )
            in_dom = pg.in_domain(w)
            if in_dom != bool(nxt):
                mismatches.append((w, in_dom, bool(nxt)))
            if (loc.thread_subgroup(w) in loc.delta.members) != in_dom:
                prop_e_mismatches.append(w)
            if nxt:
                sweep(w, nxt, budget - 1)

    sweep((), full_front, max_len)
    checks.append(
        CheckRecord(
            name="L2-domain-iff-chain",
            status="pass" if not mismatches else "fail",
            witnesses=mismatches[:10],
            detail=f"chain existence matches the domain on words up to length {max_len}",
        )
    )
    checks.append(
        CheckRecord(
            name="threading-matches-domain",
            status="pass" if not prop_e_mismatches else "fail",
            witnesses=prop_e_mismatches[:10],
            detail="S_w in Delta exactly on domain words",
        )
    )

    # (L3)
    l3_bad: list[tuple] = []
    overs: dict[frozenset[int], list[frozenset[int]]] = {}
    for P in lattice:
        overs[P] = [Q for Q in lattice if P <= Q]
    for P in delta_list:
        for g in pg.elements():
            img = loc.conjugate_set(P, g)
            if img is None or not img <= loc.sylow_set:
                continue
            base = overs.get(img)
            if base is None:
                continue
            for Q in base:
                if Q not in loc.delta.members:
                    l3_bad.append((sorted(P), g, sorted(Q)))
        if len(l3_bad) > 10:
            break
    checks.append(
        CheckRecord(
            name="L3-overgroup-closure",
            status="pass" if not l3_bad else "fail",
            witnesses=l3_bad[:10],
            detail="overgroups of conjugated members stay in Delta",
        )
    )
    return VerificationReport("locality axioms", checks)
