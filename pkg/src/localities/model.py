"""Text model files: named groups, amalgams, and localities, one per line.

Grammar (permutation cycles use 1-based points, `()` is the identity):

    # comment
    group g1 = (1 2), (3 4 5 6)
    group t  = table 0 1 / 1 0
    subset v = g1 : (3 5)(4 6)
    amalgam L = g1 & g2 : (1 2) ~ (1 8)(2 7), (3 5)(4 6) ~ (1 5)(2 6)(3 7)(4 8)
    locality loc = g1 p=2 sylow=auto delta=min-order:8
    locality loc2 = g1 p=2 sylow={(1 2)} delta=seeds:{(1 2)(3 4)};{(1 3)(2 4)}
    plocality q = p 2 : size 2 : identity 0 : inv 0 1 : sylow 0 1 : \
        delta { 0 1 } : conj (0 0 0) ... : prod (0 0 0) ...

plocality lines hold explicitly tabulated localities (as written by --emit):
binary products on domain pairs, the conjugation table on S, and Delta.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .groups import FiniteGroup, SubgroupRef, all_subgroups, closure_members, pad_perm, sylow_p
from .locality import DeltaFamily, Locality, LocalityPartialGroup, delta_close, locality_from_group
from .partial import AmalgamPartialGroup, AmalgamSpec, AmalgamSpecError, build_amalgam
from .quotient import QuotientBundle


class ModelError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str) -> tuple[int, ...]:
    """Parse cycle notation like '(1 2 3)(4 5)' into a 0-based image tuple."""
    text = text.strip()
    if not text:
        raise ValueError("empty permutation")
    consumed = "".join(_CYCLE_RE.findall(text))
    if text.replace(" ", "") != "".join(
        "(" + c.replace(" ", "") + ")" for c in _CYCLE_RE.findall(text)
    ):
        raise ValueError(f"malformed cycle notation: {text!r}")
    points: list[list[int]] = []
    for body in _CYCLE_RE.findall(text):
        body = body.strip()
        if not body:
            continue
        cyc = [int(tok) for tok in body.split()]
        if any(p < 1 for p in cyc):
            raise ValueError("cycle points are 1-based positive integers")
        points.append([p - 1 for p in cyc])
    degree = max((p for cyc in points for p in cyc), default=-1) + 1
    image = list(range(degree))
    seen: set[int] = set()
    for cyc in points:
        for p in cyc:
            if p in seen:
                raise ValueError(f"point {p + 1} repeated in {text!r}")
            seen.add(p)
        for i, p in enumerate(cyc):
            image[p] = cyc[(i + 1) % len(cyc)]
    return tuple(image)


def perm_list(text: str) -> list[tuple[int, ...]]:
    parts = [p.strip() for p in text.split(",")]
    return [parse_perm(p) for p in parts if p]


@dataclass
class ModelFile:
    path: str
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    subsets: dict[str, tuple[str, frozenset[int]]] = field(default_factory=dict)
    amalgams: dict[str, AmalgamPartialGroup] = field(default_factory=dict)
    localities: dict[str, Locality] = field(default_factory=dict)

    def names(self) -> set[str]:
        return (
            set(self.groups) | set(self.subsets) | set(self.amalgams) | set(self.localities)
        )


def _group_elem(G: FiniteGroup, perm: tuple[int, ...], line: int) -> int:
    degree = len(G.perms[0]) if G.perms else 0
    try:
        return G.index_of_perm(pad_perm(perm, degree))
    except (KeyError, ValueError) as exc:
        raise ModelError(f"permutation is not an element of the group: {exc}", line)


def _parse_group(body: str, line: int) -> FiniteGroup:
    from .groups import generate_group

    body = body.strip()
    if body.startswith("table"):
        rows = [r.strip() for r in body[len("table"):].split("/")]
        try:
            table = [[int(tok) for tok in row.split()] for row in rows if row]
            return FiniteGroup(table)
        except ValueError as exc:
            raise ModelError(f"bad multiplication table: {exc}", line)
    if body == "trivial":
        return generate_group([])
    try:
        return generate_group(perm_list(body))
    except ValueError as exc:
        raise ModelError(f"bad group definition: {exc}", line)


def _parse_amalgam(model: ModelFile, body: str, line: int) -> AmalgamPartialGroup:
    head, _, pairs_text = body.partition(":")
    left_name, _, right_name = head.partition("&")
    left_name, right_name = left_name.strip(), right_name.strip()
    for name in (left_name, right_name):
        if name not in model.groups:
            raise ModelError(f"amalgam references undefined group {name!r}", line)
    left = model.groups[left_name]
    right = model.groups[right_name]
    pairing: dict[int, int] = {left.identity: right.identity}
    for pair in pairs_text.split(","):
        pair = pair.strip()
        if not pair:
            continue
        lp, _, rp = pair.partition("~")
        try:
            li = _group_elem(left, parse_perm(lp), line)
            ri = _group_elem(right, parse_perm(rp), line)
        except ValueError as exc:
            raise ModelError(str(exc), line)
        pairing[li] = ri
    try:
        return build_amalgam(AmalgamSpec(left, right, pairing))
    except AmalgamSpecError as exc:
        raise ModelError(f"identification is not an isomorphism: {exc}", line)


def _parse_locality(model: ModelFile, body: str, line: int) -> Locality:
    tokens = body.split()
    if not tokens:
        raise ModelError("locality needs a group name", line)
    gname = tokens[0]
    if gname not in model.groups:
        raise ModelError(f"locality references undefined group {gname!r}", line)
    M = model.groups[gname]
    rest = body[len(gname):].strip()
    fields = dict(re.findall(r"(p|sylow|delta)=((?:\{[^}]*\}|[^\s])+)", rest))
    if set(fields) != {"p", "sylow", "delta"}:
        raise ModelError("locality needs p=, sylow=, delta= settings", line)
    try:
        p = int(fields["p"])
    except ValueError:
        raise ModelError(f"bad prime {fields['p']!r}", line)
    if fields["sylow"] == "auto":
        S = sylow_p(M, p)
    else:
        gens = perm_list(fields["sylow"].strip("{}"))
        S = SubgroupRef(M, closure_members(M, [_group_elem(M, g, line) for g in gens]))
    dspec = fields["delta"]
    if dspec.startswith("min-order:"):
        try:
            floor = int(dspec.split(":", 1)[1])
        except ValueError:
            raise ModelError(f"bad min-order in {dspec!r}", line)
        sg, selems = S.as_group()
        members = frozenset(
            frozenset(selems[i] for i in sub.members)
            for sub in all_subgroups(sg)
            if sub.order >= floor
        )
        delta = DeltaFamily(sylow=S.members, members=members)
    elif dspec.startswith("seeds:"):
        seeds = []
        for chunk in dspec[len("seeds:"):].split(";"):
            gens = perm_list(chunk.strip().strip("{}"))
            seeds.append(
                SubgroupRef(M, closure_members(M, [_group_elem(M, g, line) for g in gens]))
            )
        if not seeds:
            raise ModelError("delta=seeds: needs at least one seed subgroup", line)
        delta = delta_close(S, seeds, M)
    else:
        raise ModelError(f"delta must be min-order:N or seeds:{{...}}, got {dspec!r}", line)
    return locality_from_group(M, p, delta)


_TRIPLE_RE = re.compile(r"\(\s*(\d+)\s+(\d+)\s+(\d+)\s*\)")
_BRACE_RE = re.compile(r"\{([^}]*)\}")


def _parse_plocality(body: str, line: int) -> Locality:
    sections: dict[str, str] = {}
    for chunk in body.split(" : "):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, _, rest = chunk.partition(" ")
        sections[key] = rest.strip()
    needed = {"p", "size", "identity", "inv", "sylow", "delta", "conj", "prod"}
    missing = needed - set(sections)
    if missing:
        raise ModelError(f"plocality missing sections: {sorted(missing)}", line)
    try:
        p = int(sections["p"])
        size = int(sections["size"])
        identity = int(sections["identity"])
        inv = tuple(int(t) for t in sections["inv"].split())
        sylow = tuple(sorted(int(t) for t in sections["sylow"].split()))
    except ValueError as exc:
        raise ModelError(f"bad plocality numbers: {exc}", line)
    if len(inv) != size:
        raise ModelError("inv length does not match size", line)
    delta_members = frozenset(
        frozenset(int(t) for t in body.split()) for body in _BRACE_RE.findall(sections["delta"])
    )
    conj: dict[tuple[int, int], int] = {}
    for s, g, v in _TRIPLE_RE.findall(sections["conj"]):
        conj[(int(s), int(g))] = int(v)
    prod: dict[tuple[int, int], int] = {}
    for a, b, v in _TRIPLE_RE.findall(sections["prod"]):
        prod[(int(a), int(b))] = int(v)

    s_pos = {s: i for i, s in enumerate(sylow)}

    def mul_raw(a: int, b: int) -> int:
        try:
            return prod[(a, b)]
        except KeyError:
            raise ModelError(f"product table has no entry for ({a},{b})", line)

    def conj_step(g: int) -> tuple[int, ...]:
        out = []
        for s in sylow:
            v = conj.get((s, g), -1)
            out.append(s_pos.get(v, -1) if v >= 0 else -1)
        return tuple(out)

    pg = LocalityPartialGroup(
        size=size,
        identity=identity,
        inv=inv,
        labels=tuple(f"q{i}" for i in range(size)),
        mul_raw=mul_raw,
        p=p,
        s_elems=sylow,
        delta_sets=delta_members,
        conj_step_of=conj_step,
    )
    delta = DeltaFamily(sylow=frozenset(sylow), members=delta_members)
    return Locality(pg, p, sylow, delta)


def parse_model(path: str | Path) -> ModelFile:
    """Parse and resolve a model file; the first error wins, with its line."""
    path = Path(path)
    model = ModelFile(path=str(path))
    text = path.read_text()
    count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        kind, _, rest = stripped.partition(" ")
        name, eq, body = rest.partition("=")
        name = name.strip()
        if kind not in {"group", "subset", "amalgam", "locality", "plocality"}:
            raise ModelError(f"unknown section {kind!r}", lineno)
        if not eq or not name:
            raise ModelError(f"expected '{kind} NAME = ...'", lineno)
        if name in model.names():
            raise ModelError(f"duplicate name {name!r}", lineno)
        body = body.strip()
        count += 1
        if kind == "group":
            model.groups[name] = _parse_group(body, lineno)
        elif kind == "subset":
            owner, _, perms = body.partition(":")
            owner = owner.strip()
            if owner not in model.groups:
                raise ModelError(f"subset references undefined group {owner!r}", lineno)
            G = model.groups[owner]
            members = closure_members(
                G, [_group_elem(G, perm, lineno) for perm in perm_list(perms)]
            )
            model.subsets[name] = (owner, members)
        elif kind == "amalgam":
            model.amalgams[name] = _parse_amalgam(model, body, lineno)
        elif kind == "locality":
            model.localities[name] = _parse_locality(model, body, lineno)
        elif kind == "plocality":
            model.localities[name] = _parse_plocality(body, lineno)
    if count == 0:
        raise ModelError("no objects defined in model file")
    return model


# ---------------------------------------------------------------------------
# emitting quotients


def emit_quotient(bundle: QuotientBundle, name: str = "quotient") -> str:
    """Serialize a quotient locality as a parseable plocality line."""
    loc = bundle.quotient
    pg = loc.pg
    parts = [
        f"p {loc.p}",
        f"size {pg.size}",
        f"identity {pg.identity}",
        "inv " + " ".join(str(pg.inverse(x)) for x in pg.elements()),
        "sylow " + " ".join(str(s) for s in loc.sylow),
        "delta " + " ".join(
            "{ " + " ".join(str(x) for x in sorted(P)) + " }"
            for P in sorted(loc.delta.members, key=sorted)
        ),
    ]
    conj_entries = []
    for s in loc.sylow:
        for g in pg.elements():
            v = loc.conjugate(s, g)
            if v is not None and v in loc.sylow_set:
                conj_entries.append(f"({s} {g} {v})")
    parts.append("conj " + " ".join(conj_entries))
    prod_entries = []
    for a in pg.elements():
        for b in pg.elements():
            v = pg.mul2(a, b)
            if v is not None:
                prod_entries.append(f"({a} {b} {v})")
    parts.append("prod " + " ".join(prod_entries))
    body = " : ".join(parts)
    lines = [
        "# quotient locality emitted as an explicit table",
        f"plocality {name} = {body}",
        "",
    ]
    return "\n".join(lines)
