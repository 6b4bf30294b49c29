"""Command line interface: builds objects, runs checks, prints reports.

Exit codes: 0 every check passed, 1 at least one check failed (a finding),
2 bad input (unknown names, unparseable model, bad flags).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import corpus as corpus_mod
from .groups import SizeCapExceeded
from .locality import Locality, check_locality
from .model import ModelError, emit_quotient, parse_model
from .normal import enumerate_partial_normals, is_partial_normal, product_theorem1, product_theorem2
from .partial import PartialGroup, check_axioms, classify_subset, subset_product
from .quotient import QuotientConstructionError, build_quotient, verify_quotient_lemmas
from .report import CheckRecord, VerificationReport


class InputError(ValueError):
    pass


@dataclass
class CatalogEntry:
    name: str
    kind: str  # "amalgam" | "locality"
    obj: object
    subsets: dict[str, frozenset[int]]


class Catalog:
    """Named objects from a builtin fixture or a parsed model file."""

    def __init__(self, entries: list[CatalogEntry]):
        self.entries = {e.name: e for e in entries}

    def pick(self, name: str | None, kind: str | None = None) -> CatalogEntry:
        pool = [
            e
            for e in self.entries.values()
            if kind is None or e.kind == kind
        ]
        if name is not None:
            got = self.entries.get(name)
            if got is None:
                raise InputError(
                    f"no object named {name!r}; available: {sorted(self.entries)}"
                )
            if kind is not None and got.kind != kind:
                raise InputError(f"object {name!r} is a {got.kind}, need a {kind}")
            return got
        if len(pool) == 1:
            return pool[0]
        raise InputError(
            f"select an object with --locality/--object; available: {sorted(e.name for e in pool)}"
        )

    def subset(self, entry: CatalogEntry, name: str) -> frozenset[int]:
        got = entry.subsets.get(name)
        if got is None:
            raise InputError(
                f"object {entry.name!r} has no subset {name!r}; "
                f"available: {sorted(entry.subsets)}"
            )
        return got


def _entry_from_builtin(name: str) -> CatalogEntry:
    fixture = corpus_mod.get_builtin(name)
    if isinstance(fixture, corpus_mod.AmalgamFixture):
        return CatalogEntry(fixture.name, "amalgam", fixture, dict(fixture.subsets))
    return CatalogEntry(fixture.name, "locality", fixture.loc, dict(fixture.subsets))


def _catalog_from_model(path: str) -> Catalog:
    model = parse_model(path)
    entries: list[CatalogEntry] = []
    for name, pg in model.amalgams.items():
        subsets = {
            "1": frozenset({pg.identity}),
            "G1": frozenset(pg.from_left),
            "G2": frozenset(pg.from_right),
        }
        for sname, (owner, members) in model.subsets.items():
            if model.groups.get(owner) is pg.spec.left:
                subsets[sname] = frozenset(pg.from_left[x] for x in members)
            elif model.groups.get(owner) is pg.spec.right:
                subsets[sname] = frozenset(pg.from_right[x] for x in members)
        entries.append(CatalogEntry(name, "amalgam", pg, subsets))
    for name, loc in model.localities.items():
        subsets = {
            "1": frozenset({loc.identity}),
            "S": loc.sylow_set,
            "L": frozenset(loc.elements()),
        }
        to_local = getattr(loc, "to_local", None)
        ambient = getattr(loc, "ambient", None)
        if to_local is not None and ambient is not None:
            for sname, (owner, members) in model.subsets.items():
                if model.groups.get(owner) is ambient:
                    if all(g in to_local for g in members):
                        subsets[sname] = frozenset(to_local[g] for g in members)
        entries.append(CatalogEntry(name, "locality", loc, subsets))
    return Catalog(entries)


def load_catalog(args) -> Catalog:
    if args.model and args.builtin:
        raise InputError("--model and --builtin are mutually exclusive")
    if args.model:
        return _catalog_from_model(args.model)
    if args.builtin:
        try:
            return Catalog([_entry_from_builtin(args.builtin)])
        except KeyError as exc:
            raise InputError(str(exc))
    target = getattr(args, "locality", None) or getattr(args, "object", None)
    if target:
        try:
            return Catalog([_entry_from_builtin(target)])
        except KeyError:
            raise InputError(
                f"{target!r} is not a builtin; pass --model PATH or --builtin NAME"
            )
    raise InputError("pass --builtin NAME or --model PATH")


def _timed(report: VerificationReport, name: str, fn) -> CheckRecord:
    t0 = time.perf_counter()
    rec = fn()
    rec.timing_ms = (time.perf_counter() - t0) * 1000.0
    report.checks.append(rec)
    return rec


# ---------------------------------------------------------------------------
# commands


def _pg_of(entry: CatalogEntry) -> PartialGroup:
    if entry.kind == "amalgam":
        return entry.obj.pg if hasattr(entry.obj, "pg") else entry.obj
    return entry.obj.pg


def cmd_pg_check(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.object or args.locality)
    pg = _pg_of(entry)
    rep = VerificationReport(f"pg-check {entry.name}")
    axioms = check_axioms(pg, max_len=args.max_word_len)
    rep.record(
        "axioms",
        axioms.ok,
        [(v.axiom, v.word, v.detail) for v in axioms.violations[:10]],
        axioms.summary(),
    )
    return rep


def _as_locality(entry: CatalogEntry) -> Locality:
    if entry.kind == "locality":
        return entry.obj
    return entry.obj.as_locality()


def cmd_loc_check(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.locality or args.object)
    loc = _as_locality(entry)
    rep = check_locality(loc, max_len=args.max_word_len)
    rep.title = f"loc-check {entry.name}"
    return rep


def cmd_normals(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.locality or args.object, kind="locality")
    loc: Locality = entry.obj
    rep = VerificationReport(f"normals {entry.name}")
    handles = enumerate_partial_normals(loc)
    listing = [
        {
            "order": len(h.members),
            "members": [loc.pg.labels[x] for x in sorted(h.members)],
        }
        for h in handles
    ]
    rep.record(
        "enumerate-partial-normals",
        True,
        listing,
        f"{len(handles)} partial normal subgroups",
    )
    return rep


def cmd_product(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.locality or args.object, kind="locality")
    loc: Locality = entry.obj
    names = [n.strip() for n in (args.ideals or "").split(",") if n.strip()]
    if len(names) < 2:
        raise InputError("--ideals needs at least two comma-separated subset names")
    factors = [catalog.subset(entry, n) for n in names]
    rep = VerificationReport(f"product {entry.name}: {' * '.join(names)}")
    if len(factors) == 2:
        cert = product_theorem1(loc, factors[0], factors[1])
        rep.record("product-commutes", bool(cert.flags.commutes), [],
                   "the two factor orders give the same set")
        rep.record("product-partial-normal", cert.flags.is_partial_normal,
                   [cert.normality_witness] if cert.normality_witness else [])
        rep.record("intersection-with-sylow", bool(cert.flags.intersection_formula), [],
                   "(MN) cap S = (M cap S)(N cap S)")
        rep.record("witness-complete", cert.flags.witnesses_complete, [],
                   "every product element has a word witness with matching threading subgroup")
        rep.record("certificate-revalidates", cert.validate(loc), [])
        if cert.flags.trivial_intersection:
            rep.record("trivial-intersection-path", True, [],
                       "factors intersect trivially")
    else:
        cert = product_theorem2(loc, factors)
        rep.record("bracketings-agree", bool(cert.flags.bracketings_ok), [])
        rep.record("permutations-agree", bool(cert.flags.permutations_ok), [],
                   "all factor orders give the same set")
        rep.record("adjacent-transpositions-agree",
                   bool(cert.flags.adjacent_transpositions_ok), [])
        rep.record("product-partial-normal", cert.flags.is_partial_normal,
                   [cert.normality_witness] if cert.normality_witness else [])
        rep.record("witness-complete", cert.flags.witnesses_complete, [])
        rep.record("certificate-revalidates", cert.validate(loc), [])
    rep.checks.insert(
        0,
        CheckRecord(
            name="product-order",
            status="pass",
            detail=f"product has {len(cert.product)} elements",
        ),
    )
    return rep


def cmd_quotient(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.locality or args.object, kind="locality")
    loc: Locality = entry.obj
    if not args.kernel:
        raise InputError("--kernel NAME is required")
    K = catalog.subset(entry, args.kernel)
    rep = VerificationReport(f"quotient {entry.name} / {args.kernel}")
    try:
        bundle = build_quotient(loc, K, check_len=args.max_word_len)
    except QuotientConstructionError as exc:
        rep.extend(exc.report)
        return rep
    rep.extend(bundle.report)
    rep.record(
        "quotient-order",
        True,
        [],
        f"quotient locality has {bundle.quotient.size} elements",
    )
    if args.emit:
        Path(args.emit).write_text(emit_quotient(bundle, name=f"{entry.name}-mod-{args.kernel}"))
        rep.record("emitted", True, [], f"wrote {args.emit}")
    return rep


def cmd_lemmas(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.locality or args.object, kind="locality")
    loc: Locality = entry.obj
    if not args.kernel:
        raise InputError("--kernel NAME is required")
    K = catalog.subset(entry, args.kernel)
    rep = verify_quotient_lemmas(loc, K, seed=args.seed)
    rep.title = f"lemmas {entry.name} / {args.kernel}"
    return rep


def cmd_counterexample(args, catalog: Catalog) -> VerificationReport:
    entry = catalog.pick(args.object or args.locality)
    if entry.kind != "amalgam":
        raise InputError("the counterexample command runs on the amalgam builtin")
    fixture: corpus_mod.AmalgamFixture = entry.obj
    pg = fixture.pg
    rep = VerificationReport(f"counterexample {entry.name}")
    M = fixture.subsets["M"]
    N = fixture.subsets["N"]
    G1 = fixture.subsets["G1"]
    hm = classify_subset(pg, M)
    hn = classify_subset(pg, N)
    rep.record("m-partial-normal", hm.is_partial_normal, [],
               "first cyclic order-4 subgroup is conjugation-closed")
    rep.record("n-partial-normal", hn.is_partial_normal, [],
               "second cyclic order-4 subgroup is conjugation-closed")
    MN = subset_product(pg, [M, N])
    rep.record("product-is-left-group", MN == G1, [sorted(MN)],
               f"MN has {len(MN)} elements")
    hmn = classify_subset(pg, MN)
    witness = hmn.witness
    detail = "MN fails conjugation closure, as expected"
    if witness and witness[0] == "conjugation":
        x, f, img = witness[1], witness[2], witness[3]
        detail += f": {pg.labels[x]} ^ {pg.labels[f]} = {pg.labels[img]} outside MN"
    rep.record("product-not-partial-normal (expected)", not hmn.is_partial_normal,
               [witness] if witness else [], detail)
    return rep


COMMANDS = {
    "pg-check": cmd_pg_check,
    "loc-check": cmd_loc_check,
    "normals": cmd_normals,
    "product": cmd_product,
    "quotient": cmd_quotient,
    "lemmas": cmd_lemmas,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localities",
        description="verification engine for finite partial groups and localities",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("pg-check", "verify the partial group axioms on words up to --max-word-len"),
        ("loc-check", "verify the locality axioms"),
        ("normals", "enumerate partial normal subgroups"),
        ("product", "certify a product of partial normal subgroups"),
        ("quotient", "build and verify a quotient locality"),
        ("lemmas", "run the quotient lemma suite for a kernel"),
        ("counterexample", "reproduce the amalgam where a product fails normality"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--builtin", help="builtin object name (PG-AM20, GRP-S4, GRP-C2xS4, LOC-S5)")
        p.add_argument("--model", help="path to a model file")
        p.add_argument("--locality", help="object name inside the source")
        p.add_argument("--object", help="alias for --locality")
        p.add_argument("--max-word-len", type=int, default=4)
        p.add_argument("--seed", type=int, default=0, help="sampling seed")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--timings", action="store_true", help="include timings in output")
        if name == "product":
            p.add_argument("--ideals", help="comma-separated subset names")
            p.add_argument("--verify", action="store_true",
                           help="accepted for compatibility; verification always runs")
        if name in ("quotient", "lemmas"):
            p.add_argument("--kernel", help="subset name of the kernel")
        if name == "quotient":
            p.add_argument("--emit", help="write the quotient as a model file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "counterexample" and not (args.builtin or args.model or args.locality or args.object):
        args.builtin = "PG-AM20"
    try:
        catalog = load_catalog(args)
        report = COMMANDS[args.command](args, catalog)
    except (InputError, ModelError, SizeCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(report.json(with_timings=args.timings))
    else:
        print(report.text(with_timings=args.timings))
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
