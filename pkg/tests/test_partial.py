import random

import pytest

from localities.groups import generate_group, all_subgroups, is_normal_subset
from localities.partial import (
    AmalgamSpec,
    AmalgamSpecError,
    GroupPartialGroup,
    build_amalgam,
    check_axioms,
    classify_subset,
    dedekind_verify,
    invert_word,
    pi,
    subset_product,
    swap_two_products,
)

import _frozen as frozen


def test_degenerate_amalgam_is_the_group():
    G = generate_group([(1, 2, 0)])
    pairing = {x: x for x in G.elements()}
    pg = build_amalgam(AmalgamSpec(G, G, pairing))
    assert pg.degenerate
    assert pg.size == G.order
    for a in pg.elements():
        for b in pg.elements():
            assert pg.in_domain((a, b))


def test_amalgam_size_and_mixed_words(am20):
    pg = am20.pg
    assert pg.size == frozen.AM20_SIZE
    assert not pg.degenerate
    left_only = next(iter(am20.left_set - am20.right_set))
    right_only = next(iter(am20.right_set - am20.left_set))
    assert not pg.in_domain((left_only, right_only))
    assert pg.pi((left_only, right_only)) is None


def test_trivially_glued_amalgam():
    C2 = generate_group([(1, 0)])
    C3 = generate_group([(1, 2, 0)])
    pg = build_amalgam(AmalgamSpec(C2, C3, {C2.identity: C3.identity}))
    assert pg.size == 4
    a = pg.from_left[1]
    b = pg.from_right[1]
    assert not pg.in_domain((a, b))


def test_bad_identification_rejected():
    C4 = generate_group([(1, 2, 3, 0)])
    C2C2 = generate_group([(1, 0), (0, 1, 3, 2)])
    # full pairing that is a bijection but not a homomorphism
    pairing = {0: 0, 1: 1, 2: 3, 3: 2}
    with pytest.raises(AmalgamSpecError):
        build_amalgam(AmalgamSpec(C4, C2C2, pairing))


def test_pi_basics(am20):
    pg = am20.pg
    assert pi(pg, ()) == pg.identity
    for f in pg.elements():
        assert pi(pg, (f,)) == f


def test_invert_word(am20):
    pg = am20.pg
    assert invert_word(pg, ()) == ()
    f = next(iter(am20.left_set - {pg.identity}))
    g = next(iter(am20.right_set - {pg.identity}))
    assert invert_word(pg, (f,)) == (pg.inverse(f),)
    w = (f, g)
    assert invert_word(pg, w) == (pg.inverse(g), pg.inverse(f))
    assert invert_word(pg, invert_word(pg, w)) == w


def test_axioms_amalgam_to_length_five(am20):
    report = check_axioms(am20.pg, max_len=5)
    assert report.ok, report.violations[:3]


def test_axioms_group_as_partial_group():
    gp = GroupPartialGroup(generate_group([(1, 2, 3, 0), (1, 0, 2, 3)]))
    report = check_axioms(gp, max_len=4)
    assert report.ok


def test_axioms_detect_planted_swap():
    gp = GroupPartialGroup(generate_group([(1, 2, 3, 0), (1, 0, 2, 3)]))
    bad = swap_two_products(gp, (1, 2), (2, 1))
    report = check_axioms(bad, max_len=3)
    assert not report.ok
    assert any(v.axiom == "collapse" for v in report.violations)


def test_subset_product_identity_factor(am20):
    pg = am20.pg
    B = am20.subsets["N"]
    assert subset_product(pg, [{pg.identity}, B]) == B


def test_subset_product_counterexample(am20):
    pg = am20.pg
    MN = subset_product(pg, [am20.subsets["M"], am20.subsets["N"]])
    assert MN == am20.subsets["G1"]
    assert len(MN) == 8


def test_subset_product_in_locality(s4f):
    prod = subset_product(s4f.loc.pg, [s4f.subsets["V4"], s4f.subsets["A4"]])
    assert prod == s4f.subsets["A4"]


def test_classify_identity(am20):
    handle = classify_subset(am20.pg, {am20.pg.identity})
    assert handle.classification == "partial-normal"


def test_classify_cyclic_factors_partial_normal(am20):
    for name in ("M", "N"):
        handle = classify_subset(am20.pg, am20.subsets[name])
        assert handle.is_partial_normal, name


def test_classify_left_group_not_normal(am20):
    handle = classify_subset(am20.pg, am20.subsets["G1"])
    assert handle.is_partial_subgroup
    assert handle.is_subgroup
    assert not handle.is_partial_normal
    kind, x, f, img = handle.witness
    assert kind == "conjugation"
    assert f in am20.right_set


def test_classify_empty_rejected(am20):
    with pytest.raises(ValueError):
        classify_subset(am20.pg, set())


def _amalgam_subset_criteria(am20, members):
    """Group-side criteria for the amalgam: per-side subgroup / normality."""
    pg = am20.pg
    left = am20.spec.left
    right = am20.spec.right
    lpart = frozenset(pg.to_left[x] for x in members if pg.to_left[x] is not None)
    rpart = frozenset(pg.to_right[x] for x in members if pg.to_right[x] is not None)

    def is_subgroup(G, mem):
        if not mem or G.identity not in mem:
            return False
        return all(
            G.mul(a, b) in mem and G.inv[a] in mem for a in mem for b in mem
        )

    # members must also be covered by the two parts (always true here)
    sub = is_subgroup(left, lpart) and is_subgroup(right, rpart)
    normal = sub and is_normal_subset(left, lpart) and is_normal_subset(right, rpart)
    return sub, normal


def test_classify_matches_per_side_criterion_on_subgroups(am20):
    """Subsets arising from subgroups of either factor classify per side."""
    pg = am20.pg
    for G, lift in ((am20.spec.left, pg.from_left), (am20.spec.right, pg.from_right)):
        for sub in all_subgroups(G):
            members = frozenset(lift[x] for x in sub.members)
            handle = classify_subset(pg, members)
            expect_sub, expect_normal = _amalgam_subset_criteria(am20, members)
            assert handle.is_partial_subgroup == expect_sub
            assert handle.is_partial_normal == expect_normal


def test_classify_matches_per_side_criterion_on_random_subsets(am20):
    rng = random.Random(7)
    pg = am20.pg
    for _ in range(20):
        size = rng.randint(1, pg.size)
        members = frozenset(rng.sample(range(pg.size), size))
        handle = classify_subset(pg, members)
        expect_sub, expect_normal = _amalgam_subset_criteria(am20, members)
        assert handle.is_partial_subgroup == expect_sub
        assert handle.is_partial_normal == expect_normal


def test_dedekind_trivial_k(am20):
    pg = am20.pg
    rep = dedekind_verify(pg, am20.subsets["G1"], am20.subsets["G2"], {pg.identity})
    assert rep.ok


def test_dedekind_counterexample_slices(am20):
    A = am20.subsets["G1"]
    H = am20.subsets["G2"]
    K = am20.subsets["M"] & am20.subsets["G2"]
    assert len(K) == 2
    rep = dedekind_verify(am20.pg, A, H, K)
    assert rep.ok


def test_dedekind_s4(s4f):
    rep = dedekind_verify(
        s4f.loc.pg, s4f.subsets["A4"], s4f.subsets["S"], s4f.subsets["V4"]
    )
    assert rep.ok


def test_dedekind_rejects_bad_arguments(am20):
    pg = am20.pg
    left_only = next(iter(am20.left_set - am20.right_set))
    with pytest.raises(ValueError):
        dedekind_verify(pg, am20.subsets["G1"], am20.subsets["G2"], {left_only, pg.identity, 13})
    with pytest.raises(ValueError):
        # A not a partial subgroup
        dedekind_verify(pg, {pg.identity, left_only}, am20.subsets["G2"], {pg.identity})


def _partial_subgroups_sample(pg, rng, pool, count):
    from localities.partial import partial_subgroup_closure

    out = []
    for _ in range(count):
        seed = rng.sample(pool, rng.randint(1, 3))
        out.append(partial_subgroup_closure(pg, seed))
    return out


@pytest.mark.parametrize("which", ["am20", "s4f", "c2s4f", "s5f"])
def test_dedekind_random_triples(which, request):
    """The Dedekind identity on 100 random valid (A, H, K) triples each."""
    fix = request.getfixturevalue(which)
    pg = fix.pg if hasattr(fix, "pg") else fix.loc.pg
    rng = random.Random(11)
    pool = list(range(pg.size))
    As = _partial_subgroups_sample(pg, rng, pool, 10)
    for _ in range(100):
        A = rng.choice(As)
        H = frozenset(rng.sample(pool, rng.randint(1, pg.size)))
        K = frozenset(rng.sample(sorted(A), rng.randint(1, len(A))))
        rep = dedekind_verify(pg, A, H, K)
        assert rep.ok, (sorted(A), sorted(H), sorted(K), rep.witnesses)
