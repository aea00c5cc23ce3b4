import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import bundles, checks, cover, graphcore, search
from mclsearch.bundles import RefinedInvariant

APEX_ORDER = 6531840


def test_table_has_36_classes():
    table = bundles.table1()
    assert [c.class_id for c in table] == list(range(1, 37))
    assert sum(APEX_ORDER // c.stab_order for c in table) == 17729280
    assert bundles.class_by_id(29).orbit_size == 15120


def test_rejected_are_t10_positive():
    rej = [c.class_id for c in bundles.table1() if c.rejected]
    assert rej == [c.class_id for c in bundles.table1() if c.refined.t[9] > 0]
    assert len(rej) == 6


def test_classify_by_s_only():
    t = (1568, 910, 266, 70, 14, 0, 0, 0, 0, 0)
    assert bundles.classify(0, RefinedInvariant(80, t)).class_id == 3
    assert bundles.classify(0, RefinedInvariant(84, t)).class_id == 4


def test_classify_rejected_row():
    row = bundles.class_by_id(30)
    assert row.refined.t[9] == 3 and row.old == 9
    assert bundles.classify_key(row.key).rejected


def test_unknown_invariant():
    with pytest.raises(bundles.UnknownClass):
        bundles.classify(1, RefinedInvariant(0, (0,) * 10))


@pytest.mark.parametrize("class_id,old,s,t", [
    (36, 63, 0, (2016, 756, 0, 252, 0, 0, 0, 0, 0, 0)),
    (1, 0, 64, (1730, 762, 288, 97, 6, 0, 0, 0, 0, 0)),
])
def test_definitional_invariants(idx, class_id, old, s, t):
    rep = search.representative(class_id)
    assert bundles.grid_invariant(rep, idx) == old
    assert bundles.refined_invariant(rep, idx) == RefinedInvariant(s, t)


@pytest.mark.parametrize("class_id", [2, 17, 29, 30, 35])
def test_kernel_matches_definition(idx, class_id):
    rep = search.representative(class_id)
    fast = bundles.apex_tables(idx, 1).invariants_global(np.asarray([rep], dtype=np.int32))[0]
    assert tuple(int(x) for x in fast) == bundles.bundle_key(rep, idx)
    assert bundles.classify_bundle(rep, idx).class_id == class_id


def test_invariant_identities(idx):
    P = set(graphcore.non_neighbors(idx.graph, 1))
    for b in checks.sample_bundles_at(idx, 1, 6, random.Random(21)):
        L = bundles.l_lines(b, idx, 1)
        assert len(L) == 1512
        assert all(len(set(idx.lines[m]) & P) == 3 for m in L)
        r = bundles.refined_invariant(b, idx, apex=1)
        assert sum((i + 1) * x for i, x in enumerate(r.t)) == 4536
        assert 0 <= bundles.grid_invariant(b, idx, 1) <= 63


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 19, 36]))
def test_invariant_is_group_invariant(idx, seed, class_id):
    rng = random.Random(seed)
    U = search.apex_group(1)
    u = checks.random_element(U.strong_generators, rng, 25)
    img = checks.bundle_image(idx, search.representative(class_id), u)
    assert cover.is_bundle(idx, 1, img)
    assert bundles.classify_bundle(img, idx).class_id == class_id


def test_bundle_apex(idx):
    rep = search.representative(5)
    assert bundles.bundle_apex(idx, rep) == 1
    with pytest.raises(ValueError):
        bundles.bundle_apex(idx, [0, 15399])


def test_class_table_fixture():
    text = bundles.class_table_text()
    recs = bundles.parse_class_table(text)
    assert len(recs) == 36
    assert all(r.stab_order == r.cls.stab_order for r in recs)
    assert all(r.stab_order * r.orbit_size == APEX_ORDER for r in recs)
    assert bundles.format_class_table(recs, bundles.header_checksum(text)) == text
    assert bundles.header_checksum(text) == "2208ec88c94806b8"


def test_class_table_rejects_bad_rows():
    line = bundles.class_table_text().splitlines()[2]
    v = line.split()
    with pytest.raises(ValueError):
        bundles.parse_class_table(" ".join(v[:-1]))
    v[0] = str(int(v[0]) % 36 + 1)
    with pytest.raises(ValueError):
        bundles.parse_class_table(" ".join(v))


@pytest.mark.parametrize("class_id,order", [(29, 432), (36, 12096)])
def test_stabilizer_orders(idx, U, class_id, order):
    stab = bundles.bundle_stabilizer(idx, U, search.representative(class_id), 1)
    assert len(stab) == order
    rep = set(search.representative(class_id))
    for g in stab[:20]:
        assert set(checks.bundle_image(idx, rep, g)) == rep


def test_representatives_are_lex_min(idx, U):
    frame = cover.BundleFrame.at(idx, 1)
    from mclsearch import permgrp
    chain = permgrp.schreier_sims(bundles.local_line_group(idx, U.strong_generators, 1), 280)
    for c in (1, 29, 36):
        local = sorted(frame.local[l] for l in search.representative(c))
        assert permgrp.minimal_image(chain, local) == tuple(local)


def test_rejection_witnesses(idx):
    reps = bundles.representatives()
    for c in (1, 36):
        assert bundles.rejection_witness(reps[c], idx) is None
    for c in search.rejected_classes():
        pair, cover_lines = bundles.rejection_witness(reps[c], idx)
        assert len(cover_lines) == 10
        sets = [set(idx.lines[l]) for l in reps[c]]
        assert all(any(len(set(idx.lines[m]) & s) == 2 for s in sets) for m in cover_lines)


def test_heuristic():
    assert round(bundles.heuristic_compatibility(), 5) == 0.04454
