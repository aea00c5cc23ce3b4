import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import _pykernels, compat, cover, kernels, search
from mclsearch.cover import CoverInstance


def brute_covers(ncols, rows):
    out = []
    for k in range(1, len(rows) + 1):
        for combo in itertools.combinations(range(len(rows)), k):
            cols = [c for r in combo for c in rows[r]]
            if len(cols) == ncols and set(cols) == set(range(ncols)):
                out.append(combo)
    return sorted(out)


instances = st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.sets(st.integers(0, n - 1), min_size=1).map(tuple),
                                             min_size=1, max_size=9)))


@settings(max_examples=150, deadline=None)
@given(instances)
def test_solutions_match_bruteforce(inst):
    ncols, rows = inst
    got = []
    res = cover.solve_exact_cover(CoverInstance(ncols, rows), got.append)
    assert res.complete
    assert res.count == len(got)
    assert sorted(got) == brute_covers(ncols, [tuple(sorted(set(r))) for r in rows])


@settings(max_examples=100, deadline=None)
@given(instances)
def test_backends_agree(inst):
    ncols, rows = inst
    compiled = kernels.compiled_backend()
    if compiled is None:
        pytest.skip("compiled backend not built")
    a, b = [], []
    ra = compiled.ExactCover(ncols, rows).visit(a.append)
    rb = _pykernels.ExactCover(ncols, rows).visit(b.append)
    assert a == b
    assert tuple(ra) == tuple(rb)


def test_first_row_partitions_solutions():
    rows = [(0,), (1,), (0, 1), (2,), (1, 2), (0, 2)]
    inst = CoverInstance(3, rows)
    total = cover.solve_exact_cover(inst).count
    parts = [cover.solve_exact_cover(inst, first_row=r).count for r in cover.partition_rows(inst)]
    assert sum(parts) == total == 4
    with pytest.raises(ValueError):
        cover.solve_exact_cover(inst, first_row=3)


def test_visitor_can_stop():
    rows = [(0,), (1,), (0, 1)]
    seen = []
    res = cover.solve_exact_cover(CoverInstance(2, rows), lambda s: seen.append(s) or False)
    assert len(seen) == 1 and not res.complete


def test_budget_marks_incomplete(idx):
    res = cover.enumerate_bundles(idx, 1, budget=500)
    assert not res.complete and 0 < res.count


def test_invalid_rows():
    with pytest.raises(ValueError):
        CoverInstance(2, [(0, 2)])
    with pytest.raises(ValueError):
        CoverInstance(2, [()])


def test_dump_roundtrip():
    inst = CoverInstance(4, [(0, 1), (2, 3), (1, 2), (0, 3)])
    back = CoverInstance.load(inst.dump())
    assert back.rows == inst.rows and back.ncols == 4
    with pytest.raises(ValueError):
        CoverInstance.load("4 5\n0 1\n")


def test_bundle_instance_shape(idx):
    inst = cover.bundle_instance(idx, 1)
    assert inst.ncols == 112 and len(inst.rows) == 280
    assert {len(r) for r in inst.rows} == {4}
    assert set(inst.column_degrees()) == {10}


def test_bundle_instance_rejects_foreign_line(idx):
    with pytest.raises(ValueError):
        cover.bundle_instance(idx, 1, [idx.by_vertex[2][-1]])


def test_filtered_instance_and_count(idx):
    b1 = search.representative(36)
    feas = compat.feasible_lines(idx, b1, 1, 8)
    inst = cover.bundle_instance(idx, 8, feas)
    assert inst.ncols == 112 and len(inst.rows) == 252
    assert cover.enumerate_bundles(idx, 8, feas).count == 396552


def test_bundles_are_bundles(idx):
    for b in cover.iter_bundles(idx, 5, limit=50):
        assert cover.is_bundle(idx, 5, b)
        pts = [set(idx.lines[l]) for l in b]
        assert all(len(x & y) == 1 for x, y in itertools.combinations(pts, 2))
    assert not cover.is_bundle(idx, 5, b[:-1] + (b[0],))


def test_bundle_array_matches_visitor(idx):
    arr, complete = cover.bundle_array(idx, 3, budget=3000)
    seen = []
    cover.enumerate_bundles(idx, 3, visitor=lambda b: seen.append(b) is None and len(seen) < len(arr))
    assert not complete
    assert [tuple(r) for r in arr.tolist()] == seen[:len(arr)]
    assert arr.dtype == np.int32
