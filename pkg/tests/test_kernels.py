"""The compiled kernels and their pure-Python twins give identical results."""

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import _pykernels, bundles, checks, compat, kernels

compiled = kernels.compiled_backend()
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled backend not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None:
        assert kernels.BACKEND == compiled.BACKEND


@needs_compiled
def test_bundle_invariants_agree(idx):
    rng = random.Random(5)
    tables = bundles.apex_tables(idx, 1)
    sample = checks.sample_bundles_at(idx, 1, 6, rng)
    sols = tables.local_rows(np.asarray(sample, dtype=np.int32))
    args = (sols, tables.row_pairs, tables.row_nbrs, tables.m_line, tables.m_nb, tables.m_pairs, tables.npairs)
    np.testing.assert_array_equal(compiled.bundle_invariants(*args), _pykernels.bundle_invariants(*args))


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_filter_disjoint_agrees(seed, m):
    rng = np.random.default_rng(seed)
    fps = rng.integers(0, 2**63, size=(m, 5), dtype=np.uint64) & rng.integers(0, 2**63, size=(m, 5), dtype=np.uint64)
    cand = np.sort(rng.choice(m, size=rng.integers(0, m + 1), replace=False)).astype(np.int32)
    word = rng.integers(0, 2**63, size=5, dtype=np.uint64) & rng.integers(0, 2**63, size=5, dtype=np.uint64)
    a = compiled.filter_disjoint(fps, cand, word)
    b = _pykernels.filter_disjoint(fps, cand, word)
    np.testing.assert_array_equal(a, b)
    keep = ~((fps[cand] & word) != 0).any(axis=1)
    np.testing.assert_array_equal(b, cand[keep])


@needs_compiled
def test_naive_compatible_agrees(idx):
    rng = random.Random(9)
    left = np.asarray(checks.sample_bundles_at(idx, 1, 30, rng), dtype=np.int32)
    right = np.asarray(checks.sample_bundles_at(idx, 8, 30, rng), dtype=np.int32)
    masks = compat.line_mask_array(idx)
    a = compiled.naive_compatible(masks, left, right)
    b = _pykernels.naive_compatible(masks, left, right)
    np.testing.assert_array_equal(np.asarray(a), np.asarray(b))


def brute_independent(adj, n, size):
    from itertools import combinations
    return sum(1 for c in combinations(range(n), size)
               if all(not adj[i][j] for i, j in combinations(c, 2)))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.integers(0, 5))
def test_independent_set_counts(n, seed, size):
    rng = random.Random(seed)
    adj = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            adj[i][j] = adj[j][i] = rng.random() < 0.4
    words = np.zeros((n, 2), dtype=np.uint64)
    for i in range(n):
        m = sum(1 << j for j in range(n) if adj[i][j])
        words[i] = (m & (2**64 - 1), m >> 64)
    want = brute_independent(adj, n, size)
    assert _pykernels.count_independent_sets(words, n, size) == want
    if compiled is not None:
        assert compiled.count_independent_sets(words, n, size) == want


def test_independent_set_limit():
    with pytest.raises(ValueError):
        _pykernels.count_independent_sets(np.zeros((130, 2), dtype=np.uint64), 130, 2)
