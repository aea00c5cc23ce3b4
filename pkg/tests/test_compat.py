import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import checks, compat, graphcore, search
from mclsearch.compat import Fingerprint


@pytest.fixture(scope="module")
def frame(idx):
    return compat.gewirtz_frame(idx.graph, 1, 8)


@pytest.fixture(scope="module")
def samples(idx):
    rng = random.Random(1)
    return (checks.sample_bundles_at(idx, 1, 40, rng), checks.sample_bundles_at(idx, 8, 40, rng))


def test_frame_shape(frame):
    assert len(frame.vertices) == 56 and len(frame.edges) == 280
    assert tuple(graphcore.srg_params(frame.subgraph)) == (56, 10, 0, 2)
    assert list(frame.edges) == sorted(frame.edges)
    assert frame.bit(*frame.edges[7][::-1]) == 7


def test_frame_needs_nonadjacent(idx):
    with pytest.raises(ValueError):
        compat.gewirtz_frame(idx.graph, 1, 2)
    with pytest.raises(compat.FrameMismatch):
        compat.gewirtz_frame(idx.graph, 1, 8).bit(1, 8)


def test_lines_compatible():
    assert compat.lines_compatible((1, 2, 3, 4, 5), (1, 6, 7, 8, 9))
    assert not compat.lines_compatible((1, 2, 3, 4, 5), (1, 2, 7, 8, 9))
    assert compat.lines_compatible((1, 2, 3, 4, 5), (1, 2, 3, 8, 9))


def test_bundle_lines_pairwise_compatible(idx):
    rep = search.representative(10)
    for a, b in itertools.combinations(rep, 2):
        assert compat.lines_compatible(idx.lines[a], idx.lines[b])


def test_shared_edge_is_incompatible(idx, samples):
    b1 = samples[0][0]
    a, b = idx.lines[b1[0]][1:3]
    other = next(l for l in idx.by_edge[(a, b)] if l != b1[0])
    apex = next(v for v in idx.lines[other] if v not in (a, b) and v != 1)
    fixed = compat.compatible_lines_through(idx, apex, [])
    assert other in fixed
    assert other not in compat.compatible_lines_through(idx, apex, b1)


def test_fingerprint_popcount_and_hex(idx, frame, samples):
    for b in samples[0][:10]:
        f = compat.fingerprint(idx, b, frame)
        assert f.popcount() == 28 and f.apex == 1
        assert Fingerprint.from_hex(f.hex(), f.pair, f.apex) == f
        assert len(f.hex()) == 80
        words = compat.fingerprint_words(idx, [b], frame, 1)[0]
        assert tuple(int(w) for w in words) == f.words()


def test_fingerprint_edges_form_perfect_matching(idx, frame, samples):
    # bundle lines meet only at the apex, so their frame edges are vertex-disjoint
    for b in samples[0][:10]:
        f = compat.fingerprint(idx, b, frame)
        edges = [frame.edges[i] for i in range(280) if f.bits >> i & 1]
        assert sorted(v for e in edges for v in e) == sorted(frame.vertices)


def test_from_hex_rejects():
    with pytest.raises(ValueError):
        Fingerprint.from_hex("00", (1, 8), 1)
    with pytest.raises(ValueError):
        Fingerprint.from_hex("0" * 64 + "f" * 16, (1, 8), 1)


def test_disjoint_requires_opposite_points(idx, frame, samples):
    f1 = compat.fingerprint(idx, samples[0][0], frame)
    f2 = compat.fingerprint(idx, samples[0][1], frame)
    with pytest.raises(compat.FrameMismatch):
        compat.fingerprints_disjoint(f1, f2)
    q = next(v for v in graphcore.non_neighbors(idx.graph, 1) if v != 8)
    other = compat.gewirtz_frame(idx.graph, 1, q)
    g = compat.fingerprint(idx, samples[0][0], other)
    with pytest.raises(compat.FrameMismatch):
        compat.fingerprints_disjoint(f1, g)


def test_fingerprint_matches_naive(idx, frame, samples):
    left, right = samples
    fl = compat.fingerprint_words(idx, left, frame, 1)
    fr = compat.fingerprint_words(idx, right, frame, 8)
    fast = ~((fl[:, None, :] & fr[None, :, :]) != 0).any(axis=2)
    a = np.repeat(np.asarray(left), len(right), axis=0)
    b = np.tile(np.asarray(right), (len(left), 1))
    slow = compat.naive_compatible_batch(idx, a, b).reshape(len(left), len(right))
    np.testing.assert_array_equal(fast, slow)
    assert fast.any()
    for i, j in [(0, 0), (3, 5), (7, 2)]:
        assert compat.bundles_compatible_naive(idx, left[i], right[j]) == fast[i, j]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fingerprint_matches_naive_random_frames(idx, seed):
    rng = random.Random(seed)
    g = idx.graph
    p = rng.randrange(1, 276)
    q = rng.choice(graphcore.non_neighbors(g, p))
    fr = compat.gewirtz_frame(g, p, q)
    left = checks.sample_bundles_at(idx, p, 8, rng)
    right = checks.sample_bundles_at(idx, q, 8, rng)
    for a in left:
        fa = compat.fingerprint(idx, a, fr, p)
        for b in right:
            fb = compat.fingerprint(idx, b, fr, q)
            assert compat.fingerprints_disjoint(fa, fb) == compat.bundles_compatible_naive(idx, a, b)


def test_fingerprint_rejects_foreign_apex(idx, samples):
    with pytest.raises(compat.FrameMismatch):
        compat.fingerprint(idx, samples[0][0], compat.gewirtz_frame(idx.graph, 8, 9))


def test_feasible_lines_nonadjacent(idx, samples):
    for b in samples[0][:20]:
        assert len(compat.feasible_lines(idx, b, 1, 8)) == 252


def test_feasible_lines_adjacent(idx, samples):
    for b in samples[0][:20]:
        ell = b[0]
        p2 = idx.lines[ell][1]
        feas = compat.feasible_lines(idx, b, 1, p2)
        assert len(feas) == 243
        assert compat.joint_line(idx, b, 1, p2) == ell and ell not in feas
        # the joint line itself is compatible, so it is the 244th
        assert len(compat.compatible_lines_through(idx, p2, b)) == 244


def test_feasible_lines_errors(idx, samples):
    with pytest.raises(ValueError):
        compat.feasible_lines(idx, samples[0][0], 1, 1)
    with pytest.raises(compat.NoJointLine):
        compat.joint_line(idx, samples[0][0], 1, 8)


def test_heuristic_probability():
    p = compat.heuristic_disjoint_probability()
    assert round(float(p), 5) == 0.04454
