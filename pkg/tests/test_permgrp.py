from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import perm, permgrp, search

N = 7


def closure(gens):
    e = perm.identity(len(gens[0]))
    seen = {e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = perm.mul(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


small_perm = st.permutations(range(1, N + 1)).map(lambda p: (0, *p))
small_gens = st.lists(small_perm, min_size=1, max_size=3)
subsets = st.sets(st.integers(1, N), min_size=1, max_size=N - 1)


@settings(max_examples=60, deadline=None)
@given(small_gens)
def test_chain_order_matches_closure(gens):
    chain = permgrp.schreier_sims(gens, N + 1)
    elems = closure(gens)
    assert chain.order == len(elems)
    assert all(g in chain for g in elems)
    assert sorted(permgrp.elements_iter(chain)) == sorted(elems)


@settings(max_examples=60, deadline=None)
@given(small_gens)
def test_transversals_map_base_points(gens):
    chain = permgrp.schreier_sims(gens, N + 1)
    for i, b in enumerate(chain.base):
        for x, u in chain.transversals[i].items():
            assert u[b] == x
            assert all(u[c] == c for c in chain.base[:i])


@settings(max_examples=60, deadline=None)
@given(small_gens, subsets)
def test_set_stabilizer_matches_bruteforce(gens, s):
    chain = permgrp.schreier_sims(gens, N + 1)
    want = {g for g in closure(gens) if {g[x] for x in s} == s}
    got = permgrp.set_stabilizer_elements(chain, sorted(s))
    assert len(got) == len(set(got))
    assert set(got) == want


@settings(max_examples=60, deadline=None)
@given(small_gens, subsets)
def test_minimal_image_matches_bruteforce(gens, s):
    chain = permgrp.schreier_sims(gens, N + 1)
    assert permgrp.minimal_image(chain, s) == permgrp.minimal_image_bruteforce(gens, s)


@settings(max_examples=30, deadline=None)
@given(small_gens, subsets, small_perm)
def test_minimal_image_is_orbit_invariant(gens, s, _):
    chain = permgrp.schreier_sims(gens, N + 1)
    g = next(iter(closure(gens)))
    moved = perm.image_set(g, s)
    assert permgrp.minimal_image(chain, moved) == permgrp.minimal_image(chain, s)


def test_orbit_cap():
    cyc = (0, *range(2, N + 1), 1)
    with pytest.raises(permgrp.OrbitTooLarge):
        permgrp.orbit([cyc], 1, cap=3)


def test_elements_ceiling():
    chain = permgrp.schreier_sims([(0, 2, 1, 3), (0, 2, 3, 1)])
    with pytest.raises(permgrp.CeilingExceeded):
        list(permgrp.elements_iter(chain, ceiling=5))


def test_group_order(G):
    assert G.order == 1796256000
    assert G.base[0] == 1


@pytest.mark.parametrize("p", [1, 275])
def test_point_stabilizer_order(G, p):
    H = permgrp.point_stabilizer(G, p)
    assert H.order == 6531840
    assert all(g[p] == p for g in H.strong_generators)


def test_vertex_and_edge_orbits(G):
    gens = G.strong_generators
    assert len(permgrp.orbit(gens, 1)) == 275
    assert len(permgrp.orbit(gens, (1, 2), "sets")) == 15400


def test_lex_min_line(G, idx):
    assert permgrp.minimal_image(G, idx.lines[5000]) == (1, 2, 17, 45, 193)
    assert min(idx.lines) == (1, 2, 17, 45, 193)


def test_stabilizer_streaming_is_distinct(idx):
    elems = search.stabilizer_elements(idx, search.representative(29), 1)
    assert len(elems) == 432
    assert len(set(elems)) == 432


def test_apex_group_streams_all_elements(U):
    assert sum(1 for _ in permgrp.elements_iter(U, ceiling=10**7)) == 6531840
