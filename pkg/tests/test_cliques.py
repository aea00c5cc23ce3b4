import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mclsearch import cliques
from mclsearch.graphcore import Graph


def brute_maximal_cliques(g):
    vs = list(g.vertices)
    out = []
    for k in range(1, g.n + 1):
        for c in itertools.combinations(vs, k):
            if g.is_clique(c) and not any(g.is_clique(c + (v,)) for v in vs if v not in c):
                out.append(c)
    return sorted(out)


@settings(max_examples=80, deadline=None)
@given(st.sets(st.tuples(st.integers(1, 7), st.integers(1, 7)).filter(lambda e: e[0] < e[1])))
def test_maximal_cliques_match_bruteforce(edges):
    g = Graph(7, edges)
    assert sorted(cliques.maximal_cliques(g)) == brute_maximal_cliques(g)


def test_line_census(idx):
    assert len(idx) == 15400
    assert all(len(ln) == 5 for ln in idx.lines)
    assert idx.lines == sorted(idx.lines)
    assert {len(idx.by_vertex[v]) for v in idx.graph.vertices} == {280}
    assert {len(v) for v in idx.by_edge.values()} == {10}
    assert len(idx.by_edge) == 15400


def test_first_line(idx):
    assert idx.lines[0] == (1, 2, 17, 45, 193)
    assert idx.checksum() == "2208ec88c94806b8"


def test_triangles_lie_on_unique_lines(idx, graph):
    triangles = 0
    for a in graph.vertices:
        for b in graph.neighbors[a]:
            if b <= a:
                continue
            common = graph.rows[a] & graph.rows[b]
            triangles += sum(1 for c in cliques.points_of(common) if c > b)
    assert triangles == 154000 == len(idx.by_triple)


def test_unique_line_containing(idx):
    assert cliques.unique_line_containing(idx, (17, 1, 2)) == (1, 2, 17, 45, 193)
    with pytest.raises(ValueError):
        cliques.unique_line_containing(idx, (1, 2))


def test_no_six_clique(idx, graph):
    for ln in idx.lines[:2000]:
        common = graph.rows[ln[0]]
        for v in ln[1:]:
            common &= graph.rows[v]
        assert common == 0


def test_two_point_count(idx):
    rng = random.Random(11)
    for _ in range(200):
        ln = idx.lines[rng.randrange(len(idx))]
        q = rng.choice([v for v in idx.graph.vertices if v not in ln])
        assert cliques.two_point_count(idx, ln, q) == 2
    with pytest.raises(ValueError):
        cliques.two_point_count(idx, idx.lines[0], 1)


def test_two_point_count_sees_intersections(idx, graph):
    ln = idx.lines[0]
    other = next(idx.lines[i] for i in idx.by_vertex[ln[0]]
                 if len(set(idx.lines[i]) & set(ln)) == 1)
    for q in other:
        if q in ln:
            continue
        hits = [v for v in ln if graph.adjacent(q, v)]
        assert len(hits) == 2 and ln[0] in hits


def test_line_perm_is_action(idx, G):
    g, h = G.strong_generators[:2]
    from mclsearch import perm
    assert idx.line_perm(perm.mul(g, h)) == perm.mul(idx.line_perm(g), idx.line_perm(h))


def test_text_roundtrip(idx):
    assert cliques.lines_from_text(cliques.lines_to_text(idx.lines[:50])) == idx.lines[:50]
