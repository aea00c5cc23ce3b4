import itertools

import pytest
from hypothesis import given, strategies as st

from mclsearch import graphcore
from mclsearch.graphcore import Graph


def test_generator_images():
    g1, g2 = graphcore.mclaughlin_generators()
    assert g1[1] == 2
    assert g2[5] == 1


def test_graph_size(graph):
    assert graph.n == 275
    assert graph.n_edges == 15400
    assert graph.degree(1) == 112


def test_srg_parameters(graph):
    params = graphcore.srg_params(graph)
    assert tuple(params) == (275, 112, 30, 56)
    assert params.global_parameters() == [[0, 0, 112], [1, 30, 81], [56, 56, 0]]


def test_pseudogeometric_parameters():
    assert tuple(graphcore.pseudogeometric_params(4, 27, 2)) == (275, 112, 30, 56)
    with pytest.raises(ValueError):
        graphcore.pseudogeometric_params(4, 27, 9)


@pytest.mark.parametrize("p,q,size", [(1, 2, 30), (1, 8, 56)])
def test_common_neighbors(graph, p, q, size):
    assert graph.adjacent(p, q) == (size == 30)
    assert len(graphcore.common_neighbors(graph, p, q)) == size


def test_common_neighbors_rejects_equal(graph):
    with pytest.raises(ValueError):
        graphcore.common_neighbors(graph, 3, 3)


def test_gewirtz_subgraph(graph):
    sub, _ = graphcore.induced_subgraph(graph, graphcore.common_neighbors(graph, 1, 8))
    assert sub.n_edges == 280
    assert tuple(graphcore.srg_params(sub)) == (56, 10, 0, 2)


def test_line_induces_clique(graph):
    sub, _ = graphcore.induced_subgraph(graph, (1, 2, 17, 45, 193))
    assert sub.n_edges == 10


def test_non_srg_rejected():
    path = Graph(3, [(1, 2), (2, 3)])
    with pytest.raises(graphcore.NotStronglyRegular):
        graphcore.srg_params(path)


def test_edge_cap():
    with pytest.raises(graphcore.EdgeCapExceeded):
        graphcore.build_graph(list(graphcore.mclaughlin_generators()), edge_cap=100)


def test_bad_seed_edge():
    with pytest.raises(ValueError):
        graphcore.build_graph(list(graphcore.mclaughlin_generators()), seed_edge=(3, 3))


def test_text_roundtrip(graph):
    assert Graph.from_text(graph.to_text()) == graph


def test_text_header_checked(graph):
    text = graph.to_text()
    head, rest = text.split("\n", 1)
    with pytest.raises(ValueError):
        Graph.from_text(head + "\n" + rest.split("\n", 1)[1])


@given(st.sets(st.tuples(st.integers(1, 8), st.integers(1, 8)).filter(lambda e: e[0] != e[1])))
def test_graph_symmetric(edges):
    g = Graph(8, edges)
    for a, b in itertools.permutations(range(1, 9), 2):
        assert g.adjacent(a, b) == g.adjacent(b, a) == ((a, b) in edges or (b, a) in edges)
    assert g.n_edges == len({tuple(sorted(e)) for e in edges})
