import itertools

import numpy as np
import pytest

from cpdnn.graph import (
    LEFT,
    RIGHT,
    SupportGraph,
    connected_components,
    is_forest,
    support_graph,
    to_dot,
    two_coloring,
)
from cpdnn.matcore import sym_from_entries

PATH3 = SupportGraph.from_edges(3, [(0, 1), (1, 2)])


def test_support_graph_examples():
    assert support_graph(sym_from_entries([[1, .5], [.5, 1]])).edges == {(0, 1)}
    assert support_graph(sym_from_entries(np.diag([1, 2, 3]))).edges == frozenset()
    S = sym_from_entries([[1, .6, 0], [.6, 1, .6], [0, .6, 1]])
    assert support_graph(S).edges == {(0, 1), (1, 2)}


def test_support_graph_threshold_is_strict():
    S = sym_from_entries([[1, 1e-10, 2e-10], [1e-10, 1, 0], [2e-10, 0, 1]])
    assert support_graph(S, eps_zero=1e-10).edges == {(0, 2)}


def test_two_coloring_path():
    coloring, cycle = two_coloring(PATH3)
    assert cycle is None
    assert coloring.color == (LEFT, RIGHT, LEFT)


def test_two_coloring_triangle_gives_odd_cycle():
    G = SupportGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    coloring, cycle = two_coloring(G)
    assert coloring is None
    assert sorted(cycle) == [0, 1, 2]


def test_two_coloring_empty_graph_all_left():
    coloring, _ = two_coloring(SupportGraph.from_edges(4, []))
    assert coloring.color == (LEFT,) * 4


def test_odd_cycle_witness_on_pentagon_with_tail():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (5, 6)]
    _, cycle = two_coloring(SupportGraph.from_edges(7, edges))
    assert len(cycle) % 2 == 1
    G = SupportGraph.from_edges(7, edges)
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        assert (min(a, b), max(a, b)) in G.edges


def test_connected_components():
    assert connected_components(SupportGraph.from_edges(3, [(0, 1)])) == [{0, 1}, {2}]
    assert connected_components(SupportGraph.from_edges(2, [])) == [{0}, {1}]
    assert connected_components(PATH3) == [{0, 1, 2}]


def test_is_forest():
    assert is_forest(PATH3)
    assert not is_forest(SupportGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert is_forest(SupportGraph.from_edges(5, []))


def test_to_dot():
    assert "1 -- 2" in to_dot(SupportGraph.from_edges(2, [(0, 1)]))
    assert "1;" in to_dot(SupportGraph.from_edges(1, []))
    coloring, _ = two_coloring(PATH3)
    dot = to_dot(PATH3, coloring)
    assert dot.count("rank=same") == 2
    assert "{ rank=same; label=\"L\"; 1; 3; }" in dot
    assert dot.startswith("graph G {") and dot.rstrip().endswith("}")


def test_from_edges_rejects_self_loop():
    with pytest.raises(ValueError):
        SupportGraph.from_edges(2, [(1, 1)])


def _has_odd_cycle_bruteforce(r, edges):
    # a graph is bipartite iff some assignment of 2 colours is proper
    for colors in itertools.product((0, 1), repeat=r):
        if all(colors[i] != colors[j] for i, j in edges):
            return False
    return True


def test_two_coloring_against_exhaustive_search():
    rng = np.random.default_rng(5)
    pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    for _ in range(300):
        edges = [e for e in pairs if rng.uniform() < 0.3]
        G = SupportGraph.from_edges(6, edges)
        coloring, cycle = two_coloring(G)
        assert (coloring is None) == _has_odd_cycle_bruteforce(6, edges)
        if coloring is not None:
            assert coloring.is_valid_for(G)
        else:
            assert len(cycle) % 2 == 1
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                assert (min(a, b), max(a, b)) in G.edges
