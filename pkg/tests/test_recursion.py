import networkx as nx
import numpy as np
import pytest

from src.core.catalog import CATALOG, catalog
from src.core.errors import BudgetExceededError, InvalidArgumentError
from src.core.graph import MarkedGraph, MultiGraph
from src.core.recursion import apply, edge_count_sequence, glue, iterate, vertex_count_sequence


def test_chebyshev_first_step_is_a_marked_path(chebyshev):
    data, start = chebyshev
    assert apply(data, start) == MarkedGraph(MultiGraph.path(3), (0, 2))


def test_copy_addressing_records_identifications(chebyshev):
    data, start = chebyshev
    _, addressing = glue(data, start)
    # the label-2 marks of both copies become one vertex
    assert addressing.copy_vertex(1, 1) == addressing.copy_vertex(2, 1)
    assert addressing.copy_vertex(1, 0) != addressing.copy_vertex(2, 0)
    assert addressing.connector_vertex("end1", 0) == addressing.copy_vertex(1, 0)


def test_chebyshev_levels_are_paths(chebyshev):
    data, start = chebyshev
    g = iterate(data, start, 4)
    assert g.vertex_count == 17
    assert g.graph.edge_count == 16
    assert g.graph.is_connected()
    assert g.graph.max_degree() == 2


def test_sierpinski_first_level(sierpinski):
    data, start = sierpinski
    g = apply(data, start)
    assert g.vertex_count == 6
    assert g.graph.edge_count == 9
    assert g.graph.max_degree() == 4
    assert all(g.graph.degree(v) == 2 for v in g.marks)


def test_hanoi_level_two_has_27_vertices(hanoi):
    data, start = hanoi
    g = iterate(data, start, 2)
    assert g.vertex_count == 27
    assert g.graph.edge_count == 39
    assert g.graph.max_degree() == 3


def test_spod_star_levels(spod_star):
    data, start = spod_star
    g1 = iterate(data, start, 1)
    assert (g1.vertex_count, g1.graph.edge_count) == (7, 6)
    assert iterate(data, start, 2).vertex_count == 22


def test_level_zero_returns_the_start(sierpinski):
    data, start = sierpinski
    assert iterate(data, start, 0) is start
    with pytest.raises(InvalidArgumentError):
        iterate(data, start, -1)


def test_count_sequences(sierpinski, hanoi, chebyshev):
    assert vertex_count_sequence(sierpinski[0], 3, 3) == [3, 6, 15, 42]
    assert edge_count_sequence(sierpinski[0], 3, 3) == [3, 9, 27, 81]
    assert vertex_count_sequence(hanoi[0], 3, 3) == [3, 9, 27, 81]
    assert edge_count_sequence(hanoi[0], 3, 2) == [3, 12, 39]
    assert vertex_count_sequence(chebyshev[0], 2, 4) == [2, 3, 5, 9, 17]


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_count_formulas_match_built_graphs(name):
    data, start = catalog(name)
    vertices = vertex_count_sequence(data, start.vertex_count, 2)
    edges = edge_count_sequence(data, start.graph.edge_count, 2)
    for n in range(3):
        g = iterate(data, start, n)
        assert g.vertex_count == vertices[n]
        assert g.graph.edge_count == edges[n]


def test_mark_count_mismatch(chebyshev):
    data, _ = chebyshev
    with pytest.raises(InvalidArgumentError):
        apply(data, MarkedGraph(MultiGraph.complete(3), (0, 1, 2)))


def test_build_budget(sierpinski):
    data, start = sierpinski
    with pytest.raises(BudgetExceededError) as info:
        iterate(data, start, 5, budget=100)
    assert info.value.size == 366
    assert info.value.budget == 100


def test_construction_is_deterministic(hanoi):
    data, start = hanoi
    assert iterate(data, start, 2) == iterate(data, start, 2)


def _relabel(g, permutation):
    edges = tuple((permutation[a], permutation[b]) for a, b in g.graph.edges)
    return MarkedGraph(MultiGraph(g.vertex_count, edges), tuple(permutation[v] for v in g.marks))


def _marked_hash(g):
    simple = nx.Graph(g.graph.to_networkx())
    labels = {v: 0 for v in simple}
    labels.update({v: j + 1 for j, v in enumerate(g.marks)})
    nx.set_node_attributes(simple, labels, "mark")
    return nx.weisfeiler_lehman_graph_hash(simple, node_attr="mark")


@pytest.mark.parametrize("name", ["sierpinski", "chebyshev-tripod", "spod-star"])
def test_apply_commutes_with_relabelling(name):
    data, start = catalog(name)
    permutation = [int(v) for v in np.random.default_rng(3).permutation(start.vertex_count)]
    relabelled = _relabel(start, permutation)
    assert _marked_hash(apply(data, relabelled)) == _marked_hash(apply(data, start))
    assert apply(data, relabelled).graph.edge_count == apply(data, start).graph.edge_count
