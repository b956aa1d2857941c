import networkx as nx
import numpy as np
import pytest

from src.core.errors import BudgetExceededError, InvalidArgumentError
from src.core.graph import (
    MarkedGraph,
    MultiGraph,
    all_assignments,
    assignment_bits,
    assignment_index,
    conditioned_poly,
    conditioned_vector,
    constrained_poly,
    format_assignment,
    indep_poly,
    independent_sets,
    is_maximally_independent,
    max_agreeing_sets,
    parse_assignment,
    sum_over_assignments,
)
from src.utils.polynomial import Polynomial


def test_assignment_ordering():
    assert all_assignments(2) == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert assignment_index((0, 1, 1)) == 6
    assert assignment_bits(6, 3) == (0, 1, 1)
    assert parse_assignment("011", 3) == (0, 1, 1)
    assert format_assignment((1, 0)) == "10"
    with pytest.raises(InvalidArgumentError):
        parse_assignment("012", 3)
    with pytest.raises(InvalidArgumentError):
        parse_assignment("01", 3)


def test_edges_are_normalized():
    assert MultiGraph(3, ((2, 0), (1, 0))).edges == ((0, 1), (0, 2))
    with pytest.raises(InvalidArgumentError):
        MultiGraph(2, ((0, 2),))


def test_marked_graph_validation():
    k2 = MultiGraph.complete(2)
    with pytest.raises(InvalidArgumentError):
        MarkedGraph(k2, (0,))
    with pytest.raises(InvalidArgumentError):
        MarkedGraph(k2, (1, 1))
    with pytest.raises(InvalidArgumentError):
        MarkedGraph(k2, (0, 5))


def test_independence_polynomials_of_small_graphs():
    assert indep_poly(MultiGraph.path(3)) == Polynomial((1, 3, 1))
    assert indep_poly(MultiGraph.complete(3)) == Polynomial((1, 3))
    assert indep_poly(MultiGraph.cycle(4)) == Polynomial((1, 4, 2))
    assert indep_poly(MultiGraph(0)) == 1


def test_independent_sets_lists_every_set():
    sets = set(independent_sets(MultiGraph.path(3)))
    assert sets == {frozenset(), frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 2})}


def test_loops_exclude_their_vertex():
    looped = MultiGraph(2, ((0, 0),))
    assert indep_poly(looped) == Polynomial((1, 1))
    assert constrained_poly(looped, {0: 1}) == 0


def test_parallel_edges_behave_like_single_edges():
    doubled = MultiGraph(2, ((0, 1), (0, 1)))
    assert indep_poly(doubled) == indep_poly(MultiGraph.complete(2))
    assert doubled.max_degree() == 2


def test_degrees():
    g = MultiGraph(3, ((0, 0), (0, 1), (1, 2)))
    assert g.degree(0) == 3
    assert g.max_degree() == 3
    assert g.neighbours(1) == frozenset({0, 2})
    assert MultiGraph(4).max_degree() == 0


def test_delete_vertices_relabels():
    g = MultiGraph.path(4).delete_vertices([1])
    assert g.vertex_count == 3
    assert g.edges == ((1, 2),)
    with pytest.raises(InvalidArgumentError):
        MultiGraph.path(2).delete_vertices([3])


def test_small_cycles_fall_back_to_paths():
    assert MultiGraph.cycle(2) == MultiGraph.path(2)


def test_connectivity():
    assert MultiGraph.path(5).is_connected()
    assert not MultiGraph(2).is_connected()
    assert not MultiGraph(0).is_connected()


def test_conditioned_polynomials_of_k2():
    g = MarkedGraph(MultiGraph.complete(2), (0, 1))
    assert conditioned_vector(g) == [Polynomial((1,)), Polynomial((0, 1)), Polynomial((0, 1)), Polynomial.zero()]
    assert conditioned_poly(g, (1, 1)) == 0
    assert sum_over_assignments(g) == Polynomial((1, 2))


def test_conditioned_vector_matches_single_assignments():
    g = MarkedGraph(MultiGraph.cycle(6), (0, 2, 3))
    vector = conditioned_vector(g)
    for bits in all_assignments(3):
        assert vector[assignment_index(bits)] == conditioned_poly(g, bits)
    assert sum_over_assignments(g) == indep_poly(g.graph)


def test_constrained_poly():
    path = MultiGraph.path(5)
    assert constrained_poly(path, {0: 0, 4: 0}) == Polynomial((1, 3, 1))
    assert constrained_poly(path, {0: 1, 1: 1}) == 0


def test_brute_force_budget():
    with pytest.raises(BudgetExceededError) as info:
        indep_poly(MultiGraph.path(26))
    assert info.value.size == 26
    assert indep_poly(MultiGraph.path(26), budget=26)[1] == 26


def test_max_agreeing_sets():
    g = MarkedGraph(MultiGraph.path(5), (0, 4))
    result = max_agreeing_sets(g, (0, 0))
    assert result.max_size == 2
    assert result.count == 1
    assert result.witness == frozenset({1, 3})
    k2 = MarkedGraph(MultiGraph.complete(2), (0, 1))
    assert max_agreeing_sets(k2, (1, 1)).max_size is None


def test_k2_with_both_marks_is_not_maximally_independent():
    verdict, report = is_maximally_independent(MarkedGraph(MultiGraph.complete(2), (0, 1)))
    assert verdict is False
    assert report.ones_minus_zeros is None


def test_double_tripod_is_maximally_independent(chebyshev_tripod):
    _, start = chebyshev_tripod
    verdict, report = is_maximally_independent(start)
    assert verdict is True
    assert report.ones_minus_zeros == 2
    assert report.unique_maxima
    assert report.excess_identity
    sizes = {row["assignment"]: row["max_size"] for row in report.rows}
    assert sizes == {"00": 3, "10": 4, "01": 4, "11": 5}


def test_path_with_marked_ends_fails_uniqueness():
    verdict, report = is_maximally_independent(MarkedGraph(MultiGraph.path(4), (0, 3)))
    assert verdict is False
    assert not report.unique_maxima


def _random_graph(seed, n=9, p=0.35):
    g = nx.gnp_random_graph(n, p, seed=seed)
    return MultiGraph(n, tuple(g.edges()))


def _random_marked_graph(seed, k):
    graph = _random_graph(seed)
    marks = np.random.default_rng(seed).choice(graph.vertex_count, size=k, replace=False)
    return MarkedGraph(graph, tuple(int(v) for v in marks))


@pytest.mark.parametrize("seed", range(6))
def test_vertex_deletion_recurrence(seed):
    g = _random_graph(seed)
    for v in (0, 4, g.vertex_count - 1):
        closed = {v} | g.neighbours(v)
        without = indep_poly(g.delete_vertices([v]))
        blocked = indep_poly(g.delete_vertices(closed)).shift(1)
        assert indep_poly(g) == without + blocked


@pytest.mark.parametrize("seed", range(6))
def test_independent_set_count_is_the_value_at_one(seed):
    g = _random_graph(seed)
    assert indep_poly(g)(1) == sum(1 for _ in independent_sets(g))


@pytest.mark.parametrize("seed, k", [(1, 2), (2, 2), (3, 3), (4, 3), (5, 4)])
def test_conditioned_polynomials_sum_to_the_whole(seed, k):
    g = _random_marked_graph(seed, k)
    assert sum_over_assignments(g) == indep_poly(g.graph)


@pytest.mark.parametrize("seed, k", [(7, 2), (8, 3), (9, 3)])
def test_setting_a_mark_adds_at_most_one_vertex(seed, k):
    g = _random_marked_graph(seed, k)
    for bits in all_assignments(k):
        for j in range(k):
            if bits[j]:
                continue
            raised = bits[:j] + (1,) + bits[j + 1:]
            high = max_agreeing_sets(g, raised).max_size
            if high is None:
                continue
            low = max_agreeing_sets(g, bits).max_size
            assert low is not None
            assert high <= low + 1
