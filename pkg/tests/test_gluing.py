import math

import pytest

from src.core.catalog import CATALOG, catalog, catalog_names
from src.core.errors import InvalidArgumentError, NotStableError, UnknownCatalogEntryError, ValidationError
from src.core.gluing import (
    ConnectingGraph,
    GluingData,
    HyperEdge,
    canonical_connector,
    classify,
    collision_fixed_point,
    degree_profile,
    fm_iterate,
    label_dynamics,
    portrait,
    portrait_dot,
    reduced,
    require_valid,
    separation_distances,
    simplify,
    validate,
    with_connectors,
)
from src.core.graph import MarkedGraph, MultiGraph


def _replace(d, **changes):
    fields = dict(m=d.m, k=d.k, edges=d.edges, connecting=d.connecting, attach=d.attach, phi=d.phi)
    fields.update(changes)
    return GluingData(**fields)


def test_catalog_has_six_valid_entries():
    assert catalog_names() == [
        "sierpinski", "hanoi", "chebyshev", "chebyshev-tripod", "spod-star", "degenerate-demo",
    ]
    for name in CATALOG:
        data, start = catalog(name)
        assert validate(data) == [], name
        assert start.k == data.k


def test_unknown_catalog_entry():
    with pytest.raises(UnknownCatalogEntryError) as info:
        catalog("koch")
    assert "sierpinski" in info.value.known


def test_hyperedge_members_are_sorted():
    assert HyperEdge("e", (3, 1), 1).members == (1, 3)


def test_phi_must_be_injective(chebyshev):
    data, _ = chebyshev
    broken = _replace(data, phi={1: "end1", 2: "end1"})
    assert "phi not injective" in validate(broken)
    with pytest.raises(ValidationError) as info:
        require_valid(broken)
    assert "phi not injective" in info.value.report


def test_label_classes_must_partition_the_copies(chebyshev):
    data, _ = chebyshev
    edges = tuple(e for e in data.edges if e.id != "end2")
    broken = _replace(data, edges=edges, phi={1: "end1", 2: "mid"})
    report = validate(broken)
    assert any(line.startswith("label 1 edges do not partition") for line in report)
    assert any("unknown edges" in line for line in report)


def test_attach_map_must_cover_members(chebyshev):
    data, _ = chebyshev
    attach = dict(data.attach)
    attach["mid"] = {1: 0}
    report = validate(_replace(data, attach=attach))
    assert report == ["attach map of 'mid' misses members [2]"]


def test_connectors_must_be_connected(chebyshev):
    data, _ = chebyshev
    connecting = dict(data.connecting)
    connecting["mid"] = ConnectingGraph(MultiGraph(2), 0)
    report = validate(_replace(data, connecting=connecting))
    assert report == ["connecting graph of 'mid' is empty or disconnected"]


def test_small_parameters_rejected(chebyshev):
    data, _ = chebyshev
    assert "m = 1 must be at least 2" in validate(_replace(data, m=1))


def test_reduced_view(sierpinski):
    data, _ = sierpinski
    view = reduced(data)
    assert view.phi == ((1, "o1"), (2, "o2"), (3, "o3"))
    assert len(view.edges) == 6


def test_label_dynamics_of_sierpinski(sierpinski):
    dyn = label_dynamics(sierpinski[0])
    assert dyn.lambda_map == {1: 1, 2: 2, 3: 3}
    assert dyn.periodic_labels == frozenset({1, 2, 3})
    assert dyn.k0 == 3
    assert dyn.preperiod == 0
    assert dyn.period == 1
    assert dyn.critical_labels == frozenset()


def test_label_dynamics_of_chebyshev(chebyshev):
    dyn = label_dynamics(chebyshev[0])
    assert dyn.lambda_map == {1: 1, 2: 1}
    assert dyn.periodic_labels == frozenset({1})
    assert dyn.preperiod == 1
    assert dyn.iterate(2, 3) == 1


def test_two_cycle_period():
    # Lambda swaps the two labels
    edges = (HyperEdge("a", (1,), 2), HyperEdge("b", (2,), 2), HyperEdge("c", (1, 2), 1))
    data = with_connectors(GluingData(2, 2, edges, {}, {}, {1: "a", 2: "c"}), "singleton")
    dyn = label_dynamics(data)
    assert dyn.lambda_map == {1: 2, 2: 1}
    assert dyn.period == 2
    assert dyn.critical_labels == frozenset({2})
    assert not classify(data).non_degenerate


def test_degenerate_demo_is_critical_on_its_cycle(degenerate):
    dyn = label_dynamics(degenerate[0])
    assert dyn.critical_labels == frozenset({1})
    assert 1 in dyn.periodic_labels


@pytest.mark.parametrize("name", ["sierpinski", "hanoi", "chebyshev", "chebyshev-tripod", "spod-star"])
def test_catalog_classification(name):
    result = classify(catalog(name)[0])
    assert result.tokens() == "non_degenerate stable expanding witness_n=1"


def test_degenerate_demo_classification(degenerate):
    result = classify(degenerate[0])
    assert not result.non_degenerate
    assert not result.stable
    assert not result.expanding
    assert result.tokens() == "degenerate unstable non_expanding"


def test_non_singleton_connector_at_a_periodic_label_is_unstable(chebyshev):
    result = classify(with_connectors(chebyshev[0], "pod"))
    assert result.non_degenerate
    assert not result.stable


def test_collision_persists_without_witness(degenerate):
    table = collision_fixed_point(degenerate[0])
    assert table.witness_n is None
    assert table.collides(1, 2)
    assert table.collides(2, 2)


def test_collision_witness(sierpinski):
    table = collision_fixed_point(sierpinski[0])
    assert table.witness_n == 1
    assert table.rounds[0][(1, 2)] is True
    assert not table.collides(1, 3)


def test_fm_iterate(sierpinski, chebyshev, degenerate):
    assert fm_iterate(sierpinski[0]) == 1
    assert fm_iterate(chebyshev[0]) == 1
    with pytest.raises(NotStableError):
        fm_iterate(degenerate[0])


def test_portrait(chebyshev, degenerate):
    graph = portrait(chebyshev[0])
    assert sorted(graph.edges()) == [(1, 1), (2, 1)]
    dot = portrait_dot(degenerate[0])
    assert '  1 -> 1 [label="2:1"];' in dot
    assert "  2 -> 2;" in dot
    assert dot.startswith("digraph portrait {")


def test_canonical_connectors():
    pod, targets = canonical_connector("pod", 3)
    assert pod.sigma == MultiGraph.star(3)
    assert pod.root == 0
    assert targets == [1, 2, 3]
    single, targets = canonical_connector("singleton", 2)
    assert single.is_singleton and targets == [0, 0]
    cycle, _ = canonical_connector("cycle", 2)
    assert cycle.sigma == MultiGraph.path(2)
    with pytest.raises(InvalidArgumentError):
        canonical_connector("wheel", 3)
    with pytest.raises(InvalidArgumentError):
        canonical_connector("pod", 0)


def test_hanoi_is_sierpinski_with_complete_connectors(sierpinski, hanoi):
    assert with_connectors(sierpinski[0], "complete") == hanoi[0]
    assert simplify(hanoi[0]) == sierpinski[0]


def test_separation_of_chebyshev_marks(chebyshev):
    data, start = chebyshev
    assert separation_distances(data, start, 0) == [[0.0, 1.0], [1.0, 0.0]]
    assert separation_distances(data, start, 3) == [[0.0, 8.0], [8.0, 0.0]]


def test_separation_of_sierpinski_marks(sierpinski):
    data, start = sierpinski
    matrix = separation_distances(data, start, 2)
    assert all(matrix[i][j] == (0.0 if i == j else 4.0) for i in range(3) for j in range(3))


def test_disconnected_marks_are_infinitely_far(chebyshev):
    data, _ = chebyshev
    start = MarkedGraph(MultiGraph(2), (0, 1))
    matrix = separation_distances(data, start, 1)
    assert math.isinf(matrix[0][1])


def test_degree_profiles(chebyshev, spod_star):
    assert degree_profile(chebyshev[0], chebyshev[1], 3) == [1, 2, 2, 2]
    assert degree_profile(spod_star[0], spod_star[1], 2) == [1, 3, 3]


@pytest.mark.parametrize("name", catalog_names())
def test_simplify_keeps_the_classification(name):
    data, _ = catalog(name)
    assert classify(simplify(data)).tokens() == classify(data).tokens()


@pytest.mark.parametrize("name", ["sierpinski", "hanoi", "chebyshev", "chebyshev-tripod", "spod-star"])
def test_mark_separations_grow_with_the_level(name):
    data, start = catalog(name)
    matrices = [separation_distances(data, start, n) for n in (1, 2, 3)]
    k = data.k
    for i in range(k):
        for j in range(k):
            if i != j:
                assert matrices[0][i][j] < matrices[1][i][j] < matrices[2][i][j]


def test_root_must_be_a_connector_vertex(chebyshev):
    data, _ = chebyshev
    connecting = dict(data.connecting)
    connecting["mid"] = ConnectingGraph(MultiGraph(1), 3)
    assert validate(_replace(data, connecting=connecting)) == ["root 3 of 'mid' is out of range"]


def test_attach_entries_must_belong_to_members(chebyshev):
    data, _ = chebyshev
    attach = dict(data.attach)
    attach["mid"] = {1: 0, 2: 0, 3: 0}
    assert validate(_replace(data, attach=attach)) == ["dangling attach entries for 'mid': [3]"]
