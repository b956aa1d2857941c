"""
Built-in gluing data and their default starting graphs
"""

from typing import Callable, Dict, Tuple

from src.core.errors import UnknownCatalogEntryError
from src.core.gluing import ConnectingGraph, GluingData, HyperEdge, with_connectors
from src.core.graph import MarkedGraph, MultiGraph

Entry = Tuple[GluingData, MarkedGraph]


def _k3_start() -> MarkedGraph:
    return MarkedGraph(MultiGraph.complete(3), (0, 1, 2))


def _k2_start() -> MarkedGraph:
    return MarkedGraph(MultiGraph.complete(2), (0, 1))


def _singleton_data(m: int, k: int, edges, phi) -> GluingData:
    hyper = tuple(HyperEdge(eid, members, label) for eid, members, label in edges)
    return with_connectors(GluingData(m, k, hyper, {}, {}, phi), "singleton")


def sierpinski() -> Entry:
    data = _singleton_data(3, 3, [
        ("c12", (1, 2), 3),
        ("c23", (2, 3), 1),
        ("c13", (1, 3), 2),
        ("o1", (1,), 1),
        ("o2", (2,), 2),
        ("o3", (3,), 3),
    ], {1: "o1", 2: "o2", 3: "o3"})
    return data, _k3_start()


def hanoi() -> Entry:
    """Sierpinski gluing scheme with the shared corners replaced by K2 bridges"""
    base, start = sierpinski()
    bridged = with_connectors(base, "complete")
    return bridged, start


def chebyshev() -> Entry:
    data = _singleton_data(2, 2, [
        ("end1", (1,), 1),
        ("end2", (2,), 1),
        ("mid", (1, 2), 2),
    ], {1: "end1", 2: "end2"})
    return data, _k2_start()


def double_tripod() -> MarkedGraph:
    """Two tripods sharing an unmarked leaf, marks on one leaf of each"""
    # 0=a1 1=c1 2=b 3=c2 4=a2 5=d1 6=d2
    graph = MultiGraph(7, ((0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6)))
    return MarkedGraph(graph, (0, 4))


def chebyshev_tripod() -> Entry:
    data, _ = chebyshev()
    return data, double_tripod()


def spod_star() -> Entry:
    """Three copies; the label-2 marks hang off the centre of a 3-pod"""
    hyper = (
        HyperEdge("s1", (1,), 1),
        HyperEdge("s2", (2,), 1),
        HyperEdge("s3", (3,), 1),
        HyperEdge("pod", (1, 2, 3), 2),
    )
    connecting = {eid: ConnectingGraph(MultiGraph(1), 0) for eid in ("s1", "s2", "s3")}
    connecting["pod"] = ConnectingGraph(MultiGraph.star(3), 0)
    attach = {"s1": {1: 0}, "s2": {2: 0}, "s3": {3: 0}, "pod": {1: 1, 2: 2, 3: 3}}
    data = GluingData(3, 2, hyper, connecting, attach, {1: "s1", 2: "s2"})
    return data, _k2_start()


def degenerate_demo() -> Entry:
    """Label 1 is fixed by Lambda and its Phi-edge has two members"""
    data = _singleton_data(2, 2, [
        ("join", (1, 2), 1),
        ("left", (1,), 2),
        ("right", (2,), 2),
    ], {1: "join", 2: "left"})
    return data, _k2_start()


CATALOG: Dict[str, Callable[[], Entry]] = {
    "sierpinski": sierpinski,
    "hanoi": hanoi,
    "chebyshev": chebyshev,
    "chebyshev-tripod": chebyshev_tripod,
    "spod-star": spod_star,
    "degenerate-demo": degenerate_demo,
}


def catalog_names():
    return list(CATALOG)


def catalog(name: str) -> Entry:
    try:
        return CATALOG[name]()
    except KeyError:
        raise UnknownCatalogEntryError(name, CATALOG) from None
