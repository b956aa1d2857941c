"""
The graph recursion: m copies of G_n glued through the connecting graphs
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from src.core.config_manager import config
from src.core.errors import BudgetExceededError, InternalError, InvalidArgumentError
from src.core.gluing import GluingData, require_valid
from src.core.graph import MarkedGraph, MultiGraph
from src.utils.logger import logger
from src.utils.union_find import UnionFind


@dataclass(frozen=True)
class CopyAddressing:
    """Where every copy vertex and connector vertex ended up in G_{n+1}"""

    copy_size: int
    connector_offsets: Dict[str, int]
    final_id: Tuple[int, ...]

    def copy_vertex(self, copy: int, vertex: int) -> int:
        """Final id of `vertex` of copy number `copy` (1-based)"""
        return self.final_id[(copy - 1) * self.copy_size + vertex]

    def connector_vertex(self, edge_id: str, vertex: int) -> int:
        return self.final_id[self.connector_offsets[edge_id] + vertex]


def glue(d: GluingData, g: MarkedGraph) -> Tuple[MarkedGraph, CopyAddressing]:
    """One recursion step together with the address table of the quotient"""
    if g.k != d.k:
        raise InvalidArgumentError(f"Graph has {g.k} marks but the gluing data expects {d.k}")
    n = g.vertex_count

    offsets, total = {}, d.m * n
    for e in d.edges:
        offsets[e.id] = total
        total += d.connecting[e.id].sigma.vertex_count

    uf = UnionFind(total)
    for e in d.edges:
        mark = g.marks[e.label - 1]
        for member in e.members:
            uf.union((member - 1) * n + mark, offsets[e.id] + d.attach[e.id][member])

    final = uf.labels()
    edges = []
    for copy in range(d.m):
        base = copy * n
        edges.extend((final[base + a], final[base + b]) for a, b in g.graph.edges)
    for e in d.edges:
        base = offsets[e.id]
        edges.extend((final[base + a], final[base + b]) for a, b in d.connecting[e.id].sigma.edges)

    marks = tuple(final[offsets[d.phi[j]] + d.connecting[d.phi[j]].root] for j in range(1, d.k + 1))
    if len(set(marks)) != len(marks):
        raise InternalError(f"New marks collide after identification: {marks}")

    count = max(final) + 1 if final else 0
    result = MarkedGraph(MultiGraph(count, tuple(edges)), marks)
    return result, CopyAddressing(n, offsets, tuple(final))


def apply(d: GluingData, g: MarkedGraph) -> MarkedGraph:
    require_valid(d)
    result, _ = glue(d, g)
    return result


def vertex_count_sequence(d: GluingData, v0: int, n_max: int) -> List[int]:
    """|V(G_n)| for n = 0..n_max without building anything"""
    connector_vertices = sum(d.connecting[e.id].sigma.vertex_count for e in d.edges)
    identifications = sum(len(e) for e in d.edges)
    counts = [v0]
    for _ in range(n_max):
        counts.append(d.m * counts[-1] + connector_vertices - identifications)
    return counts


def edge_count_sequence(d: GluingData, e0: int, n_max: int) -> List[int]:
    connector_edges = sum(d.connecting[e.id].sigma.edge_count for e in d.edges)
    counts = [e0]
    for _ in range(n_max):
        counts.append(d.m * counts[-1] + connector_edges)
    return counts


def iterate(d: GluingData, g0: MarkedGraph, n: int, budget: Optional[int] = None) -> MarkedGraph:
    """G_n; n = 0 returns g0 itself"""
    if n < 0:
        raise InvalidArgumentError(f"Level must be nonnegative, got {n}")
    require_valid(d)
    limit = budget if budget is not None else config.get("budgets.build_vertices", 1000000)
    projected = vertex_count_sequence(d, g0.vertex_count, n)[-1]
    if projected > limit:
        logger.warning(f"Refusing to build level {n}: {projected} vertices over budget {limit}")
        raise BudgetExceededError("build vertex", projected, limit)

    g = g0
    for level in range(1, n + 1):
        g, _ = glue(d, g)
        logger.debug(f"Built level {level}: {g.vertex_count} vertices, {g.graph.edge_count} edges")
    return g
