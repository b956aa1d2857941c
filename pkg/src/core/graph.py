"""
Multigraphs, marked graphs and the brute-force independent-set oracle
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from src.core.config_manager import config
from src.core.errors import BudgetExceededError, InvalidArgumentError
from src.utils.logger import logger
from src.utils.polynomial import Polynomial

Edge = Tuple[int, int]
Bits = Tuple[int, ...]


# ------------------------------------------------------------------ assignments

def assignment_index(bits: Sequence[int]) -> int:
    """Position of an assignment in the 2^k ordering (label 1 is the least significant bit)"""
    return sum(bit << j for j, bit in enumerate(bits))


def assignment_bits(index: int, k: int) -> Bits:
    """Inverse of assignment_index for k labels"""
    return tuple((index >> j) & 1 for j in range(k))


def all_assignments(k: int) -> List[Bits]:
    """Every assignment of k labels, in index order"""
    return [assignment_bits(i, k) for i in range(1 << k)]


def parse_assignment(text: str, k: int) -> Bits:
    """'101' -> (1, 0, 1); character j is the bit of label j+1"""
    text = text.strip()
    if len(text) != k or any(ch not in "01" for ch in text):
        raise InvalidArgumentError(f"Assignment '{text}' is not a {k}-character binary string")
    return tuple(int(ch) for ch in text)


def format_assignment(bits: Sequence[int]) -> str:
    """(1, 0, 1) -> '101'"""
    return "".join(str(b) for b in bits)


# ------------------------------------------------------------------ graph types

@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph on vertices 0..vertex_count-1; loops and parallel edges allowed"""

    vertex_count: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise InvalidArgumentError(f"Negative vertex count {self.vertex_count}")
        normalized = []
        for a, b in self.edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise InvalidArgumentError(
                    f"Edge ({a}, {b}) has an endpoint outside 0..{self.vertex_count - 1}"
                )
            normalized.append((min(a, b), max(a, b)))
        # canonical order makes equality independent of input order
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @classmethod
    def complete(cls, n: int) -> "MultiGraph":
        return cls(n, tuple((a, b) for a in range(n) for b in range(a + 1, n)))

    @classmethod
    def path(cls, n: int) -> "MultiGraph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def star(cls, leaves: int) -> "MultiGraph":
        """K_{1,leaves} with the centre at vertex 0"""
        return cls(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))

    @classmethod
    def cycle(cls, n: int) -> "MultiGraph":
        if n < 3:
            return cls.path(n)
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency_masks(self) -> List[int]:
        """Bitmask of neighbours per vertex; a loop puts the vertex in its own mask"""
        masks = [0] * self.vertex_count
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return masks

    def neighbours(self, v: int) -> FrozenSet[int]:
        return frozenset(b if a == v else a for a, b in self.edges if v in (a, b))

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def max_degree(self) -> int:
        """Largest multigraph degree (loops count twice, parallel edges with multiplicity)"""
        counts = Counter()
        for a, b in self.edges:
            counts[a] += 1
            counts[b] += 1
        return max(counts.values(), default=0)

    def delete_vertices(self, vertices: Iterable[int]) -> "MultiGraph":
        """Induced subgraph on the remaining vertices, relabelled in increasing order"""
        gone = set(vertices)
        for v in gone:
            if not 0 <= v < self.vertex_count:
                raise InvalidArgumentError(f"Vertex {v} out of range")
        kept = [v for v in range(self.vertex_count) if v not in gone]
        new_id = {v: i for i, v in enumerate(kept)}
        return MultiGraph(
            len(kept),
            tuple((new_id[a], new_id[b]) for a, b in self.edges if a in new_id and b in new_id),
        )

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        return self.vertex_count > 0 and nx.is_connected(self.to_networkx())


@dataclass(frozen=True)
class MarkedGraph:
    """Graph with k >= 2 distinct marked vertices; marks[j] carries label j+1"""

    graph: MultiGraph
    marks: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(self.marks))
        if len(self.marks) < 2:
            raise InvalidArgumentError(f"A marked graph needs at least 2 marks, got {len(self.marks)}")
        if len(set(self.marks)) != len(self.marks):
            raise InvalidArgumentError(f"Marks {self.marks} are not distinct")
        for v in self.marks:
            if not 0 <= v < self.graph.vertex_count:
                raise InvalidArgumentError(f"Mark {v} is not a vertex")

    @property
    def k(self) -> int:
        return len(self.marks)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count


# ------------------------------------------------------------------ oracle

def _check_budget(g: MultiGraph, budget: Optional[int]):
    limit = budget if budget is not None else config.get("budgets.brute_force_vertices", 25)
    if g.vertex_count > limit:
        logger.warning(f"Brute force refused for {g.vertex_count} vertices (budget {limit})")
        raise BudgetExceededError("brute-force vertex", g.vertex_count, limit)


def _walk(g: MultiGraph, forced_in: int = 0, forced_out: int = 0) -> Iterator[int]:
    """
    Depth-first enumeration of independent sets as bitmasks.
    forced_in vertices are always taken, forced_out never.
    """
    adj = g.adjacency_masks()
    n = g.vertex_count
    if any(adj[v] >> v & 1 for v in range(n) if forced_in >> v & 1):
        return
    stack = [(0, 0, 0)]
    while stack:
        v, chosen, blocked = stack.pop()
        if v == n:
            yield chosen
            continue
        bit = 1 << v
        if not forced_in & bit:
            stack.append((v + 1, chosen, blocked))
        if not (blocked | forced_out | adj[v]) & bit:
            stack.append((v + 1, chosen | bit, blocked | adj[v]))


def _mask_to_set(mask: int) -> FrozenSet[int]:
    """Vertex set of a bitmask"""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def _size_counts(masks: Iterable[int]) -> Polynomial:
    """Coefficient t counts the masks with t bits set"""
    counts: Dict[int, int] = Counter(bin(m).count("1") for m in masks)
    if not counts:
        return Polynomial.zero()
    return Polynomial(counts.get(t, 0) for t in range(max(counts) + 1))


def _marks_masks(g: MarkedGraph, t: Sequence[int]) -> Tuple[int, int]:
    """(forced_in, forced_out) vertex masks for the marks under assignment t"""
    if len(t) != g.k:
        raise InvalidArgumentError(f"Assignment of length {len(t)} for a graph with {g.k} marks")
    forced_in = forced_out = 0
    for v, bit in zip(g.marks, t):
        if bit not in (0, 1):
            raise InvalidArgumentError(f"Assignment bits must be 0 or 1, got {bit}")
        if bit:
            forced_in |= 1 << v
        else:
            forced_out |= 1 << v
    return forced_in, forced_out


def independent_sets(g: MultiGraph, budget: Optional[int] = None) -> Iterator[FrozenSet[int]]:
    """Every independent vertex subset, the empty set included"""
    _check_budget(g, budget)
    for mask in _walk(g):
        yield _mask_to_set(mask)


def indep_poly(g: MultiGraph, budget: Optional[int] = None) -> Polynomial:
    """Independence polynomial by exhaustive enumeration"""
    _check_budget(g, budget)
    return _size_counts(_walk(g))


def constrained_poly(g: MultiGraph, constraints: Mapping[int, int], budget: Optional[int] = None) -> Polynomial:
    """Independence polynomial over sets that contain every vertex pinned to 1 and avoid every vertex pinned to 0"""
    _check_budget(g, budget)
    forced_in = forced_out = 0
    for v, bit in constraints.items():
        if bit:
            forced_in |= 1 << v
        else:
            forced_out |= 1 << v
    return _size_counts(_walk(g, forced_in, forced_out))


def conditioned_poly(g: MarkedGraph, t: Sequence[int], budget: Optional[int] = None) -> Polynomial:
    """Sum of lambda^|S| over independent S that agree with t on the marks"""
    forced_in, forced_out = _marks_masks(g, t)
    _check_budget(g.graph, budget)
    return _size_counts(_walk(g.graph, forced_in, forced_out))


def conditioned_vector(g: MarkedGraph, budget: Optional[int] = None) -> List[Polynomial]:
    """All 2^k conditioned polynomials from a single enumeration pass"""
    _check_budget(g.graph, budget)
    buckets: List[Counter] = [Counter() for _ in range(1 << g.k)]
    for mask in _walk(g.graph):
        index = sum(((mask >> v) & 1) << j for j, v in enumerate(g.marks))
        buckets[index][bin(mask).count("1")] += 1
    out = []
    for counts in buckets:
        if counts:
            out.append(Polynomial(counts.get(t, 0) for t in range(max(counts) + 1)))
        else:
            out.append(Polynomial.zero())
    return out


def sum_over_assignments(g: MarkedGraph, budget: Optional[int] = None) -> Polynomial:
    """Sum of the conditioned vector; equals the independence polynomial of g"""
    total = Polynomial.zero()
    for p in conditioned_vector(g, budget):
        total = total + p
    return total


@dataclass(frozen=True)
class MaxAgreeing:
    max_size: Optional[int]
    count: int
    witness: Optional[FrozenSet[int]]


def max_agreeing_sets(g: MarkedGraph, t: Sequence[int], budget: Optional[int] = None) -> MaxAgreeing:
    """Largest independent sets agreeing with t; max_size is None if none agrees"""
    forced_in, forced_out = _marks_masks(g, t)
    _check_budget(g.graph, budget)
    best, count, witness = None, 0, None
    for mask in _walk(g.graph, forced_in, forced_out):
        size = bin(mask).count("1")
        if best is None or size > best:
            best, count, witness = size, 1, mask
        elif size == best:
            count += 1
            witness = min(witness, mask)
    return MaxAgreeing(best, count, None if witness is None else _mask_to_set(witness))


@dataclass(frozen=True)
class MaxIndependenceReport:
    maximally_independent: bool
    rows: Tuple[dict, ...]
    ones_minus_zeros: Optional[int]
    unique_maxima: bool
    excess_identity: bool


def is_maximally_independent(g: MarkedGraph, budget: Optional[int] = None) -> Tuple[bool, MaxIndependenceReport]:
    """
    Unique maximum agreeing set for every assignment, and the all-ones maximum
    exceeding the all-zeros maximum by exactly k.
    """
    k = g.k
    results = [max_agreeing_sets(g, bits, budget) for bits in all_assignments(k)]
    base = results[0].max_size
    rows = []
    for bits, res in zip(all_assignments(k), results):
        excess = None if res.max_size is None or base is None else res.max_size - base
        rows.append({
            "assignment": format_assignment(bits),
            "max_size": res.max_size,
            "count": res.count,
            "excess": excess,
        })

    top = results[-1].max_size
    diff = None if top is None or base is None else top - base
    if diff is not None and diff > k:
        # removing the k marks from I(1..1) leaves an agreeing set for (0..0)
        raise AssertionError(f"#I(1..1) - #I(0..0) = {diff} exceeds k = {k}")

    unique = all(res.count == 1 for res in results)
    excess_ok = all(
        row["excess"] is not None and row["excess"] == sum(bits)
        for bits, row in zip(all_assignments(k), rows)
    )
    verdict = unique and diff == k
    report = MaxIndependenceReport(verdict, tuple(rows), diff, unique, excess_ok)
    logger.debug(f"Maximal independence check: unique={unique} diff={diff} verdict={verdict}")
    return verdict, report
