"""
Gluing data (H, Sigma, Upsilon, Phi): validation, label dynamics and classification
"""

from dataclasses import dataclass
from math import gcd, inf
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx

from src.core.config_manager import config
from src.core.errors import InternalError, InvalidArgumentError, NotStableError, ValidationError
from src.core.graph import MarkedGraph, MultiGraph
from src.utils.logger import logger

CONNECTOR_KINDS = ("singleton", "pod", "cycle", "complete")


@dataclass(frozen=True)
class HyperEdge:
    id: str
    members: Tuple[int, ...]
    label: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class ConnectingGraph:
    sigma: MultiGraph
    root: int = 0

    @property
    def is_singleton(self) -> bool:
        return self.sigma.vertex_count == 1


@dataclass(frozen=True)
class GluingData:
    """
    m copies glued along the hyperedges of H. For edge e, connector
    connecting[e.id] is attached through attach[e.id][member] and
    phi[j] names the edge whose root carries the new mark j.
    """

    m: int
    k: int
    edges: Tuple[HyperEdge, ...]
    connecting: Mapping[str, ConnectingGraph]
    attach: Mapping[str, Mapping[int, int]]
    phi: Mapping[int, str]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "connecting", dict(self.connecting))
        object.__setattr__(self, "attach", {eid: dict(a) for eid, a in self.attach.items()})
        object.__setattr__(self, "phi", dict(self.phi))

    def edge(self, edge_id: str) -> HyperEdge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise InvalidArgumentError(f"No edge with id '{edge_id}'")

    def phi_edge(self, label: int) -> HyperEdge:
        return self.edge(self.phi[label])

    def root_label(self, edge_id: str) -> Optional[int]:
        """The label j with phi(j) = edge_id, if any"""
        for j, eid in self.phi.items():
            if eid == edge_id:
                return j
        return None

    def edges_with_label(self, label: int) -> List[HyperEdge]:
        return [e for e in self.edges if e.label == label]


@dataclass(frozen=True)
class ReducedData:
    """The (H, Phi) part that classification reads"""

    m: int
    k: int
    edges: Tuple[HyperEdge, ...]
    phi: Tuple[Tuple[int, str], ...]


def reduced(d: GluingData) -> ReducedData:
    return ReducedData(d.m, d.k, d.edges, tuple(sorted(d.phi.items())))


# ------------------------------------------------------------------ validation

def validate(d: GluingData) -> List[str]:
    """Names every violated invariant; an empty list means the data is valid"""
    report = []
    if d.m < 2:
        report.append(f"m = {d.m} must be at least 2")
    if d.k < 2:
        report.append(f"k = {d.k} must be at least 2")

    ids = [e.id for e in d.edges]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        report.append(f"duplicate edge ids: {duplicates}")

    for e in d.edges:
        if not e.members:
            report.append(f"edge '{e.id}' has no members")
        bad = [i for i in e.members if not 1 <= i <= d.m]
        if bad:
            report.append(f"edge '{e.id}' has members outside 1..{d.m}: {bad}")
        if len(set(e.members)) != len(e.members):
            report.append(f"edge '{e.id}' repeats a member")
        if not 1 <= e.label <= d.k:
            report.append(f"edge '{e.id}' has label {e.label} outside 1..{d.k}")

    for label in range(1, d.k + 1):
        covered = sorted(i for e in d.edges_with_label(label) for i in e.members)
        if covered != list(range(1, d.m + 1)):
            report.append(f"label {label} edges do not partition {{1..{d.m}}}: cover {covered}")

    for e in d.edges:
        conn = d.connecting.get(e.id)
        if conn is None:
            report.append(f"edge '{e.id}' has no connecting graph")
            continue
        if conn.sigma.vertex_count == 0 or not conn.sigma.is_connected():
            report.append(f"connecting graph of '{e.id}' is empty or disconnected")
        if not 0 <= conn.root < conn.sigma.vertex_count:
            report.append(f"root {conn.root} of '{e.id}' is out of range")
        attach = d.attach.get(e.id)
        if attach is None:
            report.append(f"edge '{e.id}' has no attach map")
            continue
        missing = sorted(set(e.members) - set(attach))
        if missing:
            report.append(f"attach map of '{e.id}' misses members {missing}")
        extra = sorted(set(attach) - set(e.members))
        if extra:
            report.append(f"dangling attach entries for '{e.id}': {extra}")
        for member, vertex in attach.items():
            if not 0 <= vertex < conn.sigma.vertex_count:
                report.append(f"attach of '{e.id}' sends member {member} to missing vertex {vertex}")

    unknown = sorted(set(d.connecting) - set(ids)) + sorted(set(d.attach) - set(ids))
    if unknown:
        report.append(f"connecting/attach entries for unknown edges: {sorted(set(unknown))}")

    if sorted(d.phi) != list(range(1, d.k + 1)):
        report.append(f"phi must be defined exactly on labels 1..{d.k}, got {sorted(d.phi)}")
    for j, eid in d.phi.items():
        if eid not in ids:
            report.append(f"phi({j}) = '{eid}' is not an edge")
    if len(set(d.phi.values())) != len(d.phi):
        report.append("phi not injective")

    return report


def require_valid(d: GluingData):
    report = validate(d)
    if report:
        logger.warning(f"Gluing data rejected: {report}")
        raise ValidationError(report)


# ------------------------------------------------------------------ label dynamics

@dataclass(frozen=True)
class LabelDynamics:
    lambda_map: Dict[int, int]
    local_degree: Dict[int, int]
    periodic_labels: FrozenSet[int]
    preperiod: int
    period: int

    @property
    def critical_labels(self) -> FrozenSet[int]:
        return frozenset(j for j, deg in self.local_degree.items() if deg >= 2)

    @property
    def k0(self) -> int:
        return len(self.periodic_labels)

    def iterate(self, label: int, times: int) -> int:
        for _ in range(times):
            label = self.lambda_map[label]
        return label


def label_dynamics(d: GluingData) -> LabelDynamics:
    require_valid(d)
    lam = {j: d.phi_edge(j).label for j in range(1, d.k + 1)}
    degree = {j: len(d.phi_edge(j)) for j in range(1, d.k + 1)}

    # after k steps every orbit sits on its cycle
    periodic = set()
    for j in lam:
        p = j
        for _ in range(d.k):
            p = lam[p]
        periodic.add(p)
        q = lam[p]
        while q != p:
            periodic.add(q)
            q = lam[q]

    preperiod = 0
    for j in lam:
        steps, p = 0, j
        while p not in periodic:
            p = lam[p]
            steps += 1
        preperiod = max(preperiod, steps)

    period = 1
    for j in periodic:
        length, q = 1, lam[j]
        while q != j:
            q = lam[q]
            length += 1
        period = period * length // gcd(period, length)

    return LabelDynamics(lam, degree, frozenset(periodic), preperiod, period)


def portrait(d: GluingData) -> nx.MultiDiGraph:
    """Arc j -> Lambda(j); annotated '#Phi(j):1' when the local degree is at least 2"""
    dyn = label_dynamics(d)
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(range(1, d.k + 1))
    for j, target in dyn.lambda_map.items():
        deg = dyn.local_degree[j]
        graph.add_edge(j, target, annotation=f"{deg}:1" if deg >= 2 else None)
    return graph


def portrait_dot(d: GluingData) -> str:
    lines = ["digraph portrait {"]
    for j in range(1, d.k + 1):
        lines.append(f'  {j} [label="{j}"];')
    for j, target, data in sorted(portrait(d).edges(data=True)):
        note = data.get("annotation")
        attr = f' [label="{note}"]' if note else ""
        lines.append(f"  {j} -> {target}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ classification

@dataclass(frozen=True)
class CollisionTable:
    """collide_n(j, l) per round for j < l; rounds[0] is the all-true start"""

    rounds: Tuple[Dict[Tuple[int, int], bool], ...]
    witness_n: Optional[int]

    @property
    def final(self) -> Dict[Tuple[int, int], bool]:
        return self.rounds[-1]

    @property
    def expanding(self) -> bool:
        return not any(self.final.values())

    def collides(self, j: int, l: int, n: Optional[int] = None) -> bool:
        if j == l:
            return True
        table = self.rounds[min(n, len(self.rounds) - 1)] if n is not None else self.final
        return table[(min(j, l), max(j, l))]


def collision_fixed_point(d: GluingData) -> CollisionTable:
    """
    Greatest fixed point of
        collide_{n+1}(j, l) = [I(Phi j) meets I(Phi l)] and collide_n(Lambda j, Lambda l)
    with the diagonal always colliding. Rounds decrease monotonically.
    """
    require_valid(d)
    lam = {j: d.phi_edge(j).label for j in range(1, d.k + 1)}
    members = {j: set(d.phi_edge(j).members) for j in range(1, d.k + 1)}
    pairs = [(j, l) for j in range(1, d.k + 1) for l in range(j + 1, d.k + 1)]

    def lookup(table, a, b):
        return True if a == b else table[(min(a, b), max(a, b))]

    rounds = [{pair: True for pair in pairs}]
    limit = d.k * d.k + 1
    while True:
        prev = rounds[-1]
        nxt = {(j, l): bool(members[j] & members[l]) and lookup(prev, lam[j], lam[l]) for j, l in pairs}
        if nxt == prev:
            break
        rounds.append(nxt)
        if len(rounds) - 1 > limit:
            raise InternalError(f"Collision table did not stabilize within {limit} rounds")

    witness = next((n for n, table in enumerate(rounds) if n >= 1 and not any(table.values())), None)
    return CollisionTable(tuple(rounds), witness)


@dataclass(frozen=True)
class Classification:
    non_degenerate: bool
    stable: bool
    expanding: bool
    expanding_witness_n: Optional[int]

    def tokens(self) -> str:
        words = [
            "non_degenerate" if self.non_degenerate else "degenerate",
            "stable" if self.stable else "unstable",
            "expanding" if self.expanding else "non_expanding",
        ]
        if self.expanding_witness_n is not None:
            words.append(f"witness_n={self.expanding_witness_n}")
        return " ".join(words)


def classify(d: GluingData) -> Classification:
    dyn = label_dynamics(d)
    non_degenerate = not any(dyn.local_degree[j] >= 2 for j in dyn.periodic_labels)
    stable = non_degenerate and all(
        d.connecting[d.phi[j]].is_singleton for j in dyn.periodic_labels
    )
    table = collision_fixed_point(d)
    result = Classification(non_degenerate, stable, table.expanding, table.witness_n)
    logger.debug(f"Classified gluing data: {result.tokens()}")
    return result


def fm_iterate(d: GluingData, search_factor: Optional[int] = None) -> int:
    """
    Least iterate p after which periodic labels are fixed, every label lands
    on a periodic one in a single step and the Phi-edges of distinct labels
    are disjoint.
    """
    cls = classify(d)
    if not (cls.stable and cls.expanding):
        raise NotStableError(f"Iterate search needs stable and expanding data ({cls.tokens()})")
    dyn = label_dynamics(d)
    factor = search_factor if search_factor is not None else config.get("dynamics.fm_search_factor", 2)
    floor = max(1, dyn.preperiod, cls.expanding_witness_n)
    for p in range(floor, factor * d.k + 1):
        if p % dyn.period == 0:
            return p
    raise NotStableError(f"No iterate up to {factor * d.k} satisfies the normal-form conditions")


# ------------------------------------------------------------------ connectors

def canonical_connector(kind: str, size: int) -> Tuple[ConnectingGraph, List[int]]:
    """
    Standard connector for an edge with `size` members, plus the vertex each
    member (in sorted order) is attached to.
    """
    if size < 1:
        raise InvalidArgumentError(f"Connector size must be positive, got {size}")
    if kind == "singleton":
        return ConnectingGraph(MultiGraph(1), 0), [0] * size
    if kind == "pod":
        return ConnectingGraph(MultiGraph.star(size), 0), list(range(1, size + 1))
    if kind == "cycle":
        return ConnectingGraph(MultiGraph.cycle(size), 0), list(range(size))
    if kind == "complete":
        return ConnectingGraph(MultiGraph.complete(size), 0), list(range(size))
    raise InvalidArgumentError(f"Unknown connector kind '{kind}', expected one of {CONNECTOR_KINDS}")


def with_connectors(d: GluingData, kind: str) -> GluingData:
    """Same (H, Phi) with every connector replaced by the canonical one of `kind`"""
    connecting, attach = {}, {}
    for e in d.edges:
        conn, targets = canonical_connector(kind, len(e))
        connecting[e.id] = conn
        attach[e.id] = dict(zip(e.members, targets))
    return GluingData(d.m, d.k, d.edges, connecting, attach, d.phi)


def simplify(d: GluingData) -> GluingData:
    """Every connector collapsed to a single vertex"""
    require_valid(d)
    return with_connectors(d, "singleton")


# ------------------------------------------------------------------ explicit constructions

def separation_distances(d: GluingData, g0: MarkedGraph, n: int,
                         budget: Optional[int] = None) -> List[List[float]]:
    """Graph distances between the marks of G_n built from the simplified data (inf if disconnected)"""
    from src.core.recursion import iterate

    g = iterate(simplify(d), g0, n, budget=budget)
    lengths = dict(nx.all_pairs_shortest_path_length(g.graph.to_networkx()))
    out = []
    for a in g.marks:
        row = []
        for b in g.marks:
            row.append(float(lengths[a].get(b, inf)))
        out.append(row)
    return out


def degree_profile(d: GluingData, g0: MarkedGraph, n_max: int,
                   budget: Optional[int] = None) -> List[int]:
    """Max vertex degree of G_0..G_{n_max} for the simplified data"""
    from src.core.recursion import apply, vertex_count_sequence

    simple = simplify(d)
    limit = budget if budget is not None else config.get("budgets.build_vertices", 1000000)
    counts = vertex_count_sequence(simple, g0.vertex_count, n_max)
    profile, g = [g0.graph.max_degree()], g0
    for n in range(1, n_max + 1):
        if counts[n] > limit:
            logger.numeric_event("degree-profile truncated", f"level {n} has {counts[n]} vertices")
            break
        g = apply(simple, g)
        profile.append(g.graph.max_degree())
    return profile
