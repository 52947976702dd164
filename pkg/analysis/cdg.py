"""Clustering difference graphs and the edge/circuit tests for partition polytopes."""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from polytopes.families import PartitionSpec
from utils.errors import DegenerateInput, InfeasibleClustering

logger = logging.getLogger(__name__)


class Status(Enum):
    FREE = "free"
    SATURATED = "saturated"
    DEPLETED = "depleted"
    FIXED = "fixed"


@dataclass(frozen=True)
class Clustering:
    """``assignment[j]`` is the cluster of item j; clusters are 0..k-1."""

    assignment: Tuple[int, ...]
    k: int

    @classmethod
    def from_vector(cls, spec: PartitionSpec, y: Sequence[Fraction]) -> "Clustering":
        if len(y) != spec.k * spec.n_items:
            raise InfeasibleClustering(f"Vector has length {len(y)}, expected {spec.k * spec.n_items}")
        assignment = []
        for j in range(spec.n_items):
            column = [y[spec.variable(i, j)] for i in range(spec.k)]
            if sorted(column) != [0] * (spec.k - 1) + [1]:
                raise InfeasibleClustering(f"Item {j} is not assigned to exactly one cluster")
            assignment.append(column.index(1))
        return cls(tuple(assignment), spec.k)

    def vector(self) -> Tuple[Fraction, ...]:
        n = len(self.assignment)
        y = [Fraction(0)] * (self.k * n)
        for j, i in enumerate(self.assignment):
            y[i * n + j] = Fraction(1)
        return tuple(y)

    def sizes(self) -> Tuple[int, ...]:
        return tuple(self.assignment.count(i) for i in range(self.k))


def check_clustering(spec: PartitionSpec, y: Clustering) -> None:
    if y.k != spec.k or len(y.assignment) != spec.n_items:
        raise InfeasibleClustering(f"Clustering shape ({y.k}, {len(y.assignment)}) does not match the partition spec")
    if any(not 0 <= i < spec.k for i in y.assignment):
        raise InfeasibleClustering("Cluster index out of range")
    for i, (lo, s, hi) in enumerate(zip(spec.lower, y.sizes(), spec.upper)):
        if not lo <= s <= hi:
            raise InfeasibleClustering(f"Cluster {i} has {s} items, bounds are {lo}..{hi}")


def status_of(lower: int, size: int, upper: int) -> Status:
    if lower < size < upper:
        return Status.FREE
    if lower < size == upper:
        return Status.SATURATED
    if lower == size < upper:
        return Status.DEPLETED
    return Status.FIXED


@dataclass
class ClusteringDifferenceGraph:
    """Digraph on clusters; an arc (i, l) keyed by item j moves j from cluster i to cluster l.

    Node attribute ``status`` is evaluated at the source clustering.
    """

    graph: nx.MultiDiGraph

    @property
    def edges(self) -> List[Tuple[int, int, int]]:
        return sorted((i, l, j) for i, l, j in self.graph.edges(keys=True))

    @property
    def statuses(self) -> Tuple[Status, ...]:
        return tuple(self.graph.nodes[i]["status"] for i in sorted(self.graph.nodes))

    def active(self) -> nx.MultiDiGraph:
        """The subgraph on clusters that send or receive an item."""
        return self.graph.subgraph([i for i in self.graph.nodes if self.graph.degree(i) > 0])


def build_cdg(spec: PartitionSpec, y1: Clustering, y2: Clustering) -> ClusteringDifferenceGraph:
    check_clustering(spec, y1)
    check_clustering(spec, y2)
    G = nx.MultiDiGraph()
    for i, (lo, s, hi) in enumerate(zip(spec.lower, y1.sizes(), spec.upper)):
        G.add_node(i, status=status_of(lo, s, hi))
    for j, (a, b) in enumerate(zip(y1.assignment, y2.assignment)):
        if a != b:
            G.add_edge(a, b, key=j)
    return ClusteringDifferenceGraph(G)


def _shape(G: nx.MultiDiGraph) -> str:
    """'path', 'cycle' or 'other' for the active part of a transfer digraph."""
    nodes = [i for i in G.nodes if G.degree(i) > 0]
    if not nodes:
        return "other"
    H = G.subgraph(nodes)
    if not nx.is_weakly_connected(H):
        return "other"
    ins = [H.in_degree(i) for i in nodes]
    outs = [H.out_degree(i) for i in nodes]
    edges = H.number_of_edges()
    if all(a == 1 for a in ins) and all(b == 1 for b in outs) and edges == len(nodes):
        return "cycle"
    if max(ins) <= 1 and max(outs) <= 1 and edges == len(nodes) - 1:
        return "path"
    return "other"


def _require_distinct(y1: Clustering, y2: Clustering) -> None:
    if y1 == y2:
        raise DegenerateInput("The two clusterings coincide")


def pp_bounded_edge_test(spec: PartitionSpec, y1: Clustering, y2: Clustering) -> bool:
    """Adjacency in PP(kappa-, kappa+) read off the CDG.

    A single arc counts as a path without interior nodes.
    """
    _require_distinct(y1, y2)
    cdg = build_cdg(spec, y1, y2)
    G = cdg.active()
    shape = _shape(G)
    free = [i for i in G.nodes if G.nodes[i]["status"] is Status.FREE]
    if shape == "path":
        interior = [i for i in G.nodes if G.in_degree(i) == 1 and G.out_degree(i) == 1]
        return not any(i in free for i in interior)
    if shape == "cycle":
        return len(free) <= 1
    return False


def pp_fixed_edge_test(spec: PartitionSpec, y1: Clustering, y2: Clustering) -> bool:
    """Adjacency in PP(kappa): the CDG is one directed cycle."""
    if not spec.is_fixed_size:
        raise InfeasibleClustering("Fixed-size edge test needs lower == upper")
    _require_distinct(y1, y2)
    return _shape(build_cdg(spec, y1, y2).active()) == "cycle"


def transfer_graph(spec: PartitionSpec, g: Sequence[int]) -> Optional[nx.MultiDiGraph]:
    """Arcs (i, l, item j) for g_ij = -1, g_lj = +1; None when g is not a set of single transfers."""
    G = nx.MultiDiGraph()
    G.add_nodes_from(range(spec.k))
    for j in range(spec.n_items):
        column = [g[spec.variable(i, j)] for i in range(spec.k)]
        if all(a == 0 for a in column):
            continue
        if sorted(column) != [-1] + [0] * (spec.k - 2) + [1]:
            return None
        G.add_edge(column.index(-1), column.index(1), key=j)
    return G


def pp_bounded_circuit_test(spec: PartitionSpec, g: Sequence[int]) -> bool:
    """A single sequential movement or a single cyclical exchange of items."""
    if len(g) != spec.k * spec.n_items or not any(g):
        return False
    if any(a not in (-1, 0, 1) for a in g):
        return False
    G = transfer_graph(spec, g)
    if G is None:
        return False
    return _shape(G) in ("path", "cycle")


def transfer_vectors(spec: PartitionSpec, kinds: Iterable[str] = ("path", "cycle")) -> List[Tuple[int, ...]]:
    """Every single-path or single-cycle transfer vector, sign-canonical and sorted.

    A transfer moves distinct items along a sequence of distinct clusters.
    """
    kinds = set(kinds)
    found: Set[Tuple[int, ...]] = set()
    n = spec.k * spec.n_items

    def emit(arcs):
        g = [0] * n
        for a, b, j in arcs:
            g[spec.variable(a, j)] -= 1
            g[spec.variable(b, j)] += 1
        first = next(x for x in g if x != 0)
        found.add(tuple(g) if first > 0 else tuple(-x for x in g))

    for length in range(2, spec.k + 1):
        for clusters in permutations(range(spec.k), length):
            if "path" in kinds:
                for items in permutations(range(spec.n_items), length - 1):
                    emit([(clusters[t], clusters[t + 1], items[t]) for t in range(length - 1)])
            # each cycle is listed once, starting from its smallest cluster
            if "cycle" in kinds and clusters[0] == min(clusters):
                for items in permutations(range(spec.n_items), length):
                    emit([(clusters[t], clusters[(t + 1) % length], items[t]) for t in range(length)])
    return sorted(found)
