"""Circuit walks, the reachable step graph and the GCW/ICW/VCW/ECW hierarchy."""
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx

from config import BUDGET_POINTS
from polytopes.circuits import Circuit, circuits_rank_method, maximal_step, normalize_circuit, steps_from
from polytopes.polyhedron import (
    Polyhedron,
    Vertex,
    are_adjacent,
    edge_graph,
    enumerate_vertices,
    is_pointed,
    point_in,
    recession_rays,
)
from utils.errors import (
    BudgetExceeded,
    GCWUnsupported,
    InfeasibleDirection,
    NotIntegralPolytope,
    PointNotInPolyhedron,
    PolywalkError,
    Unbounded,
)
from utils.exactla import Vector, is_integral, primitive_vector, sub

logger = logging.getLogger(__name__)


class Level(Enum):
    UNKNOWN = "UNKNOWN"
    GCW = "GCW"
    ICW = "ICW"
    VCW = "VCW"
    ECW = "ECW"

    @property
    def rank(self) -> int:
        return ["UNKNOWN", "GCW", "ICW", "VCW", "ECW"].index(self.value)

    def at_least(self, other: "Level") -> bool:
        """ECW > VCW > ICW > GCW; UNKNOWN is at least nothing."""
        if self is Level.UNKNOWN:
            return False
        return self.rank >= other.rank


@dataclass(frozen=True)
class Step:
    circuit: Circuit
    orientation: int
    alpha: Fraction

    @property
    def direction(self) -> Vector:
        return self.circuit.direction(self.orientation)


@dataclass(frozen=True)
class CircuitWalk:
    points: Tuple[Vector, ...]
    steps: Tuple[Step, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def start(self) -> Vector:
        return self.points[0]

    @property
    def end(self) -> Vector:
        return self.points[-1]


@dataclass(frozen=True)
class VertexCertificate:
    """Every maximal step out of ``vertex`` and where it lands."""

    vertex: Vector
    landings: Tuple[Tuple[Tuple[int, ...], Vector], ...]


@dataclass(frozen=True)
class HierarchyLevel:
    level: Level
    witness_point: Optional[Vector] = None
    witness_walk: Optional[CircuitWalk] = None
    certificates: Tuple[VertexCertificate, ...] = ()
    max_points: Optional[int] = None


@dataclass(frozen=True)
class AdjacencyGreedy:
    """Directive rule: follow a shortest edge path to the vertex with index ``target``."""

    target: int


@dataclass
class StepGraph:
    """All points reachable by maximal circuit steps, keyed by their exact coordinates.

    Arcs carry ``circuit``, ``orientation`` and ``alpha``; nodes carry ``vertex`` and a
    ``parent`` arc used to rebuild a walk from some vertex.
    """

    graph: nx.DiGraph
    complete: bool
    witness: Optional[Vector] = None

    @property
    def points(self) -> List[Vector]:
        return list(self.graph.nodes)

    def arcs(self):
        for x, y, data in self.graph.edges(data=True):
            yield x, data["circuit"], data["orientation"], y, data["alpha"]

    def prefix(self, point: Vector) -> CircuitWalk:
        """The BFS-tree walk from a vertex to ``point``."""
        points = [point]
        steps = []
        while self.graph.nodes[points[-1]]["parent"] is not None:
            parent = self.graph.nodes[points[-1]]["parent"]
            data = self.graph.edges[parent, points[-1]]
            steps.append(Step(data["circuit"], data["orientation"], data["alpha"]))
            points.append(parent)
        return CircuitWalk(tuple(reversed(points)), tuple(reversed(steps)))


def _require_bounded(P: Polyhedron) -> Tuple[Vertex, ...]:
    if not is_pointed(P) or recession_rays(P):
        raise Unbounded(f"{P.name or 'Polyhedron'} is unbounded")
    return enumerate_vertices(P)


def _directive_circuit(P: Polyhedron, directive) -> Tuple[Circuit, int]:
    if isinstance(directive, Circuit):
        vector, orientation = directive.g, directive.sign
    else:
        vector, orientation = directive
    record = normalize_circuit(vector, P)
    return Circuit(record.g, record.image), orientation * record.sign


def walk(
    P: Polyhedron,
    start: Union[Vertex, Sequence[Fraction]],
    directives: Union[Sequence, AdjacencyGreedy],
) -> CircuitWalk:
    """Take maximal steps from ``start``, one per directive.

    A directive is a ``Circuit`` (oriented by its ``sign``), a pair (circuit or vector,
    orientation), or the whole list may be an ``AdjacencyGreedy`` rule.
    """
    x = start.point if isinstance(start, Vertex) else tuple(Fraction(a) for a in start)
    vertices = enumerate_vertices(P)
    points = {v.point for v in vertices}
    if not point_in(P, x):
        raise PointNotInPolyhedron(f"{x} is not in {P.name or 'the polyhedron'}")
    if x not in points:
        raise PointNotInPolyhedron(f"Walks start at a vertex; {x} is not one")
    circuits = circuits_rank_method(P)

    if isinstance(directives, AdjacencyGreedy):
        if not 0 <= directives.target < len(vertices):
            raise PointNotInPolyhedron(
                f"Greedy target {directives.target} is not a vertex index (0..{len(vertices) - 1})"
            )
        G = edge_graph(P)
        index = {v.point: i for i, v in enumerate(vertices)}
        path = nx.shortest_path(G, index[x], directives.target)
        directives = [
            (primitive_vector(sub(vertices[j].point, vertices[i].point)), 1)
            for i, j in zip(path, path[1:])
        ]

    trace = [x]
    steps = []
    for i, directive in enumerate(directives):
        circuit, orientation = _directive_circuit(P, directive)
        if circuit not in circuits:
            raise InfeasibleDirection(i, f"Directive {i}: {circuit.direction(orientation)} is not a circuit")
        try:
            y, alpha = maximal_step(P, trace[-1], circuit, orientation)
        except InfeasibleDirection as e:
            raise InfeasibleDirection(i, f"Directive {i}: {e}") from e
        trace.append(y)
        steps.append(Step(circuit, orientation, alpha))
    return CircuitWalk(tuple(trace), tuple(steps))


def replay_walk(P: Polyhedron, trace: CircuitWalk) -> bool:
    """Recompute every maximal step and compare points and step lengths exactly."""
    if len(trace.points) != len(trace.steps) + 1:
        return False
    for x, y, step in zip(trace.points, trace.points[1:], trace.steps):
        try:
            z, alpha = maximal_step(P, x, step.circuit, step.orientation)
        except PolywalkError:
            return False
        if z != y or alpha != step.alpha:
            return False
    return True


def reachable_step_graph(
    P: Polyhedron, stop_on_noninteger: bool = False, max_points: int = BUDGET_POINTS
) -> StepGraph:
    """Breadth-first closure of the vertex set under feasible maximal circuit steps."""
    vertices = _require_bounded(P)
    if len(vertices) > max_points:
        raise BudgetExceeded(max_points, partial=StepGraph(nx.DiGraph(), complete=False))
    circuits = circuits_rank_method(P)
    G = nx.DiGraph()
    queue = deque()
    for v in vertices:
        G.add_node(v.point, vertex=True, parent=None)
        queue.append(v.point)
    vertex_points = {v.point for v in vertices}

    while queue:
        x = queue.popleft()
        for circuit, orientation, y, alpha in steps_from(P, x, circuits):
            is_new = y not in G
            if is_new:
                G.add_node(y, vertex=y in vertex_points, parent=x)
            if not G.has_edge(x, y):
                G.add_edge(x, y, circuit=circuit, orientation=orientation, alpha=alpha)
            if not is_new:
                continue
            if stop_on_noninteger and not is_integral(y):
                logger.debug("Non-integral point %s after %d points", y, G.number_of_nodes())
                return StepGraph(G, complete=False, witness=y)
            if G.number_of_nodes() > max_points:
                raise BudgetExceeded(max_points, partial=StepGraph(G, complete=False))
            queue.append(y)
    logger.debug("Step graph of %s closed with %d points", P.name or "polyhedron", G.number_of_nodes())
    return StepGraph(G, complete=True)


def _one_step_scan(P: Polyhedron):
    """Classify every maximal step that leaves a vertex.

    Returns (certificates, first non-vertex landing, first vertex-but-not-edge landing),
    each landing as (vertex, circuit, orientation, y, alpha).
    """
    vertices = enumerate_vertices(P)
    by_point = {v.point: v for v in vertices}
    circuits = circuits_rank_method(P)
    certificates = []
    off_vertex = None
    off_edge = None
    for v in vertices:
        landings = []
        for circuit, orientation, y, alpha in steps_from(P, v.point, circuits):
            landings.append((circuit.direction(orientation), y))
            target = by_point.get(y)
            if target is None:
                off_vertex = off_vertex or (v, circuit, orientation, y, alpha)
            elif not are_adjacent(P, v, target):
                off_edge = off_edge or (v, circuit, orientation, y, alpha)
        certificates.append(VertexCertificate(v.point, tuple((tuple(int(a) for a in g), y) for g, y in landings)))
    return tuple(certificates), off_vertex, off_edge


def _single_step_walk(landing) -> CircuitWalk:
    v, circuit, orientation, y, alpha = landing
    return CircuitWalk((v.point, y), (Step(circuit, orientation, alpha),))


def is_edge_walk_polytope(P: Polyhedron) -> bool:
    """Whether every maximal step from every vertex runs along an edge (the ECW test alone)."""
    _require_bounded(P)
    _, off_vertex, off_edge = _one_step_scan(P)
    return off_vertex is None and off_edge is None


def classify_hierarchy(P: Polyhedron, budget: int = BUDGET_POINTS) -> HierarchyLevel:
    """Place a bounded integral polytope in the circuit-walk hierarchy.

    ECW and VCW are decided from the steps that leave vertices; ICW against GCW needs
    the reachable closure, which may stop at the budget with ``Level.UNKNOWN``.
    """
    vertices = _require_bounded(P)
    fractional = [v.point for v in vertices if not is_integral(v.point)]
    if fractional:
        raise NotIntegralPolytope(f"Vertex {fractional[0]} is not integral")

    certificates, off_vertex, off_edge = _one_step_scan(P)
    if off_vertex is None and off_edge is None:
        return HierarchyLevel(Level.ECW, certificates=certificates)
    if off_vertex is None:
        walk_ = _single_step_walk(off_edge)
        return HierarchyLevel(Level.VCW, witness_point=walk_.end, witness_walk=walk_)

    try:
        closure = reachable_step_graph(P, stop_on_noninteger=True, max_points=budget)
    except BudgetExceeded as e:
        logger.info("Closure of %s exceeded %d points", P.name or "polyhedron", budget)
        return HierarchyLevel(Level.UNKNOWN, max_points=e.max_points)
    if closure.witness is not None:
        return HierarchyLevel(Level.GCW, witness_point=closure.witness, witness_walk=closure.prefix(closure.witness))
    walk_ = _single_step_walk(off_vertex)
    return HierarchyLevel(Level.ICW, witness_point=walk_.end, witness_walk=walk_)


def replay_witness(P: Polyhedron, result: HierarchyLevel) -> bool:
    """Re-derive a classification witness from scratch."""
    if result.level is Level.ECW:
        by_point = {v.point: v for v in enumerate_vertices(P)}
        for cert in result.certificates:
            for g, y in cert.landings:
                record = normalize_circuit(g, P)
                try:
                    z, _ = maximal_step(P, cert.vertex, Circuit(record.g, record.image), record.sign)
                except PolywalkError:
                    return False
                if z != y or y not in by_point or not are_adjacent(P, by_point[cert.vertex], by_point[y]):
                    return False
        return True
    if result.witness_walk is None:
        return False
    if not replay_walk(P, result.witness_walk) or result.witness_walk.end != result.witness_point:
        return False
    vertex_points = {v.point for v in enumerate_vertices(P)}
    end = result.witness_point
    if result.level is Level.GCW:
        return not is_integral(end)
    if result.level is Level.ICW:
        return is_integral(end) and end not in vertex_points
    if result.level is Level.VCW:
        by_point = {v.point: v for v in enumerate_vertices(P)}
        return end in by_point and not are_adjacent(P, by_point[result.witness_walk.start], by_point[end])
    return False


@dataclass(frozen=True)
class ReversalFailure:
    source: Vector
    circuit: Circuit
    orientation: int
    target: Vector
    alpha: Fraction


def all_steps_reversible(P: Polyhedron, budget: int = BUDGET_POINTS) -> Tuple[bool, Optional[ReversalFailure]]:
    """Check every arc of the step graph: stepping back from y along -g must land on x with the same alpha.

    Arcs are checked while the closure grows, so a failing arc ends the search early.
    """
    vertices = _require_bounded(P)
    circuits = circuits_rank_method(P)
    seen = {v.point for v in vertices}
    queue = deque(sorted(seen))
    while queue:
        x = queue.popleft()
        for circuit, orientation, y, alpha in steps_from(P, x, circuits):
            try:
                back, beta = maximal_step(P, y, circuit, -orientation)
            except PolywalkError:
                back, beta = None, None
            if back != x or beta != alpha:
                return False, ReversalFailure(x, circuit, orientation, y, alpha)
            if y not in seen:
                seen.add(y)
                if len(seen) > budget:
                    raise BudgetExceeded(budget)
                queue.append(y)
    return True, None


@dataclass(frozen=True)
class DistanceReport:
    kind: str
    vertices: Tuple[Vector, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    diameter: int


def distances_and_diameters(P: Polyhedron, kind: str = "combinatorial", budget: int = BUDGET_POINTS) -> DistanceReport:
    """All-pairs vertex distances in the edge graph or in the step graph, plus the diameter."""
    vertices = _require_bounded(P)
    points = tuple(v.point for v in vertices)
    if kind == "combinatorial":
        lengths = dict(nx.all_pairs_shortest_path_length(edge_graph(P)))
        matrix = tuple(tuple(lengths[i][j] for j in range(len(points))) for i in range(len(points)))
    elif kind == "circuit":
        level = classify_hierarchy(P, budget)
        if level.level is Level.GCW:
            raise GCWUnsupported(f"{P.name or 'Polyhedron'} is GCW; circuit distances are not finite-state")
        if level.level is Level.UNKNOWN:
            raise BudgetExceeded(budget)
        closure = reachable_step_graph(P, max_points=budget)
        rows = []
        for p in points:
            lengths = nx.single_source_shortest_path_length(closure.graph, p)
            rows.append(tuple(lengths[q] for q in points))
        matrix = tuple(rows)
    else:
        raise ValueError(f"Unknown distance kind {kind!r}")
    diameter = max((max(row) for row in matrix), default=0)
    return DistanceReport(kind, points, matrix, diameter)
