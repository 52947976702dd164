"""Generators for the polytope families: figure instances, transportation, partition,
matroid and (n, d)-parallelotopes, plus a few building blocks (cubes, simplices,
products, skews)."""
import logging
import random
from fractions import Fraction
from itertools import product as cartesian
from math import factorial, prod
from typing import List, Literal, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, Field, ValidationError, model_validator

from analysis.ecw import recognize_nd_parallelotope
from config import MAX_MATROID_GROUND_SET, MAX_PARALLELOTOPE_DIMENSION
from polytopes.polyhedron import AffineMap, Polyhedron, facets_from_vertices
from utils.errors import InvalidRankFunction, InvalidSpec, RecognitionSelfCheckFailed, SizeLimitExceeded
from utils.exactla import Vector, dot, primitive_vector, solve_square

logger = logging.getLogger(__name__)


class TransportationSpec(BaseModel):
    supplies: List[int] = Field(min_length=1)
    demands: List[int] = Field(min_length=1)

    @model_validator(mode="after")
    def _balanced(self):
        if any(u <= 0 for u in self.supplies + self.demands):
            raise ValueError("supplies and demands must be positive")
        if sum(self.supplies) != sum(self.demands):
            raise ValueError(f"total supply {sum(self.supplies)} != total demand {sum(self.demands)}")
        return self


class PartitionSpec(BaseModel):
    """k clusters, n items, cluster i holds between lower[i] and upper[i] items."""

    n_items: int = Field(gt=0)
    k: int = Field(gt=0)
    lower: List[int]
    upper: List[int]

    @model_validator(mode="after")
    def _bounds(self):
        if len(self.lower) != self.k or len(self.upper) != self.k:
            raise ValueError(f"need {self.k} lower and upper bounds")
        if any(lo < 0 or lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("bounds must satisfy 0 <= lower <= upper")
        if not sum(self.lower) <= self.n_items <= sum(self.upper):
            raise ValueError(f"{self.n_items} items do not fit bounds {self.lower}..{self.upper}")
        return self

    @property
    def is_fixed_size(self) -> bool:
        return self.lower == self.upper

    def variable(self, cluster: int, item: int) -> int:
        return cluster * self.n_items + item


class MatroidSpec(BaseModel):
    """Rank function given as a table indexed by subset bitmask, or as uniform/graphic."""

    ground_size: int = Field(gt=0)
    kind: Literal["table", "uniform", "graphic"] = "table"
    table: Optional[List[int]] = None
    rank: Optional[int] = None
    edges: Optional[List[Tuple[int, int]]] = None

    @model_validator(mode="after")
    def _shape(self):
        if self.kind == "table" and (self.table is None or len(self.table) != 2 ** self.ground_size):
            raise ValueError(f"rank table needs {2 ** self.ground_size} entries")
        if self.kind == "uniform" and (self.rank is None or self.rank < 0):
            raise ValueError("uniform matroid needs a nonnegative rank")
        if self.kind == "graphic" and (self.edges is None or len(self.edges) != self.ground_size):
            raise ValueError("graphic matroid needs one edge per ground element")
        return self


def build_spec(model, **values):
    """Instantiate a spec model, turning pydantic validation errors into InvalidSpec."""
    try:
        return model(**values)
    except ValidationError as e:
        raise InvalidSpec(str(e)) from e


def partition_spec(n_items: int, k: int, lower: Sequence[int], upper: Sequence[int]) -> PartitionSpec:
    return build_spec(PartitionSpec, n_items=n_items, k=k, lower=list(lower), upper=list(upper))


def fixed_partition_spec(kappa: Sequence[int]) -> PartitionSpec:
    return partition_spec(sum(kappa), len(kappa), kappa, kappa)


def _zero(n: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(0) for _ in range(n))


def _unit(n: int, i: int, value: int = 1) -> Tuple[Fraction, ...]:
    return tuple(Fraction(value if j == i else 0) for j in range(n))


def _indicator(n: int, support, value: int = 1) -> Tuple[Fraction, ...]:
    support = set(support)
    return tuple(Fraction(value if j in support else 0) for j in range(n))


_FIG2 = {
    "a": ([(-1, 1), (0, 1), (1, 1), (1, -1), (-1, -1), (-1, 0)], [1, 2, 4, 4, 0, 0]),
    "b": ([(-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0)], [1, 3, 9, 8, 9, 3, 1, 0]),
    "c": ([(-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0)], [1, 3, 7, 6, 7, 3, 1, 0]),
    "d": ([(1, 0), (-1, 0), (0, 1), (0, -1)], [5, -1, 2, 1]),
}


def fig2(which: str) -> Polyhedron:
    """The four planar polygons, one per hierarchy level (a: GCW ... d: ECW)."""
    if which not in _FIG2:
        raise InvalidSpec(f"fig2 instance must be one of a, b, c, d; got {which!r}")
    B, d = _FIG2[which]
    return Polyhedron.from_rows(2, B=B, d=d, name=f"fig2{which}")


def fig3_polytope() -> Polyhedron:
    """A 0/1 polytope in R^3 whose circuit walks reach (1/2, 1/2, 0)."""
    return facets_from_vertices([(0, 0, 0), (1, 0, 0), (1, 1, 1), (0, 0, 1), (0, 1, 0)], name="fig3")


def segment(length: int = 1) -> Polyhedron:
    return Polyhedron.from_rows(1, B=[(1,), (-1,)], d=[length, 0], name="segment")


def standard_simplex(n: int, scale: int = 1) -> Polyhedron:
    """{x >= 0, sum x <= scale}; nonnegativity rows first."""
    B = [_unit(n, i, -1) for i in range(n)] + [_indicator(n, range(n))]
    d = [0] * n + [scale]
    return Polyhedron.from_rows(n, B=B, d=d, name=f"simplex{n}")


def product(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    """Cartesian product; rows of P first, then rows of Q."""
    n = P.n + Q.n
    A = [row + _zero(Q.n) for row in P.A] + [_zero(P.n) + row for row in Q.A]
    B = [row + _zero(Q.n) for row in P.B] + [_zero(P.n) + row for row in Q.B]
    return Polyhedron(n, tuple(A), P.b + Q.b, tuple(B), P.d + Q.d, name=f"{P.name}x{Q.name}")


def hypercube(n: int) -> Polyhedron:
    cube = segment()
    for _ in range(n - 1):
        cube = product(cube, segment())
    return Polyhedron(cube.n, cube.A, cube.b, cube.B, cube.d, name=f"cube{n}")


def skew(P: Polyhedron, transform: AffineMap) -> Polyhedron:
    """The image of P under an invertible affine map x -> C x + t (C given by columns)."""
    if transform.source_dimension != P.n or len(transform.offset) != P.n:
        raise InvalidSpec(f"Skew must map R^{P.n} to itself")

    def pull_back(rows, rhs):
        out_rows, out_rhs = [], []
        for row, value in zip(rows, rhs):
            # r C = row, so r solves C^T r = row and C^T has the columns of C as rows
            r = solve_square(transform.columns, row)
            shifted = value + dot(r, transform.offset)
            if any(r):
                scaled = primitive_vector(r + (shifted,))
                r, shifted = tuple(Fraction(a) for a in scaled[:-1]), Fraction(scaled[-1])
            out_rows.append(r)
            out_rhs.append(shifted)
        return tuple(out_rows), tuple(out_rhs)

    A, b = pull_back(P.A, P.b)
    B, d = pull_back(P.B, P.d)
    return Polyhedron(P.n, A, b, B, d, name=f"skew({P.name})")


def transportation(spec: TransportationSpec) -> Polyhedron:
    """Variables y_ij row-major (supply i outer); supply rows, demand rows, then y >= 0."""
    m, k = len(spec.supplies), len(spec.demands)
    n = m * k
    A = [_indicator(n, (i * k + j for j in range(k))) for i in range(m)]
    A += [_indicator(n, (i * k + j for i in range(m))) for j in range(k)]
    B = [_unit(n, t, -1) for t in range(n)]
    return Polyhedron.from_rows(
        n, A=A, b=spec.supplies + spec.demands, B=B, d=[0] * n,
        name=f"transportation{tuple(spec.supplies)}x{tuple(spec.demands)}",
    )


def _assignment_rows(spec: PartitionSpec) -> List[Tuple[Fraction, ...]]:
    n = spec.k * spec.n_items
    return [_indicator(n, (spec.variable(i, j) for i in range(spec.k))) for j in range(spec.n_items)]


def _cluster_row(spec: PartitionSpec, i: int, value: int = 1) -> Tuple[Fraction, ...]:
    n = spec.k * spec.n_items
    return _indicator(n, (spec.variable(i, j) for j in range(spec.n_items)), value)


def partition_bounded(spec: PartitionSpec) -> Polyhedron:
    """PP(kappa-, kappa+): items assigned once, each cluster size within its bounds, y >= 0."""
    n = spec.k * spec.n_items
    B, d = [], []
    for i in range(spec.k):
        B += [_cluster_row(spec, i, -1), _cluster_row(spec, i)]
        d += [-spec.lower[i], spec.upper[i]]
    B += [_unit(n, t, -1) for t in range(n)]
    d += [0] * n
    return Polyhedron.from_rows(
        n, A=_assignment_rows(spec), b=[1] * spec.n_items, B=B, d=d,
        name=f"partition{spec.n_items}/{spec.k}[{spec.lower}..{spec.upper}]",
    )


def partition_fixed(spec: PartitionSpec) -> Polyhedron:
    """PP(kappa): cluster sizes and item assignments as equalities, y >= 0."""
    if not spec.is_fixed_size:
        raise InvalidSpec("Fixed-size partition polytope needs lower == upper")
    n = spec.k * spec.n_items
    A = [_cluster_row(spec, i) for i in range(spec.k)] + _assignment_rows(spec)
    b = list(spec.lower) + [1] * spec.n_items
    return Polyhedron.from_rows(
        n, A=A, b=b, B=[_unit(n, t, -1) for t in range(n)], d=[0] * n,
        name=f"partition{spec.n_items}/{spec.k}[{spec.lower}]",
    )


def enumerate_clusterings(spec: PartitionSpec) -> List[Tuple[int, ...]]:
    """Every feasible item -> cluster assignment, lexicographically."""
    found = []
    for assignment in cartesian(range(spec.k), repeat=spec.n_items):
        sizes = [assignment.count(i) for i in range(spec.k)]
        if all(lo <= s <= hi for lo, s, hi in zip(spec.lower, sizes, spec.upper)):
            found.append(assignment)
    return found


def fixed_size_vertex_count(spec: PartitionSpec) -> int:
    """Multinomial n! / prod kappa_i! for a fixed-size spec."""
    return factorial(spec.n_items) // prod(factorial(s) for s in spec.lower)


def support_graph(spec: TransportationSpec, y: Sequence[Fraction]) -> nx.Graph:
    """Bipartite graph of supplies ("s", i) and demands ("t", j) joined where y_ij != 0."""
    m, k = len(spec.supplies), len(spec.demands)
    G = nx.Graph()
    G.add_nodes_from(("s", i) for i in range(m))
    G.add_nodes_from(("t", j) for j in range(k))
    G.add_edges_from((("s", i), ("t", j)) for i in range(m) for j in range(k) if y[i * k + j] != 0)
    return G


def is_acyclic_support(spec: TransportationSpec, y: Sequence[Fraction]) -> bool:
    return nx.is_forest(support_graph(spec, y))


def supports_share_one_cycle(spec: TransportationSpec, y1: Sequence[Fraction], y2: Sequence[Fraction]) -> bool:
    """Transportation adjacency: the union of both support graphs holds exactly one cycle."""
    G = nx.compose(support_graph(spec, y1), support_graph(spec, y2))
    cycles = G.number_of_edges() - G.number_of_nodes() + nx.number_connected_components(G)
    return cycles == 1


def matroid_rank_table(spec: MatroidSpec) -> List[int]:
    """f(S) for every subset bitmask S, checked against the rank axioms."""
    size = spec.ground_size
    if size > MAX_MATROID_GROUND_SET:
        raise SizeLimitExceeded(f"Ground set of {size} exceeds {MAX_MATROID_GROUND_SET}")
    masks = range(2 ** size)
    if spec.kind == "uniform":
        table = [min(bin(S).count("1"), spec.rank) for S in masks]
    elif spec.kind == "graphic":
        table = []
        for S in masks:
            G = nx.MultiGraph()
            G.add_edges_from(e for t, e in enumerate(spec.edges) if S >> t & 1)
            table.append(G.number_of_nodes() - nx.number_connected_components(G))
    else:
        table = list(spec.table)

    if table[0] != 0:
        raise InvalidRankFunction("f(empty set) must be 0")
    for S in masks:
        if not 0 <= table[S] <= bin(S).count("1"):
            raise InvalidRankFunction(f"f({S:0{size}b}) = {table[S]} outside 0..|S|")
        for e in range(size):
            if not S >> e & 1 and table[S | 1 << e] < table[S]:
                raise InvalidRankFunction(f"f is not monotone at {S:0{size}b} + {e}")
        for T in masks:
            if table[S] + table[T] < table[S | T] + table[S & T]:
                raise InvalidRankFunction(f"f is not submodular at {S:0{size}b}, {T:0{size}b}")
    return table


def matroid_polytope(spec: MatroidSpec) -> Polyhedron:
    """x >= 0 rows, then sum_{e in S} x_e <= f(S) for every nonempty S in bitmask order.

    The representation is deliberately kept unminimized.
    """
    table = matroid_rank_table(spec)
    n = spec.ground_size
    B = [_unit(n, e, -1) for e in range(n)]
    d = [0] * n
    for S in range(1, 2 ** n):
        B.append(_indicator(n, (e for e in range(n) if S >> e & 1)))
        d.append(table[S])
    return Polyhedron.from_rows(n, B=B, d=d, name=f"matroid-{spec.kind}{n}")


def uniform_matroid(ground_size: int, rank: int) -> MatroidSpec:
    return build_spec(MatroidSpec, ground_size=ground_size, kind="uniform", rank=rank)


def graphic_matroid(edges: Sequence[Tuple[int, int]]) -> MatroidSpec:
    return build_spec(MatroidSpec, ground_size=len(edges), kind="graphic", edges=[tuple(e) for e in edges])


def nd_parallelotope(n: int, d: int, transform: Optional[AffineMap] = None) -> Polyhedron:
    """A standard (n-d+1)-simplex times d-1 unit segments, optionally skewed.

    The result is run through the recognizer before it is returned.
    """
    if not 1 <= d <= n <= MAX_PARALLELOTOPE_DIMENSION:
        raise InvalidSpec(f"(n, d) = ({n}, {d}) needs 1 <= d <= n <= {MAX_PARALLELOTOPE_DIMENSION}")
    P = standard_simplex(n - d + 1)
    for _ in range(d - 1):
        P = product(P, segment())
    if transform is not None:
        P = skew(P, transform)
    P = Polyhedron(P.n, P.A, P.b, P.B, P.d, name=f"ndp({n},{d})")
    result = recognize_nd_parallelotope(P)
    if not result.is_ndp or result.d != d:
        raise RecognitionSelfCheckFailed(f"Constructed ({n},{d})-parallelotope was recognized as {result}")
    return P


def shear(n: int, source: int, target: int, offset: Optional[Sequence[int]] = None) -> AffineMap:
    """Unimodular map adding coordinate ``source`` into ``target``, then translating."""
    columns = [list(_unit(n, j)) for j in range(n)]
    if source != target:
        columns[source][target] = Fraction(1)
    t = tuple(Fraction(a) for a in (offset or [0] * n))
    return AffineMap(t, tuple(tuple(c) for c in columns))


RANDOM_KINDS = ("simplices", "cut-box", "frustum")


def frustum(k: int, scale: int, height: int) -> Polyhedron:
    """The scaled k-simplex with its last coordinate capped at ``height`` (a trapezoid for k = 2)."""
    if k < 2 or not 1 <= height < scale:
        raise InvalidSpec(f"Frustum needs k >= 2 and 1 <= height < scale, got ({k}, {scale}, {height})")
    P = standard_simplex(k, scale)
    P = Polyhedron(P.n, P.A, P.b, P.B + (_unit(k, k - 1),), P.d + (Fraction(height),))
    return Polyhedron(P.n, P.A, P.b, P.B, P.d, name=f"frustum{k}")


def random_simple_polytope(rng: random.Random, kind: Optional[str] = None) -> Polyhedron:
    """A small integral simple polytope.

    ``simplices`` is a product of scaled simplices (always ECW). ``cut-box`` is a box with
    its origin corner cut off by sum x >= 1 and ``frustum`` is a simplex with one facet
    offset pulled in, times segments; neither is ECW. The result is moved by a random
    unimodular shear and integer translation.
    """
    kind = kind or rng.choice(RANDOM_KINDS)
    if kind not in RANDOM_KINDS:
        raise InvalidSpec(f"Unknown random polytope kind {kind!r}; expected one of {list(RANDOM_KINDS)}")
    n = rng.randint(2, 4)
    if kind == "simplices":
        parts = []
        left = n
        while left:
            size = rng.randint(1, left)
            parts.append(size)
            left -= size
        P = standard_simplex(parts[0], rng.randint(1, 3))
        for size in parts[1:]:
            P = product(P, standard_simplex(size, rng.randint(1, 3)))
        label = f"simplices{parts}"
    elif kind == "cut-box":
        sides = [rng.randint(2, 3) for _ in range(n)]
        P = segment(sides[0])
        for side in sides[1:]:
            P = product(P, segment(side))
        P = Polyhedron(P.n, P.A, P.b, P.B + (_indicator(n, range(n), -1),), P.d + (Fraction(-1),))
        label = f"cut-box{sides}"
    else:
        k = rng.randint(2, n)
        scale = rng.randint(2, 4)
        height = rng.randint(1, scale - 1)
        P = frustum(k, scale, height)
        for _ in range(n - k):
            P = product(P, segment(rng.randint(1, 2)))
        label = f"frustum{k}[{scale},{height}]x{n - k}"
    source, target = rng.randrange(n), rng.randrange(n)
    offset = [rng.randint(-2, 2) for _ in range(n)]
    P = skew(P, shear(n, source, target, offset))
    name = f"random-{label}"
    logger.debug("Generated %s in R^%d", name, n)
    return Polyhedron(P.n, P.A, P.b, P.B, P.d, name=name)
