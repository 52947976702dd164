"""H-representation polyhedra {x : Ax = b, Bx <= d} over the rationals.

Everything here works on exact ``Fraction`` data. Vertex enumeration, adjacency and
faces are computed in the affine hull of the equality system, so equality rows never
blow up the subset counts.
"""
import logging
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

import config
from config import BASIS_ENUMERATION_CUTOFF, CACHE_SIZE, MAX_HULL_DIMENSION, MAX_HULL_POINTS
from polytopes.double_description import extreme_rays, polytope_vertices
from utils.errors import (
    DegenerateInput,
    DimensionTooHigh,
    DuplicateRows,
    EmptyPolyhedron,
    NotFullDimensional,
    NotMinimal,
    NotPointed,
    PointNotInPolyhedron,
    ShapeError,
    SizeLimitExceeded,
    Unbounded,
)
from utils.exactla import (
    Matrix,
    Vector,
    affine_dimension,
    as_matrix,
    as_vector,
    dot,
    independent_subsets,
    kernel_basis,
    mat_vec,
    primitive_vector,
    rank,
    solve_affine,
    sub,
    _solve_square,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Polyhedron:
    n: int
    A: Matrix = ()
    b: Vector = ()
    B: Matrix = ()
    d: Vector = ()
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ShapeError(f"Negative dimension {self.n}")
        for label, M in (("A", self.A), ("B", self.B)):
            for row in M:
                if len(row) != self.n:
                    raise ShapeError(f"Row of {label} has length {len(row)}, expected {self.n}")
        if len(self.b) != len(self.A):
            raise ShapeError(f"|b| = {len(self.b)} but A has {len(self.A)} rows")
        if len(self.d) != len(self.B):
            raise ShapeError(f"|d| = {len(self.d)} but B has {len(self.B)} rows")

    @classmethod
    def from_rows(cls, n: int, A=(), b=(), B=(), d=(), name: Optional[str] = None) -> "Polyhedron":
        """Build from any nested sequences of ints, Fractions or "p/q" strings."""
        return cls(
            n=n,
            A=as_matrix(A),
            b=as_vector(b),
            B=as_matrix(B),
            d=as_vector(d),
            name=name,
        )

    @property
    def m(self) -> int:
        return len(self.B)

    @property
    def constraint_matrix(self) -> Matrix:
        """The stacked matrix (A; B)."""
        return self.A + self.B


@dataclass(frozen=True)
class Vertex:
    point: Vector
    tight_rows: FrozenSet[int]


@dataclass(frozen=True)
class Face:
    tight_rows: FrozenSet[int]
    dim: int


@dataclass(frozen=True)
class Cone:
    generators: Tuple[Tuple[int, ...], ...]

    def negated(self) -> "Cone":
        return Cone(tuple(sorted(tuple(-a for a in g) for g in self.generators)))


@dataclass(frozen=True)
class AffineMap:
    """z -> offset + sum_j z_j * columns[j]."""

    offset: Vector
    columns: Tuple[Vector, ...]

    @property
    def source_dimension(self) -> int:
        return len(self.columns)

    def apply(self, z: Sequence[Fraction]) -> Vector:
        x = list(self.offset)
        for zj, col in zip(z, self.columns):
            if zj != 0:
                x = [a + zj * c for a, c in zip(x, col)]
        return tuple(x)

    def linear(self, w: Sequence[Fraction]) -> Vector:
        """The linear part only, for directions."""
        x = [Fraction(0)] * len(self.offset)
        for wj, col in zip(w, self.columns):
            if wj != 0:
                x = [a + wj * c for a, c in zip(x, col)]
        return tuple(x)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    equality_rows: int
    inequality_rows: int
    empty: bool
    bounded: bool
    pointed: bool


def point_in(P: Polyhedron, x: Sequence[Fraction]) -> bool:
    if len(x) != P.n:
        raise ShapeError(f"Point has length {len(x)}, expected {P.n}")
    return all(dot(row, x) == rhs for row, rhs in zip(P.A, P.b)) and all(
        dot(row, x) <= rhs for row, rhs in zip(P.B, P.d)
    )


def tight_rows(P: Polyhedron, x: Sequence[Fraction]) -> FrozenSet[int]:
    return frozenset(i for i, (row, rhs) in enumerate(zip(P.B, P.d)) if dot(row, x) == rhs)


def is_pointed(P: Polyhedron) -> bool:
    return rank(P.constraint_matrix) == P.n


def duplicate_rows(P: Polyhedron) -> List[int]:
    """Indices of inequality rows that repeat an earlier row up to positive scaling."""
    seen: Dict[Tuple[int, ...], int] = {}
    dupes = []
    for i, (row, rhs) in enumerate(zip(P.B, P.d)):
        if all(a == 0 for a in row):
            continue
        key = primitive_vector(tuple(row) + (rhs,))
        if key in seen:
            dupes.append(i)
        else:
            seen[key] = i
    return dupes


def _check_duplicates(P: Polyhedron) -> None:
    dupes = duplicate_rows(P)
    if dupes:
        raise DuplicateRows(dupes)


@lru_cache(maxsize=CACHE_SIZE)
def reduce_to_full_dimension(P: Polyhedron) -> Tuple[Polyhedron, AffineMap]:
    """Eliminate the equality rows: P' lives in R^(n - rank A) and has no equalities.

    Inequality row i of P' is row i of P pulled back through the map, so tight-row
    indices agree between P and P'. Implicit equalities hidden in B are kept as rows.
    """
    if not P.A:
        identity = tuple(tuple(Fraction(int(i == j)) for i in range(P.n)) for j in range(P.n))
        return P, AffineMap(tuple(Fraction(0) for _ in range(P.n)), identity)
    x0 = solve_affine(P.A, P.b, P.n)
    if x0 is None:
        raise EmptyPolyhedron("Equality system is inconsistent")
    K = tuple(kernel_basis(P.A, P.n))
    reduced_B = tuple(tuple(dot(row, col) for col in K) for row in P.B)
    reduced_d = tuple(rhs - dot(row, x0) for row, rhs in zip(P.B, P.d))
    reduced = Polyhedron(len(K), (), (), reduced_B, reduced_d, name=P.name)
    logger.debug("Reduced %s from R^%d to R^%d", P.name or "polyhedron", P.n, len(K))
    return reduced, AffineMap(x0, K)


_subset_limit: ContextVar[Optional[int]] = ContextVar("subset_limit", default=None)


@contextmanager
def subset_limit(limit: Optional[int]):
    """Override the row-subset guard for the calls made inside the block."""
    token = _subset_limit.set(limit)
    try:
        yield
    finally:
        _subset_limit.reset(token)


def check_subset_budget(m: int, k: int, limit: Optional[int] = None) -> int:
    if limit is None:
        limit = _subset_limit.get()
    if limit is None:
        limit = config.MAX_SUBSETS
    count = comb(m, k)
    if count > limit:
        raise SizeLimitExceeded(f"C({m},{k}) = {count} row subsets exceeds {limit}")
    return count


def _reduced_vertices_basis(R: Polyhedron) -> List[Vector]:
    found = set()
    for S in independent_subsets(R.B, R.n):
        z = _solve_square([R.B[i] for i in S], [R.d[i] for i in S])
        if z is not None and all(dot(row, z) <= rhs for row, rhs in zip(R.B, R.d)):
            found.add(z)
    return list(found)


def _reduced_vertices_dd(R: Polyhedron) -> List[Vector]:
    return list(set(polytope_vertices(R.B, R.d)))


@lru_cache(maxsize=CACHE_SIZE)
def _vertices(P: Polyhedron, method: str) -> Tuple[Vertex, ...]:
    R, embed = reduce_to_full_dimension(P)
    if R.n == 0:
        points = [()] if all(rhs >= 0 for rhs in R.d) else []
    else:
        if rank(R.B) < R.n:
            raise NotPointed(f"{P.name or 'Polyhedron'} contains a line")
        count = check_subset_budget(R.m, R.n)
        if method == "auto":
            method = "basis" if count <= BASIS_ENUMERATION_CUTOFF else "dd"
        if method == "basis":
            points = _reduced_vertices_basis(R)
        elif method == "dd":
            points = _reduced_vertices_dd(R)
        else:
            raise ValueError(f"Unknown vertex enumeration method {method!r}")
        logger.debug("%s: %d vertices by %s over %d candidate bases", P.name or "polyhedron", len(points), method, count)
    vertices = []
    for z in points:
        x = embed.apply(z)
        vertices.append(Vertex(x, tight_rows(P, x)))
    return tuple(sorted(vertices, key=lambda v: v.point))


def enumerate_vertices(P: Polyhedron, method: str = "auto") -> Tuple[Vertex, ...]:
    """All vertices, sorted lexicographically, each with its full tight-row set.

    ``method`` is "basis" (every independent row subset, solved exactly), "dd" (double
    description on the homogenized cone) or "auto" (basis below the cutoff).
    """
    return _vertices(P, method)


def vertex_index(P: Polyhedron, x: Sequence[Fraction]) -> Optional[int]:
    x = tuple(x)
    for i, v in enumerate(enumerate_vertices(P)):
        if v.point == x:
            return i
    return None


@lru_cache(maxsize=CACHE_SIZE)
def recession_rays(P: Polyhedron) -> Tuple[Tuple[int, ...], ...]:
    """Extreme directions of {g : Ag = 0, Bg <= 0}, in the original coordinates."""
    if not is_pointed(P):
        raise NotPointed(f"{P.name or 'Polyhedron'} contains a line")
    R, embed = reduce_to_full_dimension(P)
    if R.n == 0:
        return ()
    H = [tuple(-a for a in row) for row in R.B]
    return tuple(sorted(primitive_vector(embed.linear(w)) for w in extreme_rays(H, R.n)))


def is_bounded(P: Polyhedron) -> bool:
    return not recession_rays(P)


def _pointed_section(P: Polyhedron) -> Polyhedron:
    """P intersected with the orthogonal complement of its lineality space."""
    lineality = kernel_basis(P.constraint_matrix, P.n)
    if not lineality:
        return P
    zeros = tuple(Fraction(0) for _ in lineality)
    return Polyhedron(P.n, P.A + tuple(lineality), P.b + zeros, P.B, P.d, name=P.name)


def validate(P: Polyhedron) -> ValidationReport:
    """Shape checks plus emptiness, boundedness and pointedness findings.

    Duplicate inequality rows are rejected outright.
    """
    _check_duplicates(P)
    pointed = is_pointed(P)
    try:
        section = _pointed_section(P)
        empty = not enumerate_vertices(section)
    except EmptyPolyhedron:
        empty = True
    bounded = pointed and (empty or is_bounded(P))
    return ValidationReport(P.n, len(P.A), len(P.B), empty, bounded, pointed)


def _require_bounded(P: Polyhedron) -> Tuple[Vertex, ...]:
    if not is_pointed(P) or recession_rays(P):
        raise Unbounded(f"{P.name or 'Polyhedron'} is unbounded")
    vertices = enumerate_vertices(P)
    if not vertices:
        raise EmptyPolyhedron(f"{P.name or 'Polyhedron'} is empty")
    return vertices


def dimension(P: Polyhedron) -> int:
    vertices = _require_bounded(P)
    return affine_dimension([v.point for v in vertices])


def is_full_dimensional(P: Polyhedron) -> bool:
    return dimension(P) == P.n


def _full_dimensional_reduction(P: Polyhedron) -> Polyhedron:
    R, _ = reduce_to_full_dimension(P)
    if dimension(R) != R.n:
        raise NotFullDimensional(f"{P.name or 'Polyhedron'} has implicit equalities among its inequality rows")
    return R


def is_minimal(P: Polyhedron) -> Tuple[bool, Tuple[int, ...]]:
    """Whether every inequality row defines a facet, plus the rows that do not.

    Equality rows are eliminated first; what is left must be full-dimensional.
    """
    _check_duplicates(P)
    R = _full_dimensional_reduction(P)
    vertices = enumerate_vertices(R)
    redundant = []
    for i in range(R.m):
        on_row = [v.point for v in vertices if i in v.tight_rows]
        if affine_dimension(on_row) != R.n - 1:
            redundant.append(i)
    return not redundant, tuple(redundant)


def is_simple(P: Polyhedron) -> bool:
    """Every vertex on exactly dim(P) facets; needs a minimal full-dimensional representation."""
    minimal, redundant = is_minimal(P)
    if not minimal:
        raise NotMinimal(f"Rows {list(redundant)} are not facets")
    R, _ = reduce_to_full_dimension(P)
    return all(len(v.tight_rows) == R.n for v in enumerate_vertices(R))


def _as_vertex(P: Polyhedron, v: Vertex) -> Vertex:
    if not point_in(P, v.point):
        raise PointNotInPolyhedron(f"{v.point} is not in {P.name or 'the polyhedron'}")
    tight = tight_rows(P, v.point)
    if rank(P.A + tuple(P.B[i] for i in sorted(tight))) != P.n:
        raise PointNotInPolyhedron(f"{v.point} is not a vertex of {P.name or 'the polyhedron'}")
    return Vertex(v.point, tight)


def _adjacent(P: Polyhedron, u: Vertex, v: Vertex) -> bool:
    if u.point == v.point:
        return False
    common = sorted(u.tight_rows & v.tight_rows)
    return rank(P.A + tuple(P.B[i] for i in common)) == P.n - 1


def are_adjacent(P: Polyhedron, u: Vertex, v: Vertex) -> bool:
    """Whether u and v are the two ends of an edge of P; both must be vertices of P."""
    return _adjacent(P, _as_vertex(P, u), _as_vertex(P, v))


def minimal_face(P: Polyhedron, u: Vertex, v: Vertex) -> Face:
    common = u.tight_rows & v.tight_rows
    return Face(frozenset(common), P.n - rank(P.A + tuple(P.B[i] for i in sorted(common))))


def face_vertices(P: Polyhedron, face: Face) -> Tuple[Vertex, ...]:
    return tuple(v for v in enumerate_vertices(P) if face.tight_rows <= v.tight_rows)


@lru_cache(maxsize=CACHE_SIZE)
def edge_graph(P: Polyhedron) -> nx.Graph:
    """Vertex-edge graph on vertex indices; nodes carry their ``point``."""
    vertices = enumerate_vertices(P)
    G = nx.Graph()
    for i, v in enumerate(vertices):
        G.add_node(i, point=v.point)
    for i, j in combinations(range(len(vertices)), 2):
        if _adjacent(P, vertices[i], vertices[j]):
            G.add_edge(i, j)
    logger.debug("Edge graph of %s: %d nodes, %d edges", P.name or "polyhedron", G.number_of_nodes(), G.number_of_edges())
    return G


def neighbors(P: Polyhedron, v: Vertex) -> Tuple[Vertex, ...]:
    vertices = enumerate_vertices(P)
    G = edge_graph(P)
    index = vertices.index(v)
    return tuple(vertices[j] for j in sorted(G.neighbors(index)))


def inner_cone(P: Polyhedron, v: Vertex, face: Optional[Face] = None) -> Cone:
    """Edge directions leaving v, within ``face`` when given.

    Built from adjacency rather than tight-row algebra, so degenerate vertices get
    their true extreme rays.
    """
    generators = set()
    for w in neighbors(P, v):
        if face is not None and not face.tight_rows <= w.tight_rows:
            continue
        generators.add(primitive_vector(sub(w.point, v.point)))
    return Cone(tuple(sorted(generators)))


def faces_of_dimension(P: Polyhedron, k: int) -> Tuple[Face, ...]:
    """Distinct nonempty faces of dimension k of a bounded polyhedron."""
    vertices = enumerate_vertices(P)
    all_indices = frozenset(range(len(vertices)))
    facet_sets = {frozenset(j for j, v in enumerate(vertices) if i in v.tight_rows) for i in range(P.m)}
    faces = {all_indices}
    frontier = [all_indices]
    while frontier:
        current = frontier.pop()
        for s in facet_sets:
            meet = current & s
            if meet and meet not in faces:
                faces.add(meet)
                frontier.append(meet)
    result = set()
    for members in faces:
        tight = frozenset.intersection(*(vertices[j].tight_rows for j in members))
        dim = P.n - rank(P.A + tuple(P.B[i] for i in sorted(tight)))
        if dim == k:
            result.add(Face(tight, dim))
    return tuple(sorted(result, key=lambda f: sorted(f.tight_rows)))


def facets_from_vertices(V: Iterable[Sequence], name: Optional[str] = "hull") -> Polyhedron:
    """Brute-force convex hull for small point sets in dimension 1 to 4.

    Every hyperplane through an affinely independent n-subset with all points on one
    side becomes a facet row; rows are primitive and sorted.
    """
    points = sorted({as_vector(p) for p in V})
    if not points:
        raise DegenerateInput("No points given")
    n = len(points[0])
    if any(len(p) != n for p in points):
        raise ShapeError("Points of unequal length")
    if not 1 <= n <= MAX_HULL_DIMENSION:
        raise DimensionTooHigh(f"Hull dimension {n} outside 1..{MAX_HULL_DIMENSION}")
    if len(points) > MAX_HULL_POINTS:
        raise SizeLimitExceeded(f"{len(points)} points exceeds {MAX_HULL_POINTS}")
    if affine_dimension(points) != n:
        raise DegenerateInput(f"Points span affine dimension {affine_dimension(points)} < {n}")

    rows = set()
    for subset in combinations(points, n):
        base = subset[0]
        spanning = [sub(p, base) for p in subset[1:]]
        if rank(spanning) != n - 1:
            continue
        normal = kernel_basis(spanning, n)[0]
        level = dot(normal, base)
        values = [dot(normal, p) for p in points]
        if all(val <= level for val in values):
            rows.add(_facet_row(normal, level))
        if all(val >= level for val in values):
            rows.add(_facet_row(tuple(-a for a in normal), -level))
    ordered = sorted(rows)
    return Polyhedron(
        n,
        B=tuple(tuple(Fraction(a) for a in row[:-1]) for row in ordered),
        d=tuple(row[-1] for row in ordered),
        name=name,
    )


def _facet_row(normal: Sequence[Fraction], level: Fraction) -> Tuple:
    p = primitive_vector(normal)
    i = next(i for i, a in enumerate(p) if a != 0)
    return tuple(p) + (level * p[i] / normal[i],)
