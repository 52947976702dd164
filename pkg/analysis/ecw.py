"""Characterizations of simple polytopes whose circuit walks are all edge walks."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from config import MAX_ARRANGEMENT_HYPERPLANES
from polytopes.circuits import circuits_rank_method, satisfies_rank_certificate
from polytopes.double_description import cone_dimension, extreme_rays
from polytopes.polyhedron import (
    Cone,
    Polyhedron,
    Vertex,
    enumerate_vertices,
    face_vertices,
    faces_of_dimension,
    inner_cone,
    is_simple,
    minimal_face,
    neighbors,
    reduce_to_full_dimension,
)
from utils.errors import NotFullDimensional, NotSimple, SizeLimitExceeded
from utils.exactla import Vector, add, canonical_vector, dot, rref

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FaceCertificate:
    """``vertex`` lies on the d-parallelotope face spanned with ``partner``."""

    vertex: Vector
    partner: Vector
    face_rows: Tuple[int, ...]
    face_vertices: Tuple[Vector, ...]


@dataclass(frozen=True)
class RecognitionResult:
    is_ndp: bool
    d: Optional[int] = None
    certificate: Tuple[FaceCertificate, ...] = ()
    reason: Optional[str] = None
    counterexample: Optional[Tuple[Vector, ...]] = None


@dataclass(frozen=True)
class ElementaryArrangement:
    """Distinct hyperplanes {a x = 0} through the origin, one per parallel class of rows."""

    normals: Tuple[Tuple[int, ...], ...]
    multiplicity: Tuple[int, ...]


def _simple_reduction(P: Polyhedron):
    """Equality-free, minimal, full-dimensional, simple form of P plus its embedding."""
    if not is_simple(P):
        raise NotSimple(f"{P.name or 'Polyhedron'} has a vertex on more than dim facets")
    return reduce_to_full_dimension(P)


def elementary_cone_condition(P: Polyhedron) -> Tuple[bool, Optional[Tuple[Vector, int]]]:
    """No inequality normal may separate two generators of any inner cone.

    The witness is (vertex, row index) for the first splitting hyperplane found.
    """
    R, embed = _simple_reduction(P)
    for v in enumerate_vertices(R):
        generators = inner_cone(R, v).generators
        for i, row in enumerate(R.B):
            signs = {(dot(row, g) > 0) - (dot(row, g) < 0) for g in generators}
            if {1, -1} <= signs:
                return False, (embed.apply(v.point), i)
    return True, None


def symmetric_inner_cone_condition(P: Polyhedron) -> Tuple[bool, Optional[Tuple[Vector, Vector]]]:
    """I^{uv}(u) = -I^{uv}(v) for every vertex pair, inside their minimal face."""
    R, embed = _simple_reduction(P)
    vertices = enumerate_vertices(R)
    for u, v in combinations(vertices, 2):
        if not _opposite_in_face(R, u, v):
            return False, (embed.apply(u.point), embed.apply(v.point))
    return True, None


def _opposite_in_face(R: Polyhedron, u: Vertex, v: Vertex, face=None) -> bool:
    face = face or minimal_face(R, u, v)
    return inner_cone(R, u, face).generators == inner_cone(R, v, face).negated().generators


def _parallelotope_face(R: Polyhedron, v: Vertex, w: Vertex, d: int) -> Optional[FaceCertificate]:
    face = minimal_face(R, v, w)
    if face.dim != d:
        return None
    members = face_vertices(R, face)
    if len(members) != 2 ** d:
        return None
    for x in members:
        if sum(1 for y in neighbors(R, x) if face.tight_rows <= y.tight_rows) != d:
            return None
        opposite = [y for y in members if (x.tight_rows & y.tight_rows) == face.tight_rows]
        if len(opposite) != 1 or not _opposite_in_face(R, x, opposite[0], face):
            return None
    return FaceCertificate(v.point, w.point, tuple(sorted(face.tight_rows)), tuple(x.point for x in members))


def recognize_nd_parallelotope(P: Polyhedron) -> RecognitionResult:
    """Decide whether P is an (n, d)-parallelotope with d = facets - n."""
    R, embed = _simple_reduction(P)
    n, f = R.n, R.m
    d = f - n
    if not 1 <= d <= n:
        return RecognitionResult(False, reason=f"{f} facets in dimension {n} gives d = {d} outside 1..{n}")
    symmetric, pair = symmetric_inner_cone_condition(P)
    if not symmetric:
        return RecognitionResult(False, reason="symmetric inner cone condition fails", counterexample=pair)

    vertices = enumerate_vertices(R)
    certificate = []
    for v in vertices:
        found = None
        for w in vertices:
            if w != v and len(v.tight_rows & w.tight_rows) == n - d:
                found = _parallelotope_face(R, v, w, d)
                if found:
                    break
        if found is None:
            return RecognitionResult(
                False, reason="vertex lies on no d-parallelotope face", counterexample=(embed.apply(v.point),)
            )
        certificate.append(
            FaceCertificate(
                embed.apply(found.vertex),
                embed.apply(found.partner),
                found.face_rows,
                tuple(embed.apply(x) for x in found.face_vertices),
            )
        )
    logger.debug("%s recognized as a (%d,%d)-parallelotope", P.name or "Polytope", n, d)
    return RecognitionResult(True, d=d, certificate=tuple(certificate))


def elementary_arrangement(P: Polyhedron) -> ElementaryArrangement:
    R, _ = reduce_to_full_dimension(P)
    counts: Dict[Tuple[int, ...], int] = {}
    for row in R.B:
        if any(row):
            key, _ = canonical_vector(row)
            counts[key] = counts.get(key, 0) + 1
    normals = tuple(sorted(counts))
    return ElementaryArrangement(normals, tuple(counts[a] for a in normals))


def _full_dimensional_cone(H: Sequence[Sequence[Fraction]], n: int) -> bool:
    """Whether {x : Hx >= 0} has nonempty interior, after splitting off its lineality space."""
    if not H:
        return True
    basis, _ = rref(H)
    projected = [tuple(dot(h, b) for b in basis) for h in H]
    rays = extreme_rays(projected, len(basis))
    return cone_dimension(rays) == len(basis)


def elementary_cones_enumerate(P: Polyhedron) -> List[Cone]:
    """All full-dimensional cells of the elementary arrangement, by sign-vector search."""
    R, _ = reduce_to_full_dimension(P)
    arrangement = elementary_arrangement(P)
    normals = [tuple(Fraction(a) for a in h) for h in arrangement.normals]
    if len(normals) > MAX_ARRANGEMENT_HYPERPLANES:
        raise SizeLimitExceeded(f"{len(normals)} hyperplanes exceeds {MAX_ARRANGEMENT_HYPERPLANES}")
    if cone_dimension(normals) != R.n:
        raise NotFullDimensional("Arrangement normals do not span the space")

    cells = []

    def extend(signed):
        if not _full_dimensional_cone(signed, R.n):
            return
        if len(signed) == len(normals):
            cells.append(Cone(tuple(extreme_rays(signed, R.n))))
            return
        h = normals[len(signed)]
        for s in (1, -1):
            extend(signed + [tuple(s * a for a in h)])

    extend([])
    logger.debug("%d cells in an arrangement of %d hyperplanes", len(cells), len(normals))
    return sorted(cells, key=lambda c: c.generators)


def arrangement_rays_are_circuits(P: Polyhedron) -> bool:
    """Cell rays are circuits, and every circuit lies on n-1 independent arrangement hyperplanes."""
    R, _ = reduce_to_full_dimension(P)
    circuits = circuits_rank_method(R)
    known = {c.g for c in circuits}
    for cell in elementary_cones_enumerate(R):
        for ray in cell.generators:
            if canonical_vector(ray)[0] not in known:
                return False
    return all(satisfies_rank_certificate(R, c) for c in circuits)


def two_faces_are_triangles_or_parallelograms(P: Polyhedron) -> Tuple[bool, Optional[Tuple[Vector, ...]]]:
    """Every 2-face has 3 vertices, or 4 whose diagonals bisect each other."""
    for face in faces_of_dimension(P, 2):
        points = [v.point for v in face_vertices(P, face)]
        if len(points) == 3:
            continue
        if len(points) == 4:
            a, b, c, e = points
            if add(a, b) == add(c, e) or add(a, c) == add(b, e) or add(a, e) == add(b, c):
                continue
        return False, tuple(points)
    return True, None
