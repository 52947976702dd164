"""Exact double description through cddlib, in fraction arithmetic."""
import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

import cdd

from utils.errors import NotPointed
from utils.exactla import primitive_vector, rank

logger = logging.getLogger(__name__)


def _generators(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[Tuple[Fraction, ...]], frozenset]:
    """V-representation of {x : b + A x >= 0} given rows [b, A]; returns (rows, linearity indices)."""
    mat = cdd.Matrix([list(r) for r in rows], number_type="fraction")
    mat.rep_type = cdd.RepType.INEQUALITY
    gen = cdd.Polyhedron(mat).get_generators()
    generators = [tuple(Fraction(a) for a in gen[i]) for i in range(gen.row_size)]
    return generators, frozenset(gen.lin_set)


def extreme_rays(H: Sequence[Sequence[Fraction]], dim: int) -> List[Tuple[int, ...]]:
    """Extreme rays of {x in R^dim : Hx >= 0} as primitive integer vectors, sorted.

    The cone must be pointed (rank H = dim).
    """
    if dim == 0:
        return []
    if not H or rank(H) < dim:
        raise NotPointed(f"Cone has lineality: rank {rank(H) if H else 0} < {dim}")
    generators, lineality = _generators([(Fraction(0),) + tuple(h) for h in H])
    if lineality:
        raise NotPointed(f"Cone has {len(lineality)} lineality generators")
    rays = {primitive_vector(g[1:]) for g in generators if g[0] == 0 and any(g[1:])}
    logger.debug("%d rays from %d rows in dimension %d", len(rays), len(H), dim)
    return sorted(rays)


def polytope_vertices(B: Sequence[Sequence[Fraction]], d: Sequence[Fraction]) -> List[Tuple[Fraction, ...]]:
    """Vertices of the pointed polyhedron {z : Bz <= d}; an empty system has none."""
    generators, lineality = _generators([(rhs,) + tuple(-a for a in row) for row, rhs in zip(B, d)])
    if lineality:
        raise NotPointed(f"Polyhedron has {len(lineality)} lineality generators")
    return [tuple(a / g[0] for a in g[1:]) for g in generators if g[0] != 0]


def cone_dimension(rays: Sequence[Sequence[Fraction]]) -> int:
    if not rays:
        return 0
    return rank(rays)
