"""Circuits C(A, B) and maximal circuit steps."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from config import CACHE_SIZE, MAX_ORACLE_ROWS
from polytopes.polyhedron import Polyhedron, check_subset_budget, is_minimal, is_pointed, point_in
from utils.errors import (
    InfeasibleDirection,
    NotInKernel,
    NotPointed,
    PointNotInPolyhedron,
    PolywalkError,
    SizeLimitExceeded,
    UnboundedDirection,
)
from utils.exactla import (
    Vector,
    canonical_vector,
    dot,
    independent_subsets,
    kernel_basis,
    mat_vec,
    max_abs_subdeterminant,
    rank,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Circuit:
    """A canonical circuit: coprime integers, first nonzero entry positive.

    ``sign`` records the orientation a caller asked for; it does not take part in
    equality, so one record stands for both +g and -g.
    """

    g: Tuple[int, ...]
    image: Tuple[Fraction, ...] = ()
    sign: int = field(default=1, compare=False)

    def direction(self, orientation: int = 1) -> Vector:
        return tuple(Fraction(orientation * a) for a in self.g)

    def oriented_image(self, orientation: int = 1) -> Vector:
        return tuple(orientation * a for a in self.image)

    def negated(self) -> "Circuit":
        return Circuit(self.g, self.image, -self.sign)


def normalize_circuit(v: Sequence[Fraction], P: Optional[Polyhedron] = None) -> Circuit:
    """Scale v to a canonical circuit record, remembering the original orientation in ``sign``."""
    g, sign = canonical_vector(v)
    image: Tuple[Fraction, ...] = ()
    if P is not None:
        if any(dot(row, g) != 0 for row in P.A):
            raise NotInKernel(f"{g} is not in the kernel of A")
        image = mat_vec(P.B, g)
    return Circuit(g, image, sign)


def _require_pointed(P: Polyhedron) -> None:
    if not is_pointed(P):
        raise NotPointed(f"{P.name or 'Polyhedron'} contains a line")


def _warn_if_redundant(P: Polyhedron) -> None:
    try:
        minimal, redundant = is_minimal(P)
    except PolywalkError:
        return
    if not minimal:
        logger.warning(
            "%s is not a minimal representation (rows %s are not facets); circuits follow the rows as given",
            P.name or "Polyhedron", list(redundant),
        )


@lru_cache(maxsize=CACHE_SIZE)
def circuits_rank_method(P: Polyhedron) -> Tuple[Circuit, ...]:
    """Every kernel generator of (A; B_S) over independent row sets S of rank n - 1.

    Works on the rows B K, K a kernel basis of A, so only (k-1)-subsets of the
    inequality rows are visited, k = n - rank(A).
    """
    _require_pointed(P)
    K = kernel_basis(P.A, P.n)
    k = len(K)
    if k == 0:
        return ()
    reduced = [tuple(dot(row, col) for col in K) for row in P.B]
    check_subset_budget(P.m, k - 1)

    found = {}
    visited = 0
    for S in independent_subsets(reduced, k - 1):
        visited += 1
        (z,) = kernel_basis([reduced[i] for i in S], k)
        g = tuple(sum((zj * col[t] for zj, col in zip(z, K)), Fraction(0)) for t in range(P.n))
        circuit = normalize_circuit(g, P)
        found[circuit.g] = Circuit(circuit.g, circuit.image)
    logger.debug("%s: %d circuits from %d independent row sets", P.name or "polyhedron", len(found), visited)
    _warn_if_redundant(P)
    return tuple(found[g] for g in sorted(found))


def _support(image: Sequence[Fraction]) -> frozenset:
    return frozenset(i for i, a in enumerate(image) if a != 0)


def circuits_support_oracle(P: Polyhedron) -> Tuple[Circuit, ...]:
    """Brute-force circuits: candidates from every row subset, filtered by support minimality."""
    _require_pointed(P)
    if P.m > MAX_ORACLE_ROWS:
        raise SizeLimitExceeded(f"Support oracle needs at most {MAX_ORACLE_ROWS} inequality rows, got {P.m}")
    candidates = {}
    for size in range(P.m + 1):
        for T in combinations(range(P.m), size):
            basis = kernel_basis(P.A + tuple(P.B[i] for i in T), P.n)
            if len(basis) == 1:
                circuit = normalize_circuit(basis[0], P)
                candidates[circuit.g] = Circuit(circuit.g, circuit.image)
    supports = {g: _support(c.image) for g, c in candidates.items()}
    minimal = [
        g for g in candidates
        if not any(supports[h] < supports[g] for h in candidates if h != g)
    ]
    return tuple(candidates[g] for g in sorted(minimal))


def satisfies_rank_certificate(P: Polyhedron, circuit: Circuit, orientation: int = 1) -> bool:
    """Kernel membership plus rank(A; B') = n - 1 for the rows B' with B'g = 0."""
    g = circuit.direction(orientation)
    if any(dot(row, g) != 0 for row in P.A) or not any(g):
        return False
    zero_rows = tuple(row for row in P.B if dot(row, g) == 0)
    return rank(P.A + zero_rows) == P.n - 1


def circuits_within_subdeterminant_bound(P: Polyhedron, circuits: Optional[Sequence[Circuit]] = None) -> bool:
    """Entries of g and of Bg never exceed the largest subdeterminant of (A; B)."""
    if circuits is None:
        circuits = circuits_rank_method(P)
    delta = max_abs_subdeterminant(P.constraint_matrix)
    return all(
        max(abs(a) for a in c.g) <= delta and all(abs(a) <= delta for a in c.image)
        for c in circuits
    )


def _oriented_moves(P: Polyhedron, x: Vector, circuits: Sequence[Circuit]):
    """(circuit, orientation) pairs that can move from x, given Bx."""
    slack = [rhs - dot(row, x) for row, rhs in zip(P.B, P.d)]
    for c in circuits:
        for orientation in (1, -1):
            if all(orientation * c.image[i] <= 0 for i, s in enumerate(slack) if s == 0):
                yield c, orientation, slack


def feasible_circuits_at(
    P: Polyhedron, x: Sequence[Fraction], circuits: Optional[Sequence[Circuit]] = None
) -> List[Tuple[Circuit, int]]:
    x = tuple(x)
    if not point_in(P, x):
        raise PointNotInPolyhedron(f"{x} is not in {P.name or 'the polyhedron'}")
    if circuits is None:
        circuits = circuits_rank_method(P)
    return [(c, orientation) for c, orientation, _ in _oriented_moves(P, x, circuits)]


def _ratio_test(P: Polyhedron, x: Vector, circuit: Circuit, orientation: int, slack) -> Tuple[Vector, Fraction]:
    alpha = None
    for i, s in enumerate(slack):
        rate = orientation * circuit.image[i]
        if rate > 0:
            bound = s / rate
            if alpha is None or bound < alpha:
                alpha = bound
    if alpha is None:
        raise UnboundedDirection(f"Direction {circuit.direction(orientation)} never leaves {P.name or 'the polyhedron'}")
    g = circuit.direction(orientation)
    return tuple(a + alpha * b for a, b in zip(x, g)), alpha


def steps_from(P: Polyhedron, x: Vector, circuits: Sequence[Circuit]):
    """Yield (circuit, orientation, y, alpha) for every feasible maximal step at x ∈ P."""
    for c, orientation, slack in _oriented_moves(P, x, circuits):
        y, alpha = _ratio_test(P, x, c, orientation, slack)
        yield c, orientation, y, alpha


def maximal_step(
    P: Polyhedron, x: Sequence[Fraction], circuit: Circuit, orientation: int = 1
) -> Tuple[Vector, Fraction]:
    """Move from x along the oriented circuit until one more step would leave P."""
    x = tuple(x)
    if not point_in(P, x):
        raise PointNotInPolyhedron(f"{x} is not in {P.name or 'the polyhedron'}")
    if not circuit.image:
        circuit = normalize_circuit(circuit.g, P)
    slack = [rhs - dot(row, x) for row, rhs in zip(P.B, P.d)]
    if any(orientation * circuit.image[i] > 0 for i, s in enumerate(slack) if s == 0):
        raise InfeasibleDirection(message=f"Direction {circuit.direction(orientation)} is infeasible at {x}")
    return _ratio_test(P, x, circuit, orientation, slack)
