"""Exact rational linear algebra.

Vectors are tuples of ``Fraction`` and matrices are tuples of such rows, so every
value is immutable and hashable. Nothing here ever touches a float.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from config import MAX_SUBDET_COLUMNS, MAX_SUBDET_ROWS
from utils.errors import ParseError, ShapeError, SingularMatrix, SizeLimitExceeded, ZeroVector

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]


def parse_rational(value) -> Fraction:
    """Parse an int, a Fraction, or a decimal string "p" / "p/q" into a Fraction."""
    if isinstance(value, bool):
        raise ParseError(f"Not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                p, q = text.split("/", 1)
                return Fraction(int(p), int(q))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Not a rational: {value!r}") from e
    raise ParseError(f"Not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_vector(values: Iterable) -> Vector:
    return tuple(parse_rational(v) for v in values)


def as_matrix(rows: Iterable[Iterable], n_cols: Optional[int] = None) -> Matrix:
    matrix = tuple(as_vector(r) for r in rows)
    widths = {len(r) for r in matrix}
    if n_cols is not None:
        widths.add(n_cols)
    if len(widths) > 1:
        raise ShapeError(f"Rows of unequal length: {sorted(widths)}")
    return matrix


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(M: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, v) for row in M)


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(c: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in v)


def is_integral(v: Sequence[Fraction]) -> bool:
    return all(a.denominator == 1 for a in v)


def rref(M: Sequence[Sequence[Fraction]], n_cols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in M]
    width = len(rows[0]) if rows else (n_cols or 0)
    pivots: List[int] = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [a / lead for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(M: Sequence[Sequence[Fraction]]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def primitive_vector(v: Sequence[Fraction]) -> Tuple[int, ...]:
    """Scale v to coprime integers, keeping its orientation."""
    if all(a == 0 for a in v):
        raise ZeroVector("Cannot normalize the zero vector")
    lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (Fraction(a).denominator for a in v), 1)
    ints = [int(Fraction(a) * lcm) for a in v]
    g = reduce(math.gcd, (abs(a) for a in ints))
    return tuple(a // g for a in ints)


def canonical_vector(v: Sequence[Fraction]) -> Tuple[Tuple[int, ...], int]:
    """Coprime integer scaling with first nonzero entry positive, plus the flip applied (+1 or -1)."""
    p = primitive_vector(v)
    first = next(a for a in p if a != 0)
    if first < 0:
        return tuple(-a for a in p), -1
    return p, 1


def kernel_basis(M: Sequence[Sequence[Fraction]], n_cols: Optional[int] = None) -> List[Vector]:
    """Null-space basis, one vector per free column, each canonical coprime-integer."""
    width = len(M[0]) if M else n_cols
    if width is None:
        raise ShapeError("kernel_basis of an empty matrix needs n_cols")
    reduced, pivots = rref(M, width)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * width
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        g, _ = canonical_vector(v)
        basis.append(tuple(Fraction(a) for a in g))
    return basis


def _solve_square(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[Vector]:
    n = len(M)
    aug = [list(row) + [b] for row, b in zip(M, rhs)]
    reduced, pivots = rref(aug, n + 1)
    if pivots != list(range(n)):
        return None
    return tuple(row[n] for row in reduced)


def solve_square(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector:
    if any(len(row) != len(M) for row in M) or len(rhs) != len(M):
        raise ShapeError("solve_square needs a square system")
    x = _solve_square(M, rhs)
    if x is None:
        raise SingularMatrix("Matrix is singular")
    return x


def solve_affine(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], n_cols: int) -> Optional[Vector]:
    """A particular solution of Ax = b with free variables at zero, or None when inconsistent."""
    if not A:
        return tuple(Fraction(0) for _ in range(n_cols))
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    reduced, pivots = rref(aug, n_cols + 1)
    if n_cols in pivots:
        return None
    x = [Fraction(0)] * n_cols
    for row, p in zip(reduced, pivots):
        x[p] = row[n_cols]
    return tuple(x)


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]])


def independent_subsets(rows: Sequence[Sequence[Fraction]], size: int) -> Iterator[Tuple[int, ...]]:
    """Yield every index tuple (increasing) of `size` linearly independent rows.

    Depth-first with an incremental echelon basis, so dependent prefixes are cut early.
    """
    m = len(rows)

    def reduce_row(row, echelon):
        row = list(row)
        for pivot, basis_row in echelon:
            if row[pivot] != 0:
                factor = row[pivot] / basis_row[pivot]
                row = [a - factor * b for a, b in zip(row, basis_row)]
        return row

    def extend(start, chosen, echelon):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, m - (size - len(chosen)) + 1):
            reduced = reduce_row(rows[i], echelon)
            pivot = next((c for c, a in enumerate(reduced) if a != 0), None)
            if pivot is None:
                continue
            yield from extend(i + 1, chosen + [i], echelon + [(pivot, reduced)])

    if size == 0:
        yield ()
        return
    yield from extend(0, [], [])


def determinant(M: Sequence[Sequence[Fraction]]) -> Fraction:
    """Bareiss fraction-free elimination on integer input, Gaussian elimination otherwise."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    if all(Fraction(a).denominator == 1 for row in M for a in row):
        return Fraction(_bareiss(M))
    rows = [list(r) for r in M]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                factor = rows[i][c] / rows[c][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[c])]
    return det


def _bareiss(M: Sequence[Sequence[Fraction]]) -> int:
    n = len(M)
    A = [[int(a) for a in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        pivot = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * pivot - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = pivot
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True)
class Subdeterminant:
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    value: Fraction


def essential_submatrix(M: Sequence[Sequence[Fraction]]) -> Tuple[List[int], List[int], bool]:
    """Row and column indices left after peeling ±unit lines, zero lines and parallel duplicates.

    Every square submatrix through a peeled line is zero or equals, up to sign, a
    submatrix of what is left, so max |det| over the original is max(kept, 1 if peeled).
    """
    rows = list(range(len(M)))
    cols = list(range(len(M[0]) if M else 0))
    peeled = False

    def peel(lines, others, entry):
        nonlocal peeled
        kept = []
        best = {}
        for i in lines:
            support = [(j, entry(i, j)) for j in others if entry(i, j) != 0]
            if not support:
                continue
            if len(support) == 1 and abs(support[0][1]) == 1:
                peeled = True
                continue
            key, _ = canonical_vector([entry(i, j) for j in others])
            magnitude = abs(support[0][1])
            if key not in best or magnitude > best[key][1]:
                best[key] = (i, magnitude)
        kept = sorted(i for i, _ in best.values())
        return kept

    while True:
        new_rows = peel(rows, cols, lambda i, j: M[i][j])
        new_cols = peel(cols, new_rows, lambda j, i: M[i][j])
        if new_rows == rows and new_cols == cols:
            return rows, cols, peeled
        rows, cols = new_rows, new_cols


def _guard(rows: Sequence[int], cols: Sequence[int]) -> None:
    if len(rows) > MAX_SUBDET_ROWS or len(cols) > MAX_SUBDET_COLUMNS:
        raise SizeLimitExceeded(
            f"Essential matrix is {len(rows)}x{len(cols)}; limit is {MAX_SUBDET_ROWS}x{MAX_SUBDET_COLUMNS}"
        )


def _square_submatrices(M, rows, cols, min_line_support):
    """Yield (row tuple, col tuple) of square submatrices in increasing size.

    Columns are drawn only from those with at least `min_line_support` nonzeros in the
    chosen rows, and submatrices with a row below that support are skipped.
    """
    for k in range(1, min(len(rows), len(cols)) + 1):
        need = min_line_support if k > 1 else 1
        for r in combinations(rows, k):
            candidates = [j for j in cols if sum(1 for i in r if M[i][j] != 0) >= need]
            if len(candidates) < k:
                continue
            for c in combinations(candidates, k):
                if any(sum(1 for j in c if M[i][j] != 0) < need for i in r):
                    continue
                yield r, c


def max_abs_subdeterminant(M: Sequence[Sequence[Fraction]]) -> Fraction:
    """Δ(M): the largest |det| over all square submatrices, by exhaustive enumeration."""
    rows, cols, peeled = essential_submatrix(M)
    _guard(rows, cols)
    best = Fraction(1) if peeled else Fraction(0)
    checked = 0
    for r, c in _square_submatrices(M, rows, cols, 1):
        value = abs(determinant([[M[i][j] for j in c] for i in r]))
        checked += 1
        if value > best:
            best = value
    logger.debug("Δ over %dx%d essential matrix: %d submatrices, value %s", len(rows), len(cols), checked, best)
    return best


def is_totally_unimodular(M: Sequence[Sequence[Fraction]]) -> Tuple[bool, Optional[Subdeterminant]]:
    """True iff every square subdeterminant lies in {-1, 0, 1}; otherwise a witnessing submatrix."""
    for i, row in enumerate(M):
        for j, a in enumerate(row):
            if a not in (-1, 0, 1):
                return False, Subdeterminant((i,), (j,), a)
    rows, cols, _ = essential_submatrix(M)
    _guard(rows, cols)
    # With all entries in {-1,0,1} and smaller sizes already clean, a line with a
    # single nonzero cannot produce a violation, so only lines with two or more count.
    for r, c in _square_submatrices(M, rows, cols, 2):
        if any(sum(1 for i in r if M[i][j] != 0) < 2 for j in c):
            continue
        value = determinant([[M[i][j] for j in c] for i in r])
        if value not in (-1, 0, 1):
            return False, Subdeterminant(r, c, value)
    return True, None
