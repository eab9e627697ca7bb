"""Exact integer and rational linear algebra for rational subspaces of R^n.

A rational subspace is represented by an integer basis matrix with the
generators as columns.  Its coordinate vector (the tuple of maximal minors of
the basis, read in lexicographic row-set order) is normalized to be primitive
with positive leading entry, which makes it a canonical label: two bases span
the same subspace exactly when their normalized coordinate vectors agree.  The
height of the subspace is the Euclidean norm of that label; this module keeps
heights squared so everything stays in exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    DegenerateBasisError,
    NonCommutingBlocksError,
    NotDecomposableError,
    ShapeError,
)

Scalar = int | Fraction
Matrix = tuple[tuple[Scalar, ...], ...]


# ---------------------------------------------------------------------------
# matrix helpers


def as_matrix(rows: Iterable[Sequence[Scalar]]) -> Matrix:
    """Validate and freeze a rectangular matrix given as rows."""
    frozen = tuple(tuple(_as_scalar(x) for x in row) for row in rows)
    if not frozen or not frozen[0]:
        raise ShapeError("matrix must have at least one row and one column")
    width = len(frozen[0])
    if any(len(row) != width for row in frozen):
        raise ShapeError("ragged rows")
    return frozen


def _as_scalar(x: Scalar) -> Scalar:
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise ShapeError(f"entries must be int or Fraction, got {type(x).__name__}")
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), len(m[0])


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ShapeError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeError("shape mismatch in subtraction")
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def determinant(m: Matrix) -> Scalar:
    """Exact determinant of a square matrix."""
    r, c = shape(m)
    if r != c:
        raise ShapeError("determinant needs a square matrix")
    if r == 1:
        return m[0][0]
    if r == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if r == 3:
        (a, b, cc), (d, e, f), (g, h, i) = m
        return a * (e * i - f * h) - b * (d * i - f * g) + cc * (d * h - e * g)
    # fraction-free Gaussian elimination (Bareiss) on a working copy
    work = [list(row) for row in m]
    if any(isinstance(x, Fraction) for row in work for x in row):
        return _determinant_fraction(work)
    sign = 1
    prev = 1
    for k in range(r - 1):
        if work[k][k] == 0:
            for s in range(k + 1, r):
                if work[s][k] != 0:
                    work[k], work[s] = work[s], work[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, r):
            for j in range(k + 1, r):
                work[i][j] = (work[i][j] * work[k][k] - work[i][k] * work[k][j]) // prev
            work[i][k] = 0
        prev = work[k][k]
    return sign * work[-1][-1]


def _determinant_fraction(work: list[list[Scalar]]) -> Fraction:
    n = len(work)
    det = Fraction(1)
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if work[i][k] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            work[k], work[pivot_row] = work[pivot_row], work[k]
            det = -det
        pivot = Fraction(work[k][k])
        det *= pivot
        for i in range(k + 1, n):
            factor = Fraction(work[i][k]) / pivot
            if factor:
                work[i] = [x - factor * y for x, y in zip(work[i], work[k])]
    return det


def rank(m: Matrix) -> int:
    """Exact rank via fraction elimination."""
    work = [[Fraction(x) for x in row] for row in m]
    rows, cols = len(work), len(work[0])
    r = 0
    for j in range(cols):
        pivot_row = next((i for i in range(r, rows) if work[i][j] != 0), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        pivot = work[r][j]
        for i in range(rows):
            if i != r and work[i][j] != 0:
                factor = work[i][j] / pivot
                work[i] = [x - factor * y for x, y in zip(work[i], work[r])]
        r += 1
        if r == rows:
            break
    return r


def rational_kernel(m: Matrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel over Q, via reduced row echelon form.

    Returns one vector per free column; the empty matrix convention is not
    needed here because callers always pass at least one row.
    """
    work = [[Fraction(x) for x in row] for row in m]
    rows, cols = len(work), len(work[0])
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        pivot_row = next((i for i in range(r, rows) if work[i][j] != 0), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        pivot = work[r][j]
        work[r] = [x / pivot for x in work[r]]
        for i in range(rows):
            if i != r and work[i][j] != 0:
                factor = work[i][j]
                work[i] = [x - factor * y for x, y in zip(work[i], work[r])]
        pivots.append(j)
        r += 1
        if r == rows:
            break
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for j in free:
        v = [Fraction(0)] * cols
        v[j] = Fraction(1)
        for i, pj in enumerate(pivots):
            v[pj] = -work[i][j]
        basis.append(tuple(v))
    return basis


def clear_denominators(v: Sequence[Scalar]) -> tuple[int, ...]:
    """Scale a rational vector by the lcm of denominators to land in Z^n."""
    denoms = [Fraction(x).denominator for x in v]
    scale = math.lcm(*denoms) if denoms else 1
    return tuple(int(Fraction(x) * scale) for x in v)


# ---------------------------------------------------------------------------
# coordinate vectors and subspaces


@dataclass(frozen=True)
class PlueckerVector:
    """Normalized coordinate label of a rational e-subspace of R^n.

    coords holds the e x e minors of an integer basis in lexicographic
    row-set order, divided by their gcd, with the first nonzero entry
    positive.
    """

    n: int
    e: int
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = math.comb(self.n, self.e)
        if len(self.coords) != expected:
            raise ShapeError(
                f"expected {expected} coordinates for ({self.n},{self.e}),"
                f" got {len(self.coords)}"
            )
        if all(c == 0 for c in self.coords):
            raise DegenerateBasisError("zero coordinate vector")
        g = math.gcd(*(abs(c) for c in self.coords))
        if g != 1:
            raise ShapeError("coordinates are not gcd-normalized")
        first = next(c for c in self.coords if c != 0)
        if first < 0:
            raise ShapeError("leading nonzero coordinate must be positive")

    @property
    def height_squared(self) -> int:
        return sum(c * c for c in self.coords)


def raw_minors(basis: Matrix) -> tuple[int, ...]:
    """All e x e minors of an integer n x e basis, lexicographic row sets."""
    n, e = shape(basis)
    if e > n:
        raise ShapeError(f"basis is {n}x{e}; need at least as many rows as columns")
    if any(isinstance(x, Fraction) for row in basis for x in row):
        raise ShapeError("raw minors are defined for integer bases")
    return tuple(
        determinant(tuple(basis[i] for i in rows)) for rows in combinations(range(n), e)
    )


def pluecker_coordinates(basis: Iterable[Sequence[Scalar]]) -> PlueckerVector:
    """Normalized coordinate vector of the span of the columns of `basis`.

    Rational entries are allowed; denominators are cleared per column first,
    which does not change the span.

    Raises DegenerateBasisError when the columns are linearly dependent.
    """
    m = _integer_basis(basis)
    n, e = shape(m)
    minors = raw_minors(m)
    if all(v == 0 for v in minors):
        raise DegenerateBasisError("columns are linearly dependent")
    g = math.gcd(*(abs(v) for v in minors))
    coords = tuple(v // g for v in minors)
    first = next(c for c in coords if c != 0)
    if first < 0:
        coords = tuple(-c for c in coords)
    return PlueckerVector(n=n, e=e, coords=coords)


def _integer_basis(basis: Iterable[Sequence[Scalar]]) -> Matrix:
    m = as_matrix(basis)
    if any(isinstance(x, Fraction) for row in m for x in row):
        cols = [clear_denominators(col) for col in transpose(m)]
        m = transpose(as_matrix(cols))
    return m


def height_squared(basis: Iterable[Sequence[Scalar]]) -> int:
    """Squared height of the span of the columns of `basis` (exact integer)."""
    return pluecker_coordinates(basis).height_squared


def generalized_determinant_squared(basis: Iterable[Sequence[Scalar]]) -> Scalar:
    """det(M^t M) for a basis matrix M, i.e. the squared basis covolume.

    For an integer basis this equals g^2 * heightSquared where g is the gcd
    of the raw maximal minors (Cauchy-Binet); in particular the two agree
    exactly when the basis generates the full integer-point lattice of its
    span.
    """
    m = as_matrix(basis)
    n, e = shape(m)
    if e > n:
        raise ShapeError("more columns than rows")
    gram = mat_mul(transpose(m), m)
    return determinant(gram)


def is_primitive_basis(basis: Iterable[Sequence[Scalar]]) -> bool:
    """Whether the integer columns generate the full lattice of their span.

    Criterion: the gcd of the raw e x e minors is 1.
    """
    m = as_matrix(basis)
    minors = raw_minors(m)
    if all(v == 0 for v in minors):
        raise DegenerateBasisError("columns are linearly dependent")
    return math.gcd(*(abs(v) for v in minors)) == 1


@dataclass(frozen=True)
class RationalSubspace:
    """A rational e-subspace of R^n with an integer basis and its label.

    Equality and hashing go through the normalized coordinate vector, so two
    instances built from different bases of the same span compare equal.
    """

    n: int
    e: int
    basis: Matrix
    pluecker: PlueckerVector

    @classmethod
    def from_basis(cls, basis: Iterable[Sequence[Scalar]]) -> "RationalSubspace":
        m = _integer_basis(basis)
        pv = pluecker_coordinates(m)
        return cls(n=pv.n, e=pv.e, basis=m, pluecker=pv)

    @classmethod
    def from_pluecker(cls, pv: PlueckerVector) -> "RationalSubspace":
        return pluecker_decode(pv)

    @property
    def height_squared(self) -> int:
        return self.pluecker.height_squared

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalSubspace):
            return NotImplemented
        return self.pluecker == other.pluecker

    def __hash__(self) -> int:
        return hash(self.pluecker)


def pluecker_decode(pv: PlueckerVector) -> RationalSubspace:
    """Recover the subspace from a normalized coordinate vector.

    The subspace is the kernel of v -> v /\\ Xi, computed exactly over Q.  A
    vector that does not satisfy the quadratic compatibility relations has a
    kernel of the wrong dimension and is rejected.

    Raises NotDecomposableError when no e-subspace has these coordinates.
    """
    n, e = pv.n, pv.e
    if e == n:
        return RationalSubspace(n=n, e=e, basis=identity(n), pluecker=pv)
    index = {rows: k for k, rows in enumerate(combinations(range(n), e))}
    wedge_rows = []
    for bigger in combinations(range(n), e + 1):
        row = [0] * n
        for pos, i in enumerate(bigger):
            rest = tuple(x for x in bigger if x != i)
            row[i] = (-1) ** pos * pv.coords[index[rest]]
        wedge_rows.append(tuple(row))
    kernel = rational_kernel(as_matrix(wedge_rows))
    if len(kernel) != e:
        raise NotDecomposableError(
            f"kernel dimension {len(kernel)} != {e}; vector fails the"
            " compatibility relations"
        )
    basis_cols = [clear_denominators(v) for v in kernel]
    m = transpose(as_matrix(basis_cols))
    recovered = pluecker_coordinates(m)
    if recovered.coords != pv.coords:
        raise NotDecomposableError("kernel span does not reproduce the input vector")
    return RationalSubspace(n=n, e=e, basis=m, pluecker=recovered)


# ---------------------------------------------------------------------------
# compound matrices and block determinants


def compound_matrix(m: Iterable[Sequence[Scalar]], e: int) -> Matrix:
    """e-th compound: all e x e minors, lexicographic row and column sets.

    Multiplicative in the sense compound(A @ B, e) = compound(A, e) @
    compound(B, e), which is what transports subspace labels through linear
    maps.
    """
    mm = as_matrix(m)
    r, c = shape(mm)
    if not 1 <= e <= min(r, c):
        raise ShapeError(f"compound order {e} out of range for {r}x{c}")
    row_sets = list(combinations(range(r), e))
    col_sets = list(combinations(range(c), e))
    out = []
    for rs in row_sets:
        out_row = []
        for cs in col_sets:
            sub = tuple(tuple(mm[i][j] for j in cs) for i in rs)
            out_row.append(determinant(sub))
        out.append(tuple(out_row))
    return tuple(out)


def block_determinant(
    a1: Iterable[Sequence[Scalar]],
    a2: Iterable[Sequence[Scalar]],
    a3: Iterable[Sequence[Scalar]],
    a4: Iterable[Sequence[Scalar]],
) -> Scalar:
    """det [[A1, A2], [A3, A4]] for commuting top blocks A1 A2 = A2 A1.

    Computed both directly and as det(A4 A1 - A3 A2); the two exact values
    must agree, so this doubles as a self-check of the reduction.
    """
    b1, b2, b3, b4 = (as_matrix(b) for b in (a1, a2, a3, a4))
    s = shape(b1)[0]
    for b in (b1, b2, b3, b4):
        if shape(b) != (s, s):
            raise ShapeError("all four blocks must be square of equal size")
    if mat_mul(b1, b2) != mat_mul(b2, b1):
        raise NonCommutingBlocksError("top blocks do not commute")
    assembled = tuple(
        tuple(b1[i]) + tuple(b2[i]) for i in range(s)
    ) + tuple(tuple(b3[i]) + tuple(b4[i]) for i in range(s))
    direct = determinant(assembled)
    reduced = determinant(mat_sub(mat_mul(b4, b1), mat_mul(b3, b2)))
    if direct != reduced:
        raise NonCommutingBlocksError(
            "block reduction disagrees with the direct determinant"
        )
    return direct


def padic_valuation(x: Scalar, p: int) -> int:
    """Exponent of the prime p in x (negative for denominators).

    Raises ValueError for x = 0, where the valuation is not finite.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    f = Fraction(x)
    if f == 0:
        raise ValueError("valuation of zero is undefined")

    def _count(m: int) -> int:
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        return k

    return _count(f.numerator) - _count(f.denominator)
