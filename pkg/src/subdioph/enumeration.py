"""Exhaustive enumeration of rational subspaces up to a height bound.

This is the brute-force oracle behind exponent measurement: it must emit
exactly one representative per subspace, never miss one below the bound,
and behave deterministically so that runs are reproducible and shardable.

Completeness is tiered by strategy.  EXACT_LINES (dimension 1, or
codimension 1 via primitive normal vectors) and EXACT_PLUECKER (planes in
R^4 via integer coordinate 6-tuples on the decomposability quadric) are
complete by construction.  BASIS_BOX walks integer bases in a coordinate
box and dedupes by normalized coordinates; it is a heuristic explorer, not
a complete census, and callers are expected to surface its disclaimer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import gcd, isqrt
from typing import Iterator, Sequence

from . import exact
from .errors import ParameterError, StrategyMismatchError, SubdiophError

EXACT_LINES = "exact-lines"
EXACT_PLUECKER = "exact-pluecker"
BASIS_BOX = "basis-box"
STRATEGIES = (EXACT_LINES, EXACT_PLUECKER, BASIS_BOX)

SUBSPACE = "subspace"
CHECKPOINT = "checkpoint"

__all__ = [
    "EXACT_LINES",
    "EXACT_PLUECKER",
    "BASIS_BOX",
    "STRATEGIES",
    "SUBSPACE",
    "CHECKPOINT",
    "EnumSpec",
    "enumerate_events",
    "enumerate_subspaces",
    "enumerate_lines",
    "shard_partition",
    "leading_range",
    "completeness_note",
]


@dataclass(frozen=True)
class EnumSpec:
    """Parameters of one enumeration run.

    Sharding splits the range of the leading coordinate (first vector or
    coordinate entry walked by the strategy) into shard_count contiguous
    chunks; shard_index selects one.  Exact strategies give disjoint
    shards; BASIS_BOX dedupes per stream, so distinct shards may re-emit a
    subspace reachable from several leading entries (set union is still
    exactly the unsharded output).
    """

    n: int
    e: int
    height_squared_max: int
    strategy: str = EXACT_LINES
    basis_box_bound: int | None = None
    shard_count: int = 1
    shard_index: int = 0

    def __post_init__(self) -> None:
        if self.n < 2 or not 1 <= self.e <= self.n:
            raise ParameterError(f"invalid dimensions ({self.n},{self.e})")
        if self.height_squared_max < 1:
            raise ParameterError("height bound must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.strategy == EXACT_LINES and self.e not in (1, self.n - 1):
            raise StrategyMismatchError(
                "exact-lines handles dimension 1 or codimension 1 only"
            )
        if self.strategy == EXACT_PLUECKER and (self.n, self.e) != (4, 2):
            raise StrategyMismatchError("exact-pluecker handles (n,e) = (4,2) only")
        if self.strategy == BASIS_BOX:
            if self.basis_box_bound is None or self.basis_box_bound < 1:
                raise ParameterError("basis-box needs a positive entry bound")
        elif self.basis_box_bound is not None:
            raise ParameterError("basis_box_bound only applies to basis-box")
        if not 0 <= self.shard_index < self.shard_count:
            raise ParameterError("shard index out of range")


def completeness_note(spec: EnumSpec) -> str | None:
    """Disclaimer for heuristic strategies, None when the run is a census."""
    if spec.strategy == BASIS_BOX:
        return (
            "basis-box walks integer bases with entries in "
            f"[-{spec.basis_box_bound}, {spec.basis_box_bound}] and may miss "
            "subspaces below the height bound; results are a sample, not a census"
        )
    return None


# ---------------------------------------------------------------------------
# integer vector generation


def _boxed(k: int, budget: int, zero_so_far: bool) -> Iterator[tuple[tuple[int, ...], int, bool]]:
    """All integer k-tuples with squared norm <= budget, sign-canonical.

    While every earlier coordinate is zero the current one is restricted to
    be nonnegative, which picks one representative per sign class.  Yields
    (tuple, squared norm, still all zero).
    """
    if k == 0:
        yield (), 0, zero_so_far
        return
    top = isqrt(budget)
    start = 0 if zero_so_far else -top
    for v in range(start, top + 1):
        for tail, tail_sq, tail_zero in _boxed(k - 1, budget - v * v, zero_so_far and v == 0):
            yield (v,) + tail, v * v + tail_sq, tail_zero


def _primitive_with_leading(
    n: int, budget: int, lead: int
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Primitive sign-canonical n-vectors with first coordinate lead."""
    rem = budget - lead * lead
    if rem < 0:
        return
    for tail, tail_sq, all_zero in _boxed(n - 1, rem, lead == 0):
        if all_zero and lead == 0:
            continue
        vec = (lead,) + tail
        if gcd(*vec) == 1:
            yield vec, lead * lead + tail_sq


def primitive_vectors(n: int, max_norm_sq: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """All primitive sign-canonical n-vectors with squared norm <= bound.

    Yields (vector, squared norm) with the leading coordinate ascending;
    each line through the origin contributes exactly one vector.
    """
    if n < 1 or max_norm_sq < 1:
        raise ParameterError("need n >= 1 and a positive norm bound")
    for lead in range(0, isqrt(max_norm_sq) + 1):
        yield from _primitive_with_leading(n, max_norm_sq, lead)


# ---------------------------------------------------------------------------
# strategies, one generator per leading-coordinate value


def _lines_at(spec: EnumSpec, lead: int) -> Iterator[exact.RationalSubspace]:
    for vec, _ in _primitive_with_leading(spec.n, spec.height_squared_max, lead):
        yield exact.RationalSubspace.from_basis([(x,) for x in vec])


def _hyperplanes_at(spec: EnumSpec, lead: int) -> Iterator[exact.RationalSubspace]:
    for normal, norm_sq in _primitive_with_leading(
        spec.n, spec.height_squared_max, lead
    ):
        kernel = exact.rational_kernel([list(normal)])
        basis = [[v[i] for v in kernel] for i in range(spec.n)]
        sub = exact.RationalSubspace.from_basis(basis)
        if sub.pluecker.height_squared != norm_sq:
            raise SubdiophError(
                "height of a normal-vector subspace disagrees with its "
                "coordinate norm; enumeration completeness is broken"
            )
        yield sub


def _planes4_at(spec: EnumSpec, lead: int) -> Iterator[exact.RationalSubspace]:
    """Planes in R^4 with coordinates (x12, x13, x14, x23, x24, x34).

    Decomposable exactly when x12*x34 - x13*x24 + x14*x23 = 0; the last
    coordinate is solved from the first five (or scanned when x12 = 0 makes
    the constraint degenerate).
    """
    bound = spec.height_squared_max
    rem = bound - lead * lead
    if rem < 0:
        return
    for (x13, x14, x23, x24), used, still_zero in _boxed(4, rem, lead == 0):
        cross = x13 * x24 - x14 * x23
        left = rem - used
        if lead != 0:
            if cross % lead != 0:
                continue
            x34 = cross // lead
            if x34 * x34 > left:
                continue
            candidates = (x34,)
        else:
            if cross != 0:
                continue
            top = isqrt(left)
            candidates = range(1 if still_zero else -top, top + 1)
        for x34 in candidates:
            coords = (lead, x13, x14, x23, x24, x34)
            if gcd(*coords) != 1:
                continue
            pv = exact.PlueckerVector(n=4, e=2, coords=coords)
            yield exact.RationalSubspace.from_pluecker(pv)


def _basis_box_at(
    spec: EnumSpec, lead: int, seen: set
) -> Iterator[exact.RationalSubspace]:
    m = spec.basis_box_bound
    cells = spec.n * spec.e

    def fill(values: list[int]) -> Iterator[exact.RationalSubspace]:
        if len(values) == cells:
            rows = [
                values[i * spec.e : (i + 1) * spec.e] for i in range(spec.n)
            ]
            try:
                sub = exact.RationalSubspace.from_basis(rows)
            except SubdiophError:
                return
            key = (sub.pluecker.n, sub.pluecker.e, sub.pluecker.coords)
            if key in seen or sub.pluecker.height_squared > spec.height_squared_max:
                return
            seen.add(key)
            yield sub
            return
        for v in range(-m, m + 1):
            yield from fill(values + [v])

    yield from fill([lead])


# ---------------------------------------------------------------------------
# driver


def leading_range(spec: EnumSpec) -> tuple[int, int]:
    """Full range of the strategy's leading coordinate, before sharding."""
    if spec.strategy == BASIS_BOX:
        return (-spec.basis_box_bound, spec.basis_box_bound)
    return (0, isqrt(spec.height_squared_max))


def _shard_range(spec: EnumSpec) -> tuple[int, int]:
    lo, hi = leading_range(spec)
    size = hi - lo + 1
    i, count = spec.shard_index, spec.shard_count
    return (lo + i * size // count, lo + (i + 1) * size // count - 1)


def shard_partition(spec: EnumSpec, shard_count: int) -> list[EnumSpec]:
    """Split a run into shard_count runs over leading-coordinate chunks.

    The union of the shard outputs equals the unsharded output as a set,
    for any shard_count.
    """
    if shard_count < 1:
        raise ParameterError("need at least one shard")
    if spec.shard_count != 1:
        raise ParameterError("spec is already sharded")
    return [
        replace(spec, shard_count=shard_count, shard_index=i)
        for i in range(shard_count)
    ]


def enumerate_events(
    spec: EnumSpec, cursor: int | None = None
) -> Iterator[tuple[str, object]]:
    """Stream of (SUBSPACE, subspace) and (CHECKPOINT, value) events.

    A checkpoint value c certifies that every subspace with leading
    coordinate at most c has been emitted; resuming with cursor=c continues
    after it.  Within a run the emitted coordinate labels are pairwise
    distinct and the order is a pure function of (spec, cursor).
    """
    lo, hi = _shard_range(spec)
    if cursor is not None:
        lo = max(lo, cursor + 1)
    seen: set = set()
    for lead in range(lo, hi + 1):
        if spec.strategy == EXACT_LINES and spec.e == 1:
            stream = _lines_at(spec, lead)
        elif spec.strategy == EXACT_LINES:
            stream = _hyperplanes_at(spec, lead)
        elif spec.strategy == EXACT_PLUECKER:
            stream = _planes4_at(spec, lead)
        else:
            stream = _basis_box_at(spec, lead, seen)
        yield from ((SUBSPACE, sub) for sub in stream)
        yield (CHECKPOINT, lead)


def enumerate_subspaces(
    spec: EnumSpec, cursor: int | None = None
) -> Iterator[exact.RationalSubspace]:
    """Subspace-only view of enumerate_events."""
    for kind, payload in enumerate_events(spec, cursor=cursor):
        if kind == SUBSPACE:
            yield payload


def enumerate_lines(n: int, height_squared_max: int) -> Iterator[exact.RationalSubspace]:
    """All lines in R^n with squared height at most the bound."""
    spec = EnumSpec(n=n, e=1, height_squared_max=height_squared_max)
    return enumerate_subspaces(spec)
