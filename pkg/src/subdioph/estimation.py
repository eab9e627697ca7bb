"""Record-setting approximants and empirical approximation exponents.

A record is an enumerated subspace whose j-th proximity sine against a fixed
target is strictly smaller than that of every enumerated subspace of equal or
lower height.  Reading the record sequence on a log-log scale turns certified
angle intervals into an empirical approximation exponent.

Two scan engines feed the estimator:

* an exact scanner for lines in the plane (and their images under coordinate
  embeddings) that evaluates cross terms in rational or quadratic-integer
  arithmetic and certifies that no unexamined vector can beat any record;
* a generic scanner that walks an enumeration stream and brackets every angle
  with adaptive-precision intervals.

Records are conservative by construction: exponents use upper endpoints of
the sine intervals, irrationality witnesses use lower endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Mapping, Sequence

from mpmath import mp

from . import exact
from .angles import PrecisionContext, RealBasis, angles_adaptive
from .construction import (
    INFINITE,
    INFINITE_BASE,
    ConstructionParams,
    ConvergentMatrix,
    InstanceCertification,
    build_convergent,
    build_generators,
    series_start,
    stream_for,
    tail_bound,
    term_exponents,
    xi_truncation,
)
from .enumeration import (
    BASIS_BOX,
    EXACT_LINES,
    EnumSpec,
    enumerate_subspaces,
    primitive_vectors,
)
from .errors import (
    InsufficientRecordsError,
    IrrationalityViolationError,
    ParameterError,
    ScanIncompleteError,
    StrategyMismatchError,
    SubdiophError,
)

SOURCE_ENUMERATED = "enumerated"

DEFAULT_ZONE = 10_000
DEFAULT_AMBIENT_ZONE = 400

# Rounding candidates cover every x2 within 2.5 of x1 * slope (rounding error
# at most 1/2); after a slope-bracket allowance of 1/10 every non-candidate
# keeps a cross term of at least 12/5.
_CANDIDATE_HALF_WIDTH = 2
_MARGIN = Fraction(12, 5)
_BRACKET_ALLOWANCE = Fraction(1, 10)
_ROOT_BITS = 192


def constructed_source(n_index: int) -> str:
    """Source tag for a record coming from a construction convergent."""
    return f"constructed:{n_index}"


# ---------------------------------------------------------------------------
# exact quadratic values a + b sqrt(d)


@dataclass(frozen=True)
class QuadraticValue:
    """Exact number a + b * sqrt(d) with rational a, b and nonsquare d >= 2."""

    a: Fraction
    b: Fraction
    d: int

    def __sub__(self, other: "QuadraticValue") -> "QuadraticValue":
        return QuadraticValue(self.a - other.a, self.b - other.b, self.d)

    def __add__(self, other: "QuadraticValue") -> "QuadraticValue":
        return QuadraticValue(self.a + other.a, self.b + other.b, self.d)

    def scaled(self, r: Fraction | int) -> "QuadraticValue":
        return QuadraticValue(self.a * r, self.b * r, self.d)

    def squared(self) -> "QuadraticValue":
        return QuadraticValue(
            self.a * self.a + self.b * self.b * self.d, 2 * self.a * self.b, self.d
        )

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        lhs = a * a
        rhs = b * b * self.d
        if a > 0:
            return (lhs > rhs) - (lhs < rhs)
        return (rhs > lhs) - (rhs < lhs)

    def bracket(self, root_lo: Fraction, root_hi: Fraction) -> tuple[Fraction, Fraction]:
        """Enclosing rational interval given a bracket of sqrt(d)."""
        if self.b >= 0:
            return self.a + self.b * root_lo, self.a + self.b * root_hi
        return self.a + self.b * root_hi, self.a + self.b * root_lo


def root_bracket(d: int, bits: int = _ROOT_BITS) -> tuple[Fraction, Fraction]:
    """Rational bracket of sqrt(d) of width 2^-bits."""
    if d < 2:
        raise ParameterError("radicand must be at least 2")
    s = isqrt(d << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


# ---------------------------------------------------------------------------
# line targets


@dataclass(frozen=True)
class RationalLineTarget:
    """Line through (1, s) whose slope s lies in [value, value + tail_upper].

    A zero tail pins the slope exactly; a positive tail represents a slope
    known only through a truncated series with a certified remainder bound.
    """

    value: Fraction
    tail_upper: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.tail_upper < 0:
            raise ParameterError("tail bound must be nonnegative")

    def slope_bracket(self) -> tuple[Fraction, Fraction]:
        return self.value, self.value + self.tail_upper


@dataclass(frozen=True)
class QuadraticLineTarget:
    """Line through (1, a + b sqrt(d)) with an exact quadratic irrational slope.

    Cross terms stay inside the quadratic field, so record comparisons and
    zero tests are exact sign computations; no precision parameter exists.
    """

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self) -> None:
        if self.b == 0:
            raise ParameterError("quadratic slope needs a nonzero irrational part")
        if self.d < 2 or isqrt(self.d) ** 2 == self.d:
            raise ParameterError("radicand must be a nonsquare integer >= 2")

    def slope(self) -> QuadraticValue:
        return QuadraticValue(self.a, self.b, self.d)

    def slope_bracket(self) -> tuple[Fraction, Fraction]:
        return self.slope().bracket(*root_bracket(self.d))


def golden_line_target() -> QuadraticLineTarget:
    """The line of slope (1 + sqrt(5)) / 2."""
    return QuadraticLineTarget(Fraction(1, 2), Fraction(1, 2), 5)


def line_target_for_instance(
    params: ConstructionParams,
    height_squared_max: int | None = None,
    depth: int | None = None,
    stream=None,
) -> RationalLineTarget:
    """Truncated-series line target for a one-dimensional instance.

    When depth is omitted it is chosen so that the slope bracket, widened
    across the whole scan range, stays far below the candidate margin.
    """
    if params.ell != 1:
        raise ParameterError("series instances define a line target only when ell = 1")
    stream = stream if stream is not None else stream_for(params)
    if depth is None:
        if height_squared_max is None:
            raise ParameterError("need either a depth or a height bound")
        bound = Fraction(1, (isqrt(height_squared_max) + 1) << 64)
        depth = series_start(params)
        while tail_bound(params, depth) > bound:
            depth += 1
    trunc = xi_truncation(stream, 1, 1, depth, params)
    return RationalLineTarget(value=trunc.value, tail_upper=trunc.tail_upper)


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ApproximationRecord:
    """A record approximant: the subspace with the smallest j-th proximity
    sine among all enumerated subspaces of height up to its own.

    psi_lo and psi_hi bracket the sine conservatively (outward-rounded
    floats); source is "enumerated" or "constructed:N".
    """

    subspace: exact.RationalSubspace
    height_squared: int
    psi_lo: float
    psi_hi: float
    j_index: int
    source: str = SOURCE_ENUMERATED


def validate_record_list(records: Sequence[ApproximationRecord]) -> None:
    """Check the record-list shape: heights strictly up, sines strictly down."""
    for rec in records:
        if not (0.0 <= rec.psi_lo <= rec.psi_hi):
            raise SubdiophError(f"malformed sine interval on record {rec}")
    for prev, cur in zip(records, records[1:]):
        if cur.height_squared <= prev.height_squared:
            raise SubdiophError("record heights must increase strictly")
        if cur.psi_hi >= prev.psi_hi:
            raise SubdiophError("record sine bounds must decrease strictly")


def widen_records(
    records: Sequence[ApproximationRecord], tau: float
) -> list[ApproximationRecord]:
    """Widen every sine interval by an additive slack (target substitution)."""
    if tau < 0:
        raise ParameterError("slack must be nonnegative")
    return [
        replace(r, psi_lo=max(0.0, r.psi_lo - tau), psi_hi=r.psi_hi + tau)
        for r in records
    ]


def _sqrt_interval(lo: Fraction, hi: Fraction) -> tuple[float, float]:
    """Conservative float bracket of [sqrt(lo), sqrt(hi)] for 0 <= lo <= hi."""
    f_lo = math.sqrt(max(0.0, math.nextafter(float(lo), 0.0)))
    f_hi = math.sqrt(math.nextafter(float(hi), math.inf))
    return max(0.0, math.nextafter(f_lo, 0.0)), math.nextafter(f_hi, math.inf)


def _float_down(x) -> float:
    return max(0.0, math.nextafter(float(x), 0.0))


def _float_up(x) -> float:
    return math.nextafter(float(x), math.inf)


# ---------------------------------------------------------------------------
# exact line scanner

# One pooled candidate is (h2, vector, key, lo2, hi2):
#   key    exact comparison object for the squared ambient cross term,
#          a Fraction (rational slopes) or a QuadraticValue;
#   lo2/hi2  rational bracket of the same quantity.


class _RationalCross:
    """Cross-term evaluator for a slope known through a rational bracket."""

    def __init__(self, target: RationalLineTarget):
        self.s_lo, self.s_hi = target.slope_bracket()
        self.exact_slope = target.tail_upper == 0
        self.u2_lo, self.u2_hi = _one_plus_square_bracket(self.s_lo, self.s_hi)
        self.u2_key = self.u2_hi

    def cross2(self, x1: int, x2: int) -> tuple[Fraction, Fraction, Fraction]:
        e_lo = x1 * self.s_lo - x2
        e_hi = x1 * self.s_hi - x2
        if e_lo >= 0:
            lo2, hi2 = e_lo * e_lo, e_hi * e_hi
        elif e_hi <= 0:
            lo2, hi2 = e_hi * e_hi, e_lo * e_lo
        else:
            lo2, hi2 = Fraction(0), max(e_lo * e_lo, e_hi * e_hi)
        key = lo2 if self.exact_slope else hi2
        return key, lo2, hi2

    @staticmethod
    def is_zero(key) -> bool:
        return key == 0

    @staticmethod
    def less(key_a, h2_a: int, key_b, h2_b: int) -> bool:
        return key_a * h2_b < key_b * h2_a

    def ambient(self, key, lo2, hi2, z2: int):
        if z2 == 0:
            return key, lo2, hi2
        return (
            key + z2 * self.u2_key,
            lo2 + z2 * self.u2_lo,
            hi2 + z2 * self.u2_hi,
        )


class _QuadraticCross:
    """Cross-term evaluator for an exact quadratic irrational slope."""

    def __init__(self, target: QuadraticLineTarget):
        self.d = target.d
        self.root = root_bracket(self.d)
        self.slope = target.slope()
        self.s_lo, self.s_hi = self.slope.bracket(*self.root)
        one = QuadraticValue(Fraction(1), Fraction(0), self.d)
        self.u2_exact = one + self.slope.squared()
        self.u2_lo, self.u2_hi = self.u2_exact.bracket(*self.root)

    def cross2(self, x1: int, x2: int):
        p = x1 * self.slope.a - x2
        q = x1 * self.slope.b
        key = QuadraticValue(p * p + q * q * self.d, 2 * p * q, self.d)
        lo2, hi2 = key.bracket(*self.root)
        return key, max(Fraction(0), lo2), hi2

    @staticmethod
    def is_zero(key: QuadraticValue) -> bool:
        return key.a == 0 and key.b == 0

    @staticmethod
    def less(key_a: QuadraticValue, h2_a: int, key_b: QuadraticValue, h2_b: int) -> bool:
        return (key_a.scaled(h2_b) - key_b.scaled(h2_a)).sign() < 0

    def ambient(self, key, lo2, hi2, z2: int):
        if z2 == 0:
            return key, lo2, hi2
        return (
            key + self.u2_exact.scaled(z2),
            lo2 + z2 * self.u2_lo,
            hi2 + z2 * self.u2_hi,
        )


def _one_plus_square_bracket(s_lo: Fraction, s_hi: Fraction) -> tuple[Fraction, Fraction]:
    if s_lo >= 0:
        return 1 + s_lo * s_lo, 1 + s_hi * s_hi
    if s_hi <= 0:
        return 1 + s_hi * s_hi, 1 + s_lo * s_lo
    return Fraction(1), 1 + max(s_lo * s_lo, s_hi * s_hi)


def _cross_engine(target) -> "_RationalCross | _QuadraticCross":
    if isinstance(target, RationalLineTarget):
        return _RationalCross(target)
    if isinstance(target, QuadraticLineTarget):
        return _QuadraticCross(target)
    raise ParameterError("fast scans need a rational or quadratic line target")


def _check_bracket_width(engine, hmax2: int) -> None:
    width = engine.s_hi - engine.s_lo
    if width * (isqrt(hmax2) + 1) > _BRACKET_ALLOWANCE:
        raise ParameterError(
            "slope bracket too wide for the candidate margin; deepen the truncation"
        )


def _rounding_candidates(engine, hmax2: int, skip_below: int) -> Iterator[tuple[int, int, int]]:
    """(h2, x1, x2) for x2 within the rounding window of x1 * slope."""
    mid = (engine.s_lo + engine.s_hi) / 2
    for x1 in range(1, isqrt(hmax2) + 1):
        xhat = round(x1 * mid)
        for dx in range(-_CANDIDATE_HALF_WIDTH, _CANDIDATE_HALF_WIDTH + 1):
            x2 = xhat + dx
            h2 = x1 * x1 + x2 * x2
            if h2 > hmax2 or h2 <= skip_below:
                continue
            if gcd(x1, x2) != 1:
                continue
            yield h2, x1, x2


def _sweep_pool(pool: list, engine) -> list[tuple[int, tuple, object, Fraction, Fraction]]:
    """Running minima of key/h2 over a (h2, vec, key, lo2, hi2) pool.

    The pool must be sorted; within one height the candidate with the
    smallest exact key wins, ties broken by the sort order.
    """
    raw = []
    best_key = None
    best_h2 = None
    i = 0
    while i < len(pool):
        h2 = pool[i][0]
        g = pool[i]
        j = i + 1
        while j < len(pool) and pool[j][0] == h2:
            if engine.less(pool[j][2], h2, g[2], h2):
                g = pool[j]
            j += 1
        if best_key is None or engine.less(g[2], h2, best_key, best_h2):
            raw.append(g)
            best_key, best_h2 = g[2], h2
        i = j
    return raw


def _records_from_raw(
    raw: list, engine, j_index: int
) -> list[ApproximationRecord]:
    records = []
    for h2, vec, _key, lo2, hi2 in raw:
        psi_lo, psi_hi = _sqrt_interval(
            lo2 / (h2 * engine.u2_hi), hi2 / (h2 * engine.u2_lo)
        )
        sub = exact.RationalSubspace.from_basis([[c] for c in vec])
        records.append(
            ApproximationRecord(
                subspace=sub,
                height_squared=h2,
                psi_lo=psi_lo,
                psi_hi=psi_hi,
                j_index=j_index,
                source=SOURCE_ENUMERATED,
            )
        )
    return records


def _raise_meeting(vec: tuple[int, ...]) -> None:
    err = IrrationalityViolationError(
        f"enumerated line {vec} meets the target exactly"
    )
    err.vector = vec
    raise err


def _scan_plane_lines(
    target, hmax2: int, zone: int
) -> tuple[list[ApproximationRecord], int]:
    """Certified record scan over every primitive line in the plane.

    Lines inside the exhaustive zone are enumerated outright; beyond it only
    rounding candidates are examined, and a per-record certificate shows no
    skipped vector can undercut the running minimum.
    """
    if hmax2 < 1:
        raise ParameterError("height bound must be positive")
    engine = _cross_engine(target)
    _check_bracket_width(engine, hmax2)
    zone = max(2, min(zone, hmax2))

    pool = []
    for vec, h2 in primitive_vectors(2, zone):
        key, lo2, hi2 = engine.cross2(vec[0], vec[1])
        if engine.is_zero(key):
            _raise_meeting(vec)
        pool.append((h2, vec, key, lo2, hi2))
    for h2, x1, x2 in _rounding_candidates(engine, hmax2, skip_below=zone):
        key, lo2, hi2 = engine.cross2(x1, x2)
        if engine.is_zero(key):
            _raise_meeting((x1, x2))
        pool.append((h2, (x1, x2), key, lo2, hi2))
    pool.sort(key=lambda row: (row[0], row[1]))

    raw = _sweep_pool(pool, engine)
    margin2 = _MARGIN * _MARGIN
    for idx, (h2, _vec, _key, _lo2, hi2) in enumerate(raw):
        window = raw[idx + 1][0] if idx + 1 < len(raw) else hmax2
        if window <= zone:
            continue
        # non-candidates at squared height up to the window satisfy
        # psi >= margin / (sqrt(window) * |u|); the record must beat that
        if hi2 * window * engine.u2_hi > margin2 * h2 * engine.u2_lo:
            raise ScanIncompleteError(
                f"record at squared height {h2} is not certified up to {window};"
                " raise the exhaustive zone"
            )
    return _records_from_raw(raw, engine, j_index=1), len(pool)


def _scan_embedded_lines(
    target,
    n: int,
    hmax2: int,
    axes: tuple[int, int],
    zone: int,
    ambient_zone: int,
) -> tuple[list[ApproximationRecord], int]:
    """Certified record scan over all primitive lines in n-space against the
    image of a plane line target under a coordinate embedding.

    In-plane vectors reuse the plane candidates; any vector with a component
    off the embedded plane keeps sine at least 1 / height, so beyond a small
    exhaustive ambient zone the in-plane records dominate provably.
    """
    if n < 3:
        raise ParameterError("embedded scans need an ambient dimension above 2")
    i0, i1 = axes
    if not (0 <= i0 < i1 < n):
        raise ParameterError("embedding axes must be increasing and in range")
    if hmax2 < 1:
        raise ParameterError("height bound must be positive")
    engine = _cross_engine(target)
    _check_bracket_width(engine, hmax2)
    zone = max(2, min(zone, hmax2))
    ambient_zone = max(2, min(ambient_zone, hmax2))
    if zone < ambient_zone:
        raise ParameterError("plane zone must contain the ambient zone")

    def embed(x1: int, x2: int) -> tuple[int, ...]:
        vec = [0] * n
        vec[i0] = x1
        vec[i1] = x2
        return tuple(vec)

    pool = []
    for vec, h2 in primitive_vectors(2, zone):
        key, lo2, hi2 = engine.cross2(vec[0], vec[1])
        if engine.is_zero(key):
            _raise_meeting(embed(*vec))
        pool.append((h2, embed(*vec), key, lo2, hi2))
    for h2, x1, x2 in _rounding_candidates(engine, hmax2, skip_below=zone):
        key, lo2, hi2 = engine.cross2(x1, x2)
        if engine.is_zero(key):
            _raise_meeting(embed(x1, x2))
        pool.append((h2, embed(x1, x2), key, lo2, hi2))
    if n > 2:
        for vec, h2 in primitive_vectors(n, ambient_zone):
            z2 = h2 - vec[i0] * vec[i0] - vec[i1] * vec[i1]
            if z2 == 0:
                continue
            key, lo2, hi2 = engine.cross2(vec[i0], vec[i1])
            key, lo2, hi2 = engine.ambient(key, lo2, hi2, z2)
            pool.append((h2, vec, key, lo2, hi2))
    pool.sort(key=lambda row: (row[0], row[1]))

    raw = _sweep_pool(pool, engine)
    margin2 = _MARGIN * _MARGIN
    for idx, (h2, _vec, _key, _lo2, hi2) in enumerate(raw):
        window = raw[idx + 1][0] if idx + 1 < len(raw) else hmax2
        if window <= ambient_zone:
            continue
        # off-plane vectors keep psi >= 1 / sqrt(height^2)
        psi2_hi_scaled = hi2 * window  # compare against h2 * u2_lo
        if psi2_hi_scaled > h2 * engine.u2_lo:
            raise ScanIncompleteError(
                f"record at squared height {h2} not certified against off-plane"
                f" vectors up to {window}; raise the ambient zone"
            )
        if window <= zone:
            continue
        if hi2 * window * engine.u2_hi > margin2 * h2 * engine.u2_lo:
            raise ScanIncompleteError(
                f"record at squared height {h2} is not certified up to {window};"
                " raise the exhaustive zone"
            )
    return _records_from_raw(raw, engine, j_index=1), len(pool)


def scan_line_records(
    target, height_squared_max: int, zone: int = DEFAULT_ZONE
) -> list[ApproximationRecord]:
    """Records of every primitive plane line against a line target."""
    records, _ = _scan_plane_lines(target, height_squared_max, zone)
    return records


def scan_embedded_line_records(
    target,
    n: int,
    height_squared_max: int,
    axes: tuple[int, int] = (0, 1),
    zone: int = DEFAULT_ZONE,
    ambient_zone: int = DEFAULT_AMBIENT_ZONE,
) -> list[ApproximationRecord]:
    """Records of every primitive line in n-space against an embedded target."""
    if n == 2 and axes == (0, 1):
        return scan_line_records(target, height_squared_max, zone=zone)
    records, _ = _scan_embedded_lines(
        target, n, height_squared_max, axes, zone, ambient_zone
    )
    return records


# ---------------------------------------------------------------------------
# generic scanner


def _coerce_target(target) -> RealBasis:
    if isinstance(target, RealBasis):
        return target
    if isinstance(target, exact.RationalSubspace):
        return RealBasis.from_subspace(target)
    rows = [list(row) for row in target]
    if any(isinstance(v, float) for row in rows for v in row):
        return RealBasis.from_float(rows)
    return RealBasis.from_exact(rows)


def _iter_enumeration(spec) -> Iterator[exact.RationalSubspace]:
    if isinstance(spec, EnumSpec):
        return enumerate_subspaces(spec)
    return iter(spec)


def scan_records(
    target,
    spec,
    j_index: int = 1,
    ctx: PrecisionContext | None = None,
    zone: int = DEFAULT_ZONE,
) -> list[ApproximationRecord]:
    """Record scan of an enumeration stream against a target span.

    Line targets paired with a plane window take the certified fast path,
    which always covers every primitive line up to the bound.  Otherwise
    every enumerated subspace gets an adaptive angle interval and the
    running minimum is taken over the upper endpoints; an interval stuck at
    zero raises IrrationalityViolationError.  spec may be an EnumSpec or any
    iterable of rational subspaces (shard outputs can be chained; the sweep
    sorts by height, so merging scans is an order-independent min-reduction).
    """
    if isinstance(target, (RationalLineTarget, QuadraticLineTarget)):
        if not isinstance(spec, EnumSpec):
            raise ParameterError("fast line scans need an EnumSpec window")
        if (spec.n, spec.e) != (2, 1):
            raise StrategyMismatchError("line targets scan lines in the plane")
        if j_index != 1:
            raise ParameterError("a line has a single proximity sine")
        return scan_line_records(target, spec.height_squared_max, zone=zone)

    basis = _coerce_target(target)
    pool = []
    for sub in _iter_enumeration(spec):
        limit = min(basis.d, sub.e)
        if not 1 <= j_index <= limit:
            raise ParameterError(
                f"sine index {j_index} is out of range for {limit} angles"
            )
        prof = angles_adaptive(basis, RealBasis.from_subspace(sub), ctx)
        if not prof.resolved[j_index - 1]:
            err = IrrationalityViolationError(
                f"subspace {sub.pluecker.coords} is indistinguishable from the"
                " target at the precision cap"
            )
            err.subspace = sub
            raise err
        pool.append(
            (
                sub.pluecker.height_squared,
                prof.hi[j_index - 1],
                prof.lo[j_index - 1],
                sub.pluecker.coords,
                sub,
            )
        )
    pool.sort(key=lambda row: (row[0], row[1], row[3]))

    records = []
    best_hi = None
    i = 0
    while i < len(pool):
        h2, hi, lo, _coords, sub = pool[i]
        if best_hi is None or hi < best_hi:
            records.append(
                ApproximationRecord(
                    subspace=sub,
                    height_squared=h2,
                    psi_lo=_float_down(lo),
                    psi_hi=_float_up(hi),
                    j_index=j_index,
                    source=SOURCE_ENUMERATED,
                )
            )
            best_hi = hi
        j = i + 1
        while j < len(pool) and pool[j][0] == h2:
            j += 1
        i = j
    return records


# ---------------------------------------------------------------------------
# exponent estimation


@dataclass(frozen=True)
class ExponentEstimate:
    """Empirical approximation exponent read off a record list.

    Each usable record (squared height above 1) contributes
    beta_i = -2 log(psi_hi_i) / log(H^2_i); the estimate is the largest beta
    over the trailing half of the list, where transient small-height effects
    have decayed.  window holds the squared-height span of that tail.
    """

    mu_hat: float
    per_record: tuple[float, ...]
    window: tuple[int, int]
    used: tuple[ApproximationRecord, ...]
    diagnostics: Mapping

    def summary(self) -> dict:
        return {
            "muHat": self.mu_hat,
            "recordCount": self.diagnostics["count"],
            "window": list(self.window),
            "burnIn": self.diagnostics.get("burn_in"),
        }


def estimate_exponent(
    records: Sequence[ApproximationRecord], burn_in: int | None = None
) -> ExponentEstimate:
    """Fit the empirical exponent from a record list (upper sine endpoints)."""
    usable = [r for r in records if r.height_squared > 1]
    if len(usable) < 2:
        raise InsufficientRecordsError(
            "need at least two records of squared height above 1"
        )
    for r in usable:
        if r.psi_hi <= 0.0:
            err = IrrationalityViolationError(
                "a record sine upper bound is zero; the exponent is unbounded"
            )
            err.subspace = r.subspace
            raise err
    betas = tuple(
        -2.0 * math.log(r.psi_hi) / math.log(r.height_squared) for r in usable
    )
    tail = (len(betas) + 1) // 2
    mu_hat = max(betas[-tail:])
    secants = tuple(
        -2.0
        * (math.log(b.psi_hi) - math.log(a.psi_hi))
        / (math.log(b.height_squared) - math.log(a.height_squared))
        for a, b in zip(usable, usable[1:])
    )
    diagnostics = {
        "count": len(records),
        "used": len(usable),
        "tail": tail,
        "height_squared_range": (
            records[0].height_squared,
            records[-1].height_squared,
        ),
        "secant_slopes": secants,
        "burn_in": burn_in,
    }
    return ExponentEstimate(
        mu_hat=mu_hat,
        per_record=betas,
        window=(usable[len(usable) - tail].height_squared, usable[-1].height_squared),
        used=tuple(usable),
        diagnostics=diagnostics,
    )


def records_from_certification(
    cert: InstanceCertification, stream=None
) -> list[ApproximationRecord]:
    """Convert certified convergents into construction-sourced records."""
    stream = stream if stream is not None else stream_for(cert.params)
    records = []
    for rec in cert.records:
        conv = build_convergent(cert.params, rec.n_index, stream)
        records.append(
            ApproximationRecord(
                subspace=conv.subspace,
                height_squared=rec.height_squared,
                psi_lo=rec.psi_lo,
                psi_hi=rec.psi_hi,
                j_index=cert.params.ell,
                source=constructed_source(rec.n_index),
            )
        )
    return records


# ---------------------------------------------------------------------------
# exclusivity of construction convergents among records


def height_ratio_deviations(
    params: ConstructionParams,
    nmax: int,
    stream=None,
    depth: int | None = None,
) -> tuple[tuple[ConvergentMatrix, float], ...]:
    """Per-index deviation of H(B_N) / base^(l m_N) from its limit value.

    The limit is the square root of the exact squared l-volume of the
    depth-truncated generators; deviations are returned as floats.
    """
    stream = stream if stream is not None else stream_for(params)
    depth = depth if depth is not None else nmax + 2
    gens = build_generators(params, depth, stream)
    limit2 = gens.gram_squared()
    base = INFINITE_BASE if params.variant == INFINITE else params.theta
    exps = term_exponents(params, nmax)
    out = []
    with mp.workprec(256):
        limit = mp.sqrt(mp.mpf(limit2.numerator) / mp.mpf(limit2.denominator))
        for n_index in range(1, nmax + 1):
            conv = build_convergent(params, n_index, stream)
            ratio2 = Fraction(conv.height_squared, base ** (2 * params.ell * exps[n_index]))
            ratio = mp.sqrt(mp.mpf(ratio2.numerator) / mp.mpf(ratio2.denominator))
            dev = abs(ratio / limit - 1)
            out.append((conv, float(dev)))
    return tuple(out)


@dataclass(frozen=True)
class ExclusivityReport:
    """Outcome of matching scan records against construction convergents.

    Burn-in is the first index whose height ratio sits within the stated
    tolerance of its limit; only records at or beyond that height are judged.
    A record is an interloper when it is not a convergent yet its quality
    product psi_hi * H^(alpha/l) stays within the band spanned by the
    convergents' own products (factor 10 by default).  For the infinite
    variant the judgment is positional: within a +-25% height window around
    each in-range convergent, the best record must be that convergent.
    """

    params: ConstructionParams
    nmax: int
    window: tuple[int, int]
    deviations: tuple[float, ...]
    burn_in_index: int | None
    burn_in_height_squared: int | None
    records: tuple[ApproximationRecord, ...]
    matched: tuple[tuple[int, int], ...]
    products: tuple[float, ...]
    band: float | None
    interlopers: tuple[int, ...]
    ok: bool

    def as_dict(self) -> dict:
        return {
            "nmax": self.nmax,
            "window": list(self.window),
            "burnIn": self.burn_in_index,
            "burnInHeightSquared": self.burn_in_height_squared,
            "deviations": [f"{d:.6e}" for d in self.deviations],
            "recordCount": len(self.records),
            "matched": [list(pair) for pair in self.matched],
            "band": self.band,
            "interlopers": list(self.interlopers),
            "ok": self.ok,
        }


def exclusivity_check(
    params: ConstructionParams,
    nmax: int,
    spec: EnumSpec,
    ctx: PrecisionContext | None = None,
    zone: int = DEFAULT_ZONE,
    band_factor: float = 10.0,
    deviation_tol: float = 0.1,
    prefer_fast: bool = True,
) -> ExclusivityReport:
    """Check that beyond burn-in only convergents set competitive records."""
    if nmax < 1:
        raise ParameterError("need at least one convergent index")
    if (spec.n, spec.e) != (params.n, params.ell):
        raise ParameterError(
            "enumeration shape must match the instance: (n, e) = (2l, l)"
        )
    stream = stream_for(params)
    devs = height_ratio_deviations(params, nmax, stream)
    burn_in_index = None
    burn_in_h2 = None
    for n_index, (_conv, dev) in enumerate(devs, start=1):
        if dev <= deviation_tol:
            burn_in_index = n_index
            burn_in_h2 = devs[n_index - 1][0].height_squared
            break

    if prefer_fast and params.ell == 1 and spec.strategy == EXACT_LINES:
        target = line_target_for_instance(
            params, height_squared_max=spec.height_squared_max, stream=stream
        )
        records = scan_line_records(target, spec.height_squared_max, zone=zone)
    else:
        depth = nmax + 2
        gens = build_generators(params, depth, stream)
        records = scan_records(
            gens.real_basis(), spec, j_index=params.ell, ctx=ctx, zone=zone
        )
        records = widen_records(records, _float_up(gens.angle_slack))

    by_coords = {
        conv.subspace.pluecker.coords: n_index
        for n_index, (conv, _dev) in enumerate(devs, start=1)
    }
    matched = tuple(
        (pos, by_coords[rec.subspace.pluecker.coords])
        for pos, rec in enumerate(records)
        if rec.subspace.pluecker.coords in by_coords
    )
    matched_positions = {pos for pos, _n in matched}

    if params.variant == INFINITE:
        products: tuple[float, ...] = ()
        band = None
        interlopers = []
        covered = []
        for n_index, (conv, _dev) in enumerate(devs, start=1):
            h2 = conv.height_squared
            if h2 > spec.height_squared_max:
                continue
            lo_w = (3 * h2) // 4
            hi_w = min((5 * h2) // 4, spec.height_squared_max)
            window_records = [
                (pos, rec)
                for pos, rec in enumerate(records)
                if lo_w <= rec.height_squared <= hi_w
            ]
            if not window_records:
                covered.append(False)
                continue
            best_pos = min(window_records, key=lambda pr: pr[1].psi_hi)[0]
            hit = (best_pos, n_index) in matched
            covered.append(hit)
            if not hit:
                interlopers.append(best_pos)
        ok = bool(covered) and all(covered) and burn_in_index is not None
    else:
        beta_f = float(params.beta)
        products = tuple(
            rec.psi_hi * rec.height_squared ** (beta_f / 2.0) for rec in records
        )
        band = None
        interlopers = []
        if burn_in_h2 is not None:
            anchor = [
                products[pos]
                for pos, _n in matched
                if records[pos].height_squared >= burn_in_h2
            ]
            if anchor:
                band = band_factor * max(anchor)
                interlopers = [
                    pos
                    for pos, rec in enumerate(records)
                    if rec.height_squared >= burn_in_h2
                    and pos not in matched_positions
                    and products[pos] <= band
                ]
        ok = band is not None and not interlopers

    return ExclusivityReport(
        params=params,
        nmax=nmax,
        window=(1, spec.height_squared_max),
        deviations=tuple(dev for _conv, dev in devs),
        burn_in_index=burn_in_index,
        burn_in_height_squared=burn_in_h2,
        records=tuple(records),
        matched=matched,
        products=products,
        band=band,
        interlopers=tuple(interlopers),
        ok=ok,
    )


# ---------------------------------------------------------------------------
# irrationality witnesses


@dataclass(frozen=True)
class IrrationalityReport:
    """Finite-height irrationality witness from a record scan.

    min_psi_lower is the least certified lower endpoint of the j-th sine over
    every subspace in the window; a positive value shows the target stays a
    positive angle away from all of them.  offender is set when some subspace
    is indistinguishable from the target.
    """

    j_index: int
    scanned: int
    certified_exhaustive: bool
    min_psi_lower: float
    witness: exact.RationalSubspace | None
    offender: exact.RationalSubspace | None
    ok: bool

    def as_dict(self) -> dict:
        return {
            "jIndex": self.j_index,
            "scanned": self.scanned,
            "certifiedExhaustive": self.certified_exhaustive,
            "minPsiLower": self.min_psi_lower,
            "witness": None if self.witness is None else list(self.witness.pluecker.coords),
            "offender": None
            if self.offender is None
            else list(self.offender.pluecker.coords),
            "ok": self.ok,
        }


def irrationality_scan(
    target,
    spec,
    j_index: int = 1,
    ctx: PrecisionContext | None = None,
    zone: int = DEFAULT_ZONE,
) -> IrrationalityReport:
    """Scan a window for the least certified angle against the target."""
    if isinstance(target, (RationalLineTarget, QuadraticLineTarget)):
        if not isinstance(spec, EnumSpec):
            raise ParameterError("fast line scans need an EnumSpec window")
        if (spec.n, spec.e) != (2, 1):
            raise StrategyMismatchError("line targets scan lines in the plane")
        try:
            records, scanned = _scan_plane_lines(
                target, spec.height_squared_max, zone=min(zone, spec.height_squared_max)
            )
        except IrrationalityViolationError as err:
            offender = exact.RationalSubspace.from_basis([[c] for c in err.vector])
            return IrrationalityReport(
                j_index=1,
                scanned=0,
                certified_exhaustive=True,
                min_psi_lower=0.0,
                witness=None,
                offender=offender,
                ok=False,
            )
        last = records[-1]
        return IrrationalityReport(
            j_index=1,
            scanned=scanned,
            certified_exhaustive=True,
            min_psi_lower=last.psi_lo,
            witness=last.subspace,
            offender=None,
            ok=last.psi_lo > 0.0,
        )

    basis = _coerce_target(target)
    exhaustive = not (isinstance(spec, EnumSpec) and spec.strategy == BASIS_BOX)
    min_lo = None
    witness = None
    scanned = 0
    for sub in _iter_enumeration(spec):
        limit = min(basis.d, sub.e)
        if not 1 <= j_index <= limit:
            raise ParameterError(
                f"sine index {j_index} is out of range for {limit} angles"
            )
        scanned += 1
        prof = angles_adaptive(basis, RealBasis.from_subspace(sub), ctx)
        if not prof.resolved[j_index - 1]:
            return IrrationalityReport(
                j_index=j_index,
                scanned=scanned,
                certified_exhaustive=exhaustive,
                min_psi_lower=0.0,
                witness=None,
                offender=sub,
                ok=False,
            )
        lo = prof.lo[j_index - 1]
        if min_lo is None or lo < min_lo:
            min_lo = lo
            witness = sub
    if min_lo is None:
        raise InsufficientRecordsError("the enumeration window is empty")
    return IrrationalityReport(
        j_index=j_index,
        scanned=scanned,
        certified_exhaustive=exhaustive,
        min_psi_lower=_float_down(min_lo),
        witness=witness,
        offender=None,
        ok=min_lo > 0,
    )
