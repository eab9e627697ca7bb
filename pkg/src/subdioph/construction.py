"""Explicit well-approximable subspace families with certified finite data.

The targets live in R^(2l): the column span of a block matrix carrying the
l x l identity on top and, at the bottom, an l x l matrix whose entries are
lacunary base-theta digit series.  Because the series converge extremely
fast, the integer matrices built from their partial sums span rational
subspaces that approach the target at a prescribed rate, which makes the
family a concrete testbed for proximity-versus-height measurements.

This module materializes the family exactly: admissibility thresholds for
the growth ratio, the prime base, deterministic digit streams, truncations
with certified tail bounds, the integer convergent matrices, and a
per-index certification report covering every inequality that is checkable
at finite index.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import sympy
from mpmath import mp

from . import exact
from .angles import AngleProfile, PrecisionContext, RealBasis, angles_adaptive
from .errors import CertificationFailure, ParameterError

FINITE = "finite"
INFINITE = "infinite"
INFINITE_BASE = 3

__all__ = [
    "FINITE",
    "INFINITE",
    "INFINITE_BASE",
    "QuadraticThreshold",
    "beta_threshold",
    "theta_lower_bound",
    "theta_for",
    "theta_is_admissible",
    "ConstructionParams",
    "SeededDigitStream",
    "FixedDigitStream",
    "stream_for",
    "floor_alpha_powers",
    "term_exponents",
    "series_start",
    "tail_bound",
    "TruncatedXi",
    "xi_truncation",
    "TruncatedGenerators",
    "build_generators",
    "ConvergentMatrix",
    "build_convergent",
    "build_infinite_convergent",
    "ConvergentCertificate",
    "InstanceCertification",
    "certify_instance",
    "params_to_descriptor",
    "params_from_descriptor",
]


@dataclass(frozen=True)
class QuadraticThreshold:
    """Exact value of the form rational + sqrt(radicand), radicand > 0.

    Comparisons against rationals are done by squaring, so admissibility
    decisions never touch floating point.
    """

    rational: Fraction
    radicand: Fraction

    def admits(self, value: Fraction | int) -> bool:
        """True when value >= rational + sqrt(radicand), decided exactly."""
        value = Fraction(value)
        diff = value - self.rational
        if diff < 0:
            return False
        return diff * diff >= self.radicand

    def __float__(self) -> float:
        return float(self.rational) + math.sqrt(float(self.radicand))


def beta_threshold(ell: int) -> QuadraticThreshold:
    """Smallest admissible growth ratio for block dimension ell.

    The value is 1 + 1/(2 ell) + sqrt(1 + 1/(4 ell^2)); it decreases to 2
    as ell grows and equals (3 + sqrt(5))/2 at ell = 1.
    """
    _check_ell(ell)
    return QuadraticThreshold(
        rational=1 + Fraction(1, 2 * ell),
        radicand=1 + Fraction(1, 4 * ell * ell),
    )


def theta_lower_bound(ell: int) -> int:
    """Strict lower bound the prime base must exceed: ell! * (2 ell + 1)^ell."""
    _check_ell(ell)
    return math.factorial(ell) * (2 * ell + 1) ** ell


def theta_for(ell: int) -> int:
    """Smallest prime strictly above theta_lower_bound(ell)."""
    return int(sympy.nextprime(theta_lower_bound(ell)))


def theta_is_admissible(theta: int, ell: int) -> bool:
    """True when theta is prime and exceeds the required lower bound."""
    return theta > theta_lower_bound(ell) and bool(sympy.isprime(theta))


def _check_ell(ell: int) -> None:
    if not isinstance(ell, int) or ell < 1:
        raise ParameterError("block dimension ell must be an integer >= 1")


@dataclass(frozen=True)
class ConstructionParams:
    """Validated parameters of one instance of the family.

    ell is the block dimension (the ambient space is R^(2 ell)); beta is the
    exact rational growth ratio (None for the infinite variant, whose series
    uses exponents k^k in base 3); theta is the prime base; seed keys the
    digit stream; variant selects the exponent schedule.
    """

    ell: int
    beta: Fraction | None
    theta: int
    seed: int
    variant: str = FINITE

    @property
    def n(self) -> int:
        return 2 * self.ell

    @property
    def alpha(self) -> Fraction:
        """Exponent-schedule ratio ell * beta (finite variant only)."""
        if self.variant != FINITE or self.beta is None:
            raise ParameterError("the infinite variant has no finite ratio")
        return self.ell * self.beta

    @classmethod
    def create(
        cls,
        ell: int,
        beta: Fraction | int | str | float | None,
        theta: int | None = None,
        seed: int = 0,
        variant: str = FINITE,
    ) -> "ConstructionParams":
        """Validate and normalize parameters.

        For the finite variant beta must be a rational at or above
        beta_threshold(ell), and theta (default: theta_for(ell)) must be a
        prime above theta_lower_bound(ell).  For the infinite variant beta
        must be absent (None, "inf" or an infinite float) and the base is
        fixed at 3.
        """
        _check_ell(ell)
        if variant not in (FINITE, INFINITE):
            raise ParameterError(f"unknown variant {variant!r}")
        if not isinstance(seed, int):
            raise ParameterError("seed must be an integer")

        if variant == INFINITE:
            if isinstance(beta, str) and beta.strip().lower() in ("inf", "infinity"):
                beta = None
            if isinstance(beta, float) and math.isinf(beta):
                beta = None
            if beta is not None:
                raise ParameterError("the infinite variant takes no finite beta")
            if theta not in (None, INFINITE_BASE):
                raise ParameterError("the infinite variant uses base 3")
            return cls(ell=ell, beta=None, theta=INFINITE_BASE, seed=seed, variant=INFINITE)

        if beta is None or (isinstance(beta, float) and math.isinf(beta)):
            raise ParameterError("a finite rational beta is required; use variant='infinite' otherwise")
        beta = Fraction(beta)
        if not beta_threshold(ell).admits(beta):
            raise ParameterError(
                "beta below admissible threshold "
                "(1 + 1/(2*ell) + sqrt(1 + 1/(4*ell^2)))"
            )
        if theta is None:
            theta = theta_for(ell)
        elif not theta_is_admissible(theta, ell):
            raise ParameterError(
                f"theta={theta} must be a prime exceeding "
                f"ell! * (2*ell+1)^ell = {theta_lower_bound(ell)}"
            )
        return cls(ell=ell, beta=beta, theta=int(theta), seed=seed, variant=FINITE)


# ---------------------------------------------------------------------------
# digit streams


def _digit_values(params: ConstructionParams, i: int, j: int) -> tuple[int, int]:
    """Admissible digit pair at entry (i, j) for the given variant."""
    if params.variant == INFINITE or i != j:
        return (1, 2)
    return (2 * params.ell, 2 * params.ell + 1)


class SeededDigitStream:
    """Deterministic digit source keyed by (seed, entry, index).

    Each read hashes the packed tuple (seed, i, j, k) with SHA-256 and uses
    one bit of the digest to pick between the two admissible digit values,
    so sequences are stable across platforms, processes and runs.  Row and
    column indices are 1-based.
    """

    def __init__(self, ell: int, seed: int, diagonal_values: tuple[int, int] | None = None):
        _check_ell(ell)
        self.ell = ell
        self.seed = seed & (2**64 - 1)
        self.diagonal_values = (
            tuple(diagonal_values) if diagonal_values is not None else (2 * ell, 2 * ell + 1)
        )
        if len(self.diagonal_values) != 2:
            raise ParameterError("diagonal_values must hold exactly two digits")

    def digit(self, i: int, j: int, k: int) -> int:
        if not (1 <= i <= self.ell and 1 <= j <= self.ell) or k < 0:
            raise ParameterError(f"digit index ({i},{j},{k}) out of range")
        payload = struct.pack(">QQQQ", self.seed, i, j, k)
        bit = hashlib.sha256(payload).digest()[0] & 1
        values = self.diagonal_values if i == j else (1, 2)
        return values[bit]


class FixedDigitStream:
    """Pinned digit table for reproducing hand-computed instances.

    entries maps 1-based (i, j) to a finite tuple of digits; a bare sequence
    is accepted as shorthand for the single entry (1, 1).  Reads past the
    end of a tuple raise, so truncation depths cannot silently exceed the
    pinned data.
    """

    def __init__(self, entries: Mapping[tuple[int, int], Sequence[int]] | Sequence[int]):
        if not isinstance(entries, Mapping):
            entries = {(1, 1): tuple(entries)}
        self.entries = {key: tuple(int(d) for d in val) for key, val in entries.items()}
        self.ell = max(max(i, j) for (i, j) in self.entries)

    def digit(self, i: int, j: int, k: int) -> int:
        try:
            return self.entries[(i, j)][k]
        except (KeyError, IndexError):
            raise ParameterError(f"no pinned digit at ({i},{j},{k})") from None


def stream_for(params: ConstructionParams) -> SeededDigitStream:
    """Default digit stream of an instance (seeded, variant-aware value sets)."""
    diagonal = (1, 2) if params.variant == INFINITE else None
    return SeededDigitStream(params.ell, params.seed, diagonal_values=diagonal)


def _read_digit(stream, params: ConstructionParams, i: int, j: int, k: int) -> int:
    value = stream.digit(i, j, k)
    allowed = _digit_values(params, i, j)
    if value not in allowed:
        raise ParameterError(
            f"digit {value} at ({i},{j},{k}) outside admissible set {allowed}"
        )
    return value


# ---------------------------------------------------------------------------
# exponent schedules and truncations


def floor_alpha_powers(alpha: Fraction | int, top: int) -> tuple[int, ...]:
    """Exact floors of alpha^k for k = 0..top, alpha a rational > 2.

    The floors are strictly increasing: alpha^(k+1) > 2 alpha^k >=
    alpha^k + 1 once alpha^k >= 1, so each floor jumps by at least 1.
    """
    alpha = Fraction(alpha)
    if alpha <= 2:
        raise ParameterError("exponent ratio must exceed 2")
    if top < 0:
        raise ParameterError("need a nonnegative number of powers")
    out = []
    power = Fraction(1)
    for _ in range(top + 1):
        out.append(power.numerator // power.denominator)
        power *= alpha
    for a, b in zip(out, out[1:]):
        if b <= a:
            raise ParameterError("exponent schedule failed to increase")
    return tuple(out)


def series_start(params: ConstructionParams) -> int:
    """Index of the first series term: 0 normally, 1 for the infinite variant.

    The infinite schedule k^k is ambiguous at k = 0, so that variant's
    series starts at k = 1; every certified claim is asymptotic in N, which
    makes the convention immaterial.
    """
    return 1 if params.variant == INFINITE else 0


def term_exponents(params: ConstructionParams, top: int) -> tuple[int, ...]:
    """Exponent m_k of the k-th series term, for k = 0..top.

    Finite variant: m_k = floor(alpha^k).  Infinite variant: m_k = k^k
    (the k = 0 entry is filled with 1 but never used; see series_start).
    """
    if params.variant == INFINITE:
        if top < 0:
            raise ParameterError("need a nonnegative number of exponents")
        return tuple(max(1, k**k) for k in range(top + 1))
    return floor_alpha_powers(params.alpha, top)


def tail_bound(params: ConstructionParams, depth: int) -> Fraction:
    """Exact upper bound on the series tail beyond index depth.

    All omitted digits are at most 2 ell + 1 (finite variant) or 2
    (infinite variant) and their exponents are distinct integers at least
    m_(depth+1), so a geometric comparison bounds the tail by
    (4 ell + 2) / theta^m_(depth+1), respectively 3^(1 - m_(depth+1)).
    """
    exps = term_exponents(params, depth + 1)
    m_next = exps[depth + 1]
    if params.variant == INFINITE:
        return Fraction(3, INFINITE_BASE**m_next)
    return Fraction(4 * params.ell + 2, params.theta**m_next)


@dataclass(frozen=True)
class TruncatedXi:
    """Partial sum of one digit series plus a certified bound on its tail.

    value is the exact rational sum of the terms up to index depth; the
    omitted remainder lies strictly between 0 and tail_upper.
    """

    i: int
    j: int
    depth: int
    value: Fraction
    tail_upper: Fraction


def xi_truncation(
    stream, i: int, j: int, depth: int, params: ConstructionParams
) -> TruncatedXi:
    """Exact truncation of the series at entry (i, j) up to index depth."""
    if depth < series_start(params):
        raise ParameterError("truncation depth precedes the first series term")
    exps = term_exponents(params, depth)
    value = Fraction(0)
    for k in range(series_start(params), depth + 1):
        digit = _read_digit(stream, params, i, j, k)
        value += Fraction(digit, params.theta ** exps[k])
    return TruncatedXi(
        i=i, j=j, depth=depth, value=value, tail_upper=tail_bound(params, depth)
    )


# ---------------------------------------------------------------------------
# generator and convergent matrices


@dataclass(frozen=True)
class TruncatedGenerators:
    """Rational stand-in for the target span, with a proximity budget.

    matrix is the 2l x l block matrix (identity over truncated series
    entries).  angle_slack bounds the largest proximity sine between this
    span and the true target: the entrywise truncation error is below
    tail_upper, so the matrix difference has Frobenius norm at most
    ell * tail_upper, while both matrices have smallest singular value at
    least 1 thanks to the identity block; the quotient bounds every sine.
    """

    params: ConstructionParams
    depth: int
    matrix: exact.Matrix
    truncations: tuple[TruncatedXi, ...]
    angle_slack: Fraction

    def real_basis(self) -> RealBasis:
        return RealBasis.from_exact(self.matrix)

    def gram_squared(self) -> Fraction:
        """Exact squared l-volume of the generator columns."""
        return Fraction(exact.generalized_determinant_squared(self.matrix))

    def entry(self, i: int, j: int) -> TruncatedXi:
        """Truncation of the series at 1-based entry (i, j)."""
        return self.truncations[(i - 1) * self.params.ell + (j - 1)]


def build_generators(
    params: ConstructionParams, depth: int, stream=None
) -> TruncatedGenerators:
    """Build the 2l x l generator matrix from depth-truncated series."""
    stream = stream if stream is not None else stream_for(params)
    ell = params.ell
    truncs = tuple(
        xi_truncation(stream, i, j, depth, params)
        for i in range(1, ell + 1)
        for j in range(1, ell + 1)
    )
    rows: list[list[exact.Scalar]] = []
    for i in range(ell):
        rows.append([1 if c == i else 0 for c in range(ell)])
    for i in range(1, ell + 1):
        rows.append([truncs[(i - 1) * ell + (j - 1)].value for j in range(1, ell + 1)])
    matrix = exact.as_matrix(rows)
    slack = ell * tail_bound(params, depth)
    return TruncatedGenerators(
        params=params, depth=depth, matrix=matrix, truncations=truncs, angle_slack=slack
    )


@dataclass(frozen=True)
class ConvergentMatrix:
    """Integer matrix whose span approximates the target at index N.

    The top block is theta^m_N times the identity and the bottom block holds
    the scaled partial sums f_N^(i,j) = theta^m_N * sum_(k<=N) digit/theta^m_k,
    which are exact integers.  digit_matrix records the digits at index N
    (used by the dominance checks).
    """

    n_index: int
    exponent: int
    f_matrix: exact.Matrix
    full: exact.Matrix
    subspace: exact.RationalSubspace
    digit_matrix: exact.Matrix

    @property
    def height_squared(self) -> int:
        return self.subspace.pluecker.height_squared


def build_convergent(
    params: ConstructionParams, n_index: int, stream=None
) -> ConvergentMatrix:
    """Exact convergent matrix at index N, with primitivity asserted."""
    start = series_start(params)
    if n_index < start:
        raise ParameterError(
            f"convergent index must be at least {start} for this variant"
        )
    stream = stream if stream is not None else stream_for(params)
    ell = params.ell
    exps = term_exponents(params, n_index)
    m_n = exps[n_index]
    f_rows = []
    digit_rows = []
    for i in range(1, ell + 1):
        f_row = []
        digit_row = []
        for j in range(1, ell + 1):
            total = 0
            last = None
            for k in range(start, n_index + 1):
                digit = _read_digit(stream, params, i, j, k)
                total += digit * params.theta ** (m_n - exps[k])
                last = digit
            f_row.append(total)
            digit_row.append(last)
        f_rows.append(f_row)
        digit_rows.append(digit_row)
    rows: list[list[int]] = []
    for i in range(ell):
        rows.append([params.theta**m_n if c == i else 0 for c in range(ell)])
    rows.extend(f_rows)
    full = exact.as_matrix(rows)
    if not exact.is_primitive_basis(full):
        raise CertificationFailure("primitive-basis", n_index)
    subspace = exact.RationalSubspace.from_basis(full)
    return ConvergentMatrix(
        n_index=n_index,
        exponent=m_n,
        f_matrix=exact.as_matrix(f_rows),
        full=full,
        subspace=subspace,
        digit_matrix=exact.as_matrix(digit_rows),
    )


def build_infinite_convergent(
    params: ConstructionParams, n_index: int, stream=None
) -> ConvergentMatrix:
    """Convergent of the infinite variant (base 3, exponents k^k, N >= 1)."""
    if params.variant != INFINITE:
        raise ParameterError("params do not describe the infinite variant")
    return build_convergent(params, n_index, stream=stream)


# ---------------------------------------------------------------------------
# certification


_CHECKS = (
    "truncation-tail",
    "f-entry-bound",
    "primitive-basis",
    "height-upper",
    "digit-dominance",
    "exponent-step",
    "psi-resolution",
)


@dataclass(frozen=True)
class ConvergentCertificate:
    """All finitely checkable facts about one convergent, with values.

    psi_lo/psi_hi bracket the largest proximity sine against the true
    target (truncation slack already folded in).  upper_normalized rescales
    psi_hi by base^(alpha * m_N) (finite variant; base^m_(N+1) otherwise)
    and lower_normalized rescales psi_lo by base^m_(N+1): the construction
    keeps both inside fixed bands, which is the finite-index shadow of the
    instance's approximation exponent.  local_exponent is the record-style
    exponent -2 log(psi_hi) / log(H^2).
    """

    n_index: int
    exponent: int
    height_squared: int
    ratio_squared: Fraction
    ratio_deviation: float
    psi_lo: float
    psi_hi: float
    upper_normalized: float
    lower_normalized: float
    local_exponent: float
    checks: tuple[tuple[str, bool], ...]


@dataclass(frozen=True)
class InstanceCertification:
    """Certification report of one instance up to index nmax.

    gram_limit_squared is the exact squared l-volume of the depth-truncated
    generators; the height ratios H(B_N) / theta^(l m_N) converge to its
    square root.  instance_checks carries the cross-index facts
    (height monotonicity, ratio-deviation trend).
    """

    params: ConstructionParams
    depth: int
    bits_used: int
    gram_limit_squared: Fraction
    records: tuple[ConvergentCertificate, ...]
    instance_checks: tuple[tuple[str, bool], ...]

    def as_records(self) -> Iterator[dict]:
        """One JSON-ready dict per (N, check) plus quantitative rows."""
        for rec in self.records:
            for name, ok in rec.checks:
                yield {"n": rec.n_index, "check": name, "ok": ok}
            yield {
                "n": rec.n_index,
                "check": "quantities",
                "ok": True,
                "exponent": rec.exponent,
                "height_squared": str(rec.height_squared),
                "ratio_squared": f"{rec.ratio_squared.numerator}/{rec.ratio_squared.denominator}",
                "ratio_deviation": f"{rec.ratio_deviation:.6e}",
                "psi_lo": f"{rec.psi_lo:.18e}",
                "psi_hi": f"{rec.psi_hi:.18e}",
                "upper_normalized": f"{rec.upper_normalized:.6e}",
                "lower_normalized": f"{rec.lower_normalized:.6e}",
                "local_exponent": f"{rec.local_exponent:.6f}",
            }
        for name, ok in self.instance_checks:
            yield {"n": None, "check": name, "ok": ok}


def starting_bits(params: ConstructionParams, depth: int) -> int:
    """Working precision that over-resolves every angle up to the slack scale."""
    m_next = term_exponents(params, depth + 1)[depth + 1]
    return int(4 * m_next * math.log2(params.theta)) + 64


def _require(ok: bool, check: str, n_index: int, detail: str = "") -> None:
    if not ok:
        raise CertificationFailure(check, n_index, detail)


def certify_instance(
    params: ConstructionParams,
    nmax: int,
    stream=None,
    depth: int | None = None,
    ctx: PrecisionContext | None = None,
) -> InstanceCertification:
    """Check every finitely verifiable inequality for N = 1..nmax.

    Exact checks (tails, entry bounds, primitivity, height bounds, digit
    dominance, exponent steps) run on integers and rationals; proximity
    sines are certified as intervals by adaptive-precision evaluation
    against a depth-truncation of the target, widened by the truncation
    slack.  Raises CertificationFailure naming the first violated check.
    """
    if nmax < 1:
        raise ParameterError("nmax must be at least 1")
    depth = depth if depth is not None else nmax + 2
    if depth < nmax + 2:
        raise ParameterError("truncation depth must be at least nmax + 2")
    stream = stream if stream is not None else stream_for(params)
    ell = params.ell
    theta = params.theta

    generators = build_generators(params, depth, stream=stream)
    gram_limit_squared = generators.gram_squared()
    target = generators.real_basis()
    slack = generators.angle_slack

    if ctx is None:
        bits = starting_bits(params, depth)
        ctx = PrecisionContext(bits=max(64, bits))
    exps = term_exponents(params, nmax + 1)

    records = []
    prev_height_sq = None
    prev_deviation = None
    height_monotone = True
    deviation_monotone = True
    bits_used = ctx.bits
    with mp.workprec(ctx.bits):
        limit = mp.sqrt(
            mp.mpf(gram_limit_squared.numerator) / mp.mpf(gram_limit_squared.denominator)
        )
        log_theta = mp.log(theta)

    for n_index in range(1, nmax + 1):
        convergent = build_convergent(params, n_index, stream=stream)
        m_n = convergent.exponent
        h_sq = convergent.height_squared

        checks: list[tuple[str, bool]] = []

        # exact: the deep truncation sits strictly between this convergent's
        # partial sums and those sums plus the tail bound at index N
        tail_n = tail_bound(params, n_index)
        tail_ok = True
        for i in range(1, ell + 1):
            for j in range(1, ell + 1):
                deep = generators.entry(i, j).value
                partial = Fraction(convergent.f_matrix[i - 1][j - 1], theta**m_n)
                gap = deep - partial
                if not (0 < gap < tail_n):
                    tail_ok = False
        checks.append(("truncation-tail", tail_ok))
        _require(tail_ok, "truncation-tail", n_index)

        # exact: entry bound on the scaled partial sums
        if params.variant == FINITE:
            f_cap = 2 * (2 * ell + 1) * theta**m_n
        else:
            # digits <= 2 and sum(3^-k^k, k >= 1) < 1/2, so f_N < 3^m_N
            f_cap = theta**m_n
        f_ok = all(
            0 < convergent.f_matrix[i][j] <= f_cap
            for i in range(ell)
            for j in range(ell)
        )
        checks.append(("f-entry-bound", f_ok))
        _require(f_ok, "f-entry-bound", n_index)

        prim_ok = exact.is_primitive_basis(convergent.full)
        checks.append(("primitive-basis", prim_ok))
        _require(prim_ok, "primitive-basis", n_index)

        # exact: product bound on the height via column norms
        if params.variant == FINITE:
            height_cap = (2 * (2 * ell + 1)) ** (2 * ell) * (2 * ell) ** ell * theta ** (
                2 * ell * m_n
            )
        else:
            height_cap = (2 * ell) ** ell * theta ** (2 * ell * m_n)
        height_ok = h_sq <= height_cap
        checks.append(("height-upper", height_ok))
        _require(height_ok, "height-upper", n_index)

        # exact: digits at index N keep the digit matrix invertible; in the
        # finite variant it is strictly diagonally dominant by column and
        # its determinant stays below theta in absolute value
        digit_det = exact.determinant(convergent.digit_matrix)
        dominance_ok = digit_det != 0
        if params.variant == FINITE:
            det_cap = math.factorial(ell) * (2 * ell + 1) ** ell
            dominance_ok = dominance_ok and abs(digit_det) <= det_cap < theta
            for j in range(ell):
                off = sum(
                    convergent.digit_matrix[i][j] for i in range(ell) if i != j
                )
                if not (convergent.digit_matrix[j][j] >= 2 * ell > off):
                    dominance_ok = False
        checks.append(("digit-dominance", dominance_ok))
        _require(dominance_ok, "digit-dominance", n_index)

        # exact: the exponent schedule steps by at most a factor alpha
        if params.variant == FINITE:
            step_ok = exps[n_index + 1] <= params.alpha * (exps[n_index] + 1)
        else:
            step_ok = exps[n_index + 1] > exps[n_index]
        checks.append(("exponent-step", step_ok))
        _require(step_ok, "exponent-step", n_index)

        # interval: largest proximity sine against the true target
        profile = angles_adaptive(
            target, RealBasis.from_subspace(convergent.subspace), ctx
        )
        widened = profile.widened(slack)
        bits_used = max(bits_used, profile.bits_used)
        resolved_ok = bool(profile.resolved[-1]) and widened.lo[-1] > 0
        checks.append(("psi-resolution", resolved_ok))
        _require(
            resolved_ok,
            "psi-resolution",
            n_index,
            "largest sine not separated from zero at this precision",
        )

        with mp.workprec(profile.bits_used):
            psi_lo = widened.lo[-1]
            psi_hi = widened.hi[-1]
            ratio_squared = Fraction(h_sq, theta ** (2 * ell * m_n))
            ratio = mp.sqrt(
                mp.mpf(ratio_squared.numerator) / mp.mpf(ratio_squared.denominator)
            )
            deviation = abs(ratio / limit - 1)
            if params.variant == FINITE:
                upper_exponent = mp.mpf(params.alpha.numerator) / params.alpha.denominator * m_n
            else:
                upper_exponent = mp.mpf(exps[n_index + 1])
            upper_normalized = float(psi_hi * mp.e ** (upper_exponent * log_theta))
            lower_normalized = float(psi_lo * mp.mpf(theta) ** exps[n_index + 1])
            local_exponent = float(-2 * mp.log(psi_hi) / mp.log(h_sq))

        if prev_height_sq is not None and h_sq <= prev_height_sq:
            height_monotone = False
        if prev_deviation is not None and deviation > prev_deviation:
            deviation_monotone = False
        prev_height_sq = h_sq
        prev_deviation = deviation

        records.append(
            ConvergentCertificate(
                n_index=n_index,
                exponent=m_n,
                height_squared=h_sq,
                ratio_squared=ratio_squared,
                ratio_deviation=float(deviation),
                # round the bracket outward so the floats stay conservative
                psi_lo=max(0.0, math.nextafter(float(psi_lo), 0.0)),
                psi_hi=math.nextafter(float(psi_hi), math.inf),
                upper_normalized=upper_normalized,
                lower_normalized=lower_normalized,
                local_exponent=local_exponent,
                checks=tuple(checks),
            )
        )

    instance_checks = (
        ("height-monotone", height_monotone),
        ("ratio-trend", deviation_monotone),
    )
    _require(height_monotone, "height-monotone", nmax)
    _require(deviation_monotone, "ratio-trend", nmax)

    return InstanceCertification(
        params=params,
        depth=depth,
        bits_used=bits_used,
        gram_limit_squared=gram_limit_squared,
        records=tuple(records),
        instance_checks=instance_checks,
    )


# ---------------------------------------------------------------------------
# descriptor serialization


def params_to_descriptor(params: ConstructionParams) -> dict:
    """JSON-ready descriptor: {ell, beta: "p/q"|"inf", theta, seed, variant}."""
    beta = "inf" if params.variant == INFINITE else str(params.beta)
    return {
        "ell": params.ell,
        "beta": beta,
        "theta": params.theta,
        "seed": params.seed,
        "variant": params.variant,
    }


def params_from_descriptor(data: Mapping) -> ConstructionParams:
    """Inverse of params_to_descriptor; theta may be omitted for the default."""
    try:
        ell = int(data["ell"])
        beta = data["beta"]
        seed = int(data.get("seed", 0))
    except (KeyError, TypeError, ValueError) as err:
        raise ParameterError(f"bad instance descriptor: {err}") from None
    variant = data.get("variant")
    if variant is None:
        variant = INFINITE if str(beta).strip().lower() in ("inf", "infinity") else FINITE
    theta = data.get("theta")
    theta = int(theta) if theta is not None else None
    if variant == INFINITE:
        return ConstructionParams.create(ell, None, theta=theta, seed=seed, variant=INFINITE)
    return ConstructionParams.create(ell, Fraction(str(beta)), theta=theta, seed=seed)
