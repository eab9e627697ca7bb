"""Canonical proximity angles between subspaces at adaptive precision.

The proximity profile of two subspaces is the ascending tuple
psi_j = sin(theta_j) of sines of their principal angles, computed from the
singular values of the cross-Gram matrix of orthonormal bases.  sin is the
right scale for approximation questions (it is comparable to normalized
distances), but it loses half the working digits when an angle is tiny, so
every public entry point either runs exact rational arithmetic (one
dimensional case) or re-computes at doubled precision until two consecutive
runs agree to the requested relative error.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from mpmath import mp

from . import exact
from .errors import NumericalRankLossError, PrecisionExhaustedError, ShapeError

DEFAULT_BITS = 256
DEFAULT_TARGET_REL_ERR = Fraction(1, 2**48)
HARD_BIT_CAP = 1_048_576


def _env_bit_cap() -> int:
    raw = os.environ.get("SUBDIOPH_MAX_BITS")
    if raw is None:
        return HARD_BIT_CAP
    try:
        return max(64, min(HARD_BIT_CAP, int(raw)))
    except ValueError:
        return HARD_BIT_CAP


@dataclass(frozen=True)
class PrecisionContext:
    """Working-precision policy for angle computations.

    bits is the starting mantissa size; adaptive refinement doubles it until
    agreement at target_rel_err, giving up at max_bits.  Values at or below
    2^(-bits/4) are not resolved pointwise, only bracketed by [0, 2^(-bits/4)].
    """

    bits: int = DEFAULT_BITS
    target_rel_err: Fraction = DEFAULT_TARGET_REL_ERR
    max_bits: int = HARD_BIT_CAP

    def __post_init__(self) -> None:
        if self.bits < 64:
            raise ShapeError("need at least 64 bits")
        cap = min(self.max_bits, _env_bit_cap())
        object.__setattr__(self, "max_bits", cap)

    def floor_at(self, bits: int):
        return mp.mpf(2) ** (-(bits // 4))


class RealBasis:
    """A subspace handed to the angle engine, re-evaluable at any precision.

    Exact rational bases re-convert losslessly when precision is raised;
    float input is frozen at its native 53 bits and tagged as such; an
    evaluator callback covers targets whose entries are only available
    through computation (algebraic numbers, series truncations).
    """

    def __init__(
        self,
        n: int,
        d: int,
        evaluate: Callable[[int], "mp.matrix"],
        source: str,
        exact_matrix: exact.Matrix | None = None,
    ) -> None:
        if not 1 <= d <= n:
            raise ShapeError(f"invalid dimensions ({n},{d})")
        self.n = n
        self.d = d
        self._evaluate = evaluate
        self.source = source
        self.exact_matrix = exact_matrix

    @classmethod
    def from_exact(cls, rows: Iterable[Sequence[exact.Scalar]]) -> "RealBasis":
        m = exact.as_matrix(rows)
        n, d = exact.shape(m)
        if exact.rank(m) != d:
            raise NumericalRankLossError("exact basis has dependent columns")

        def evaluate(bits: int) -> "mp.matrix":
            with mp.workprec(bits):
                out = mp.matrix(n, d)
                for i in range(n):
                    for j in range(d):
                        x = m[i][j]
                        if isinstance(x, Fraction):
                            out[i, j] = mp.mpf(x.numerator) / mp.mpf(x.denominator)
                        else:
                            out[i, j] = mp.mpf(x)
                return out

        return cls(n, d, evaluate, source="exact-rational", exact_matrix=m)

    @classmethod
    def from_subspace(cls, sub: exact.RationalSubspace) -> "RealBasis":
        return cls.from_exact(sub.basis)

    @classmethod
    def from_float(cls, rows: Iterable[Sequence[float]]) -> "RealBasis":
        data = [list(map(float, row)) for row in rows]
        n = len(data)
        d = len(data[0]) if data else 0
        if d == 0 or any(len(r) != d for r in data):
            raise ShapeError("ragged or empty float basis")

        def evaluate(bits: int) -> "mp.matrix":
            with mp.workprec(bits):
                return mp.matrix(data)

        return cls(n, d, evaluate, source="float-input")

    @classmethod
    def from_evaluator(
        cls, n: int, d: int, fn: Callable[[int], Sequence[Sequence[object]]], source: str
    ) -> "RealBasis":
        def evaluate(bits: int) -> "mp.matrix":
            with mp.workprec(bits):
                return mp.matrix([list(row) for row in fn(bits)])

        return cls(n, d, evaluate, source=source)

    def at(self, bits: int) -> "mp.matrix":
        m = self._evaluate(bits)
        if (m.rows, m.cols) != (self.n, self.d):
            raise ShapeError("evaluator returned wrong shape")
        return m


@dataclass(frozen=True)
class AngleProfile:
    """Ascending sines of principal angles with certification metadata.

    lo/hi bracket each value; entries with resolved=False were at or below
    the near-zero floor and carry only the bracket [0, floor].
    rel_err_bound is the achieved agreement bound for resolved entries.
    """

    t: int
    psi: tuple
    lo: tuple
    hi: tuple
    resolved: tuple
    rel_err_bound: object
    bits_used: int

    def widened(self, tau) -> "AngleProfile":
        """Absolute widening of every bracket by tau (perturbation budget)."""
        t = mp.mpf(tau) if not isinstance(tau, Fraction) else _mpf_of_fraction(tau, self.bits_used)
        zero = mp.mpf(0)
        lo = tuple(max(zero, x - t) for x in self.lo)
        hi = tuple(x + t for x in self.hi)
        return AngleProfile(
            t=self.t,
            psi=self.psi,
            lo=lo,
            hi=hi,
            resolved=self.resolved,
            rel_err_bound=self.rel_err_bound,
            bits_used=self.bits_used,
        )


def _mpf_of_fraction(x: Fraction, bits: int):
    with mp.workprec(bits):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)


def orthonormal_basis(basis: RealBasis, bits: int) -> "mp.matrix":
    """Orthonormal basis via twice-iterated modified Gram-Schmidt.

    Raises NumericalRankLossError when a column norm collapses below
    2^(-bits/2) at the working precision.
    """
    with mp.workprec(bits + 32):
        m = basis.at(bits + 32)
        n, d = m.rows, m.cols
        cutoff = mp.mpf(2) ** (-(bits // 2))
        cols = [[m[i, j] for i in range(n)] for j in range(d)]
        out: list[list] = []
        for j, col in enumerate(cols):
            v = list(col)
            for _pass in range(2):
                for q in out:
                    dot = mp.fsum(a * b for a, b in zip(q, v))
                    v = [a - dot * b for a, b in zip(v, q)]
            norm = mp.sqrt(mp.fsum(a * a for a in v))
            original = mp.sqrt(mp.fsum(a * a for a in col))
            if original == 0 or norm / original < cutoff:
                raise NumericalRankLossError(
                    f"column {j} collapsed during orthonormalization"
                )
            out.append([a / norm for a in v])
        q = mp.matrix(n, d)
        for j, col in enumerate(out):
            for i in range(n):
                q[i, j] = col[i]
        return q


def _cross_gram_sines(qa: "mp.matrix", qb: "mp.matrix") -> list:
    """Ascending sines from singular values of Qa^T Qb (clamped to [0,1])."""
    g = qa.T * qb
    if min(g.rows, g.cols) == 1:
        # 1 x k cross-Gram: singular value is the row norm
        s = [mp.sqrt(mp.fsum(g[i, j] ** 2 for i in range(g.rows) for j in range(g.cols)))]
    else:
        s = list(mp.svd_r(g, compute_uv=False))
    one = mp.mpf(1)
    out = []
    for sigma in s:
        sigma = min(max(sigma, mp.mpf(0)), one)
        out.append(mp.sqrt((one - sigma) * (one + sigma)))
    out.sort()
    return out


def principal_angles(a: RealBasis, b: RealBasis, bits: int = DEFAULT_BITS) -> AngleProfile:
    """Single-shot proximity profile at a fixed working precision.

    The reported rel_err_bound is the conservative single-shot claim
    2^(-bits/2); use angles_adaptive for a measured bound.
    """
    if a.n != b.n:
        raise ShapeError("ambient dimensions differ")
    t = min(a.d, b.d)
    with mp.workprec(bits + 32):
        qa = orthonormal_basis(a, bits)
        qb = orthonormal_basis(b, bits)
        sines = _cross_gram_sines(qa, qb)
        floor = mp.mpf(2) ** (-(bits // 4))
        rel = mp.mpf(2) ** (-(bits // 2))
        psi, lo, hi, resolved = [], [], [], []
        for s in sines:
            if s <= floor:
                psi.append(floor)
                lo.append(mp.mpf(0))
                hi.append(floor)
                resolved.append(False)
            else:
                psi.append(s)
                lo.append(s * (1 - rel))
                hi.append(s * (1 + rel))
                resolved.append(True)
    return AngleProfile(
        t=t,
        psi=tuple(psi),
        lo=tuple(lo),
        hi=tuple(hi),
        resolved=tuple(resolved),
        rel_err_bound=rel,
        bits_used=bits,
    )


def vector_angle(
    x: Sequence[exact.Scalar | float],
    y: Sequence[exact.Scalar | float],
    bits: int = DEFAULT_BITS,
):
    """sin of the angle between two nonzero vectors.

    Uses the cross-Gram identity sqrt(|x|^2 |y|^2 - (x.y)^2) / (|x| |y|),
    with the radicand computed exactly when both inputs are rational, so tiny
    angles keep full relative accuracy.
    """
    if len(x) != len(y):
        raise ShapeError("length mismatch")
    if _all_rational(x) and _all_rational(y):
        fx = [Fraction(v) for v in x]
        fy = [Fraction(v) for v in y]
        xx = sum(v * v for v in fx)
        yy = sum(v * v for v in fy)
        if xx == 0 or yy == 0:
            raise ShapeError("zero vector")
        xy = sum(u * v for u, v in zip(fx, fy))
        num = xx * yy - xy * xy  # Lagrange identity: = |x /\ y|^2, >= 0
        with mp.workprec(bits):
            return mp.sqrt(_mpf_of_fraction(num, bits) / _mpf_of_fraction(xx * yy, bits))
    with mp.workprec(bits + 32):
        fx = [mp.mpf(v) for v in x]
        fy = [mp.mpf(v) for v in y]
        xx = mp.fsum(v * v for v in fx)
        yy = mp.fsum(v * v for v in fy)
        if xx == 0 or yy == 0:
            raise ShapeError("zero vector")
        xy = mp.fsum(u * v for u, v in zip(fx, fy))
        num = max(mp.mpf(0), xx * yy - xy * xy)
        return mp.sqrt(num / (xx * yy))


def _all_rational(v: Sequence) -> bool:
    return all(isinstance(t, (int, Fraction)) for t in v)


def angles_adaptive(
    a: RealBasis, b: RealBasis, ctx: PrecisionContext | None = None
) -> AngleProfile:
    """Proximity profile certified by agreement under precision doubling.

    Recomputes at doubled precision until consecutive profiles agree to
    ctx.target_rel_err on every entry above the near-zero floor; entries at
    or below the floor stay bracketed as [0, floor].  Raises
    PrecisionExhaustedError at the bit cap (callers may raise the cap via
    the context or the SUBDIOPH_MAX_BITS environment variable).
    """
    ctx = ctx or PrecisionContext()
    if a.n != b.n:
        raise ShapeError("ambient dimensions differ")
    t = min(a.d, b.d)
    target = _mpf_of_fraction(ctx.target_rel_err, 64)
    bits = ctx.bits
    prev = _sines_at(a, b, bits)
    while True:
        next_bits = bits * 2
        if next_bits > ctx.max_bits:
            raise PrecisionExhaustedError(
                f"no agreement at {bits} bits (cap {ctx.max_bits})"
            )
        cur = _sines_at(a, b, next_bits)
        with mp.workprec(next_bits):
            floor = ctx.floor_at(next_bits)
            worst = mp.mpf(0)
            comparable = True
            for p, c in zip(prev, cur):
                if c <= floor:
                    continue
                diff = abs(p - c) / c
                worst = max(worst, diff)
                if diff > target:
                    comparable = False
            if comparable:
                measured = max(worst, mp.mpf(2) ** (8 - next_bits))
                bound = 4 * measured
                psi, lo, hi, resolved = [], [], [], []
                for c in cur:
                    if c <= floor:
                        psi.append(floor)
                        lo.append(mp.mpf(0))
                        hi.append(floor)
                        resolved.append(False)
                    else:
                        psi.append(c)
                        lo.append(c * (1 - bound))
                        hi.append(c * (1 + bound))
                        resolved.append(True)
                return AngleProfile(
                    t=t,
                    psi=tuple(psi),
                    lo=tuple(lo),
                    hi=tuple(hi),
                    resolved=tuple(resolved),
                    rel_err_bound=bound,
                    bits_used=next_bits,
                )
        prev = cur
        bits = next_bits


def _sines_at(a: RealBasis, b: RealBasis, bits: int) -> list:
    with mp.workprec(bits + 32):
        qa = orthonormal_basis(a, bits)
        qb = orthonormal_basis(b, bits)
        return _cross_gram_sines(qa, qb)


def random_orthogonal(n: int, rng, bits: int = DEFAULT_BITS) -> "mp.matrix":
    """Haar-ish random orthogonal matrix via QR of a random Gaussian matrix."""
    with mp.workprec(bits):
        m = mp.matrix([[mp.mpf(rng.gauss(0.0, 1.0)) for _ in range(n)] for _ in range(n)])
        q, r = mp.qr(m)
        # fix signs so the factorization is unique
        for j in range(n):
            if r[j, j] < 0:
                for i in range(n):
                    q[i, j] = -q[i, j]
        return q
