"""Angle-engine oracles: hand values, scipy cross-checks, inequality properties."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from mpmath import mp

from subdioph.angles import (
    AngleProfile,
    PrecisionContext,
    RealBasis,
    angles_adaptive,
    orthonormal_basis,
    principal_angles,
    random_orthogonal,
    vector_angle,
)
from subdioph.errors import NumericalRankLossError, PrecisionExhaustedError, ShapeError


def exact_basis(*cols):
    return RealBasis.from_exact([list(row) for row in zip(*cols)])


def random_exact_basis(rng, n, d, span=9):
    while True:
        cols = [[rng.randint(-span, span) for _ in range(n)] for _ in range(d)]
        try:
            return exact_basis(*cols)
        except NumericalRankLossError:
            continue


def test_coordinate_quarter_turn():
    p = angles_adaptive(exact_basis((1, 0)), exact_basis((0, 1)))
    assert p.psi[0] == 1


def test_diagonal_line_against_axis():
    p = angles_adaptive(exact_basis((1, 0)), exact_basis((1, 1)))
    with mp.workprec(p.bits_used):
        ref = mp.sqrt(2) / 2
        assert abs(p.psi[0] - ref) < mp.mpf(2) ** -200


def test_golden_line_against_ones_vector():
    phi_bits = lambda bits: [[mp.mpf(1)], [(1 + mp.sqrt(5)) / 2]]
    golden = RealBasis.from_evaluator(2, 1, phi_bits, source="algebraic")
    p = angles_adaptive(golden, exact_basis((1, 1)))
    with mp.workprec(p.bits_used):
        # closed form: psi^2 = (2 - phi) / (2 (2 + phi))
        phi = (1 + mp.sqrt(5)) / 2
        ref = mp.sqrt((2 - phi) / (2 * (2 + phi)))
        assert abs(p.psi[0] - ref) / ref < mp.mpf(2) ** -100
    assert p.rel_err_bound < 2.0**-40


def test_profile_is_ascending_and_bracketed():
    rng = random.Random(1)
    for _ in range(25):
        a = random_exact_basis(rng, 5, 2)
        b = random_exact_basis(rng, 5, 3)
        p = angles_adaptive(a, b)
        assert p.t == 2
        assert list(p.psi) == sorted(p.psi)
        for lo, x, hi in zip(p.lo, p.psi, p.hi):
            assert 0 <= lo <= hi
            assert lo <= x <= hi
            assert hi <= 1 + 1e-30


def test_scipy_cross_oracle_random():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(2, 6)
        da = rng.randint(1, min(3, n))
        db = rng.randint(1, min(3, n))
        a = random_exact_basis(rng, n, da)
        b = random_exact_basis(rng, n, db)
        p = principal_angles(a, b, bits=256)
        am = np.array(
            [[float(x) for x in row] for row in a.exact_matrix], dtype=float
        )
        bm = np.array(
            [[float(x) for x in row] for row in b.exact_matrix], dtype=float
        )
        ref = np.sort(np.sin(scipy.linalg.subspace_angles(am, bm)))
        ours = np.array([float(x) for x in p.psi])
        # scipy's double-precision SVD reports exact-zero angles as noise
        # near sqrt(eps); compare at that noise floor.
        assert np.allclose(ours, ref, atol=1e-7)
        big = ref > 1e-7
        assert np.allclose(ours[big], ref[big], rtol=1e-9, atol=1e-12)


def test_tiny_angle_exact_inputs_fully_resolved():
    xi = Fraction(2, 5) + Fraction(3, 5**3) + Fraction(2, 5**9)
    p = angles_adaptive(exact_basis((1, xi)), exact_basis((125, 53)))
    assert p.resolved == (True,)
    # tail of the base-5 series: psi = 125*(xi - 53/125) / (|(1,xi)| * |(125,53)|)
    expected = vector_angle([1, xi], [125, 53], bits=300)
    assert abs(p.psi[0] - expected) / expected < 1e-12
    assert p.psi[0] < mp.mpf(4) / 5**9  # bounded by the series remainder scale


def test_identical_subspaces_report_unresolved_zero():
    a = exact_basis((1, 2, 3))
    b = exact_basis((2, 4, 6))
    p = angles_adaptive(a, b)
    assert p.resolved == (False,)
    assert p.lo[0] == 0
    assert p.hi[0] <= mp.mpf(2) ** -(p.bits_used // 4)


def test_vector_angle_matches_profile():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 5)
        x = [rng.randint(-9, 9) for _ in range(n)]
        y = [rng.randint(-9, 9) for _ in range(n)]
        if not any(x) or not any(y):
            continue
        try:
            p = angles_adaptive(exact_basis(tuple(x)), exact_basis(tuple(y)))
        except NumericalRankLossError:
            continue
        va = vector_angle(x, y)
        if p.resolved[0]:
            assert abs(va - p.psi[0]) <= 1e-60 * max(1, va)


def test_orthogonal_invariance():
    rng = random.Random(4)
    for trial in range(15):
        n = rng.randint(2, 5)
        da = rng.randint(1, min(3, n))
        db = rng.randint(1, min(3, n))
        a = random_exact_basis(rng, n, da)
        b = random_exact_basis(rng, n, db)
        seed = 1000 + trial

        def rotated(base, dim):
            def fn(bits):
                u = random_orthogonal(n, random.Random(seed), bits)
                return (u * base.at(bits)).tolist()

            return RealBasis.from_evaluator(n, dim, fn, source="rotated")

        p0 = angles_adaptive(a, b)
        p1 = angles_adaptive(rotated(a, da), rotated(b, db))
        tol = 4 * max(p0.rel_err_bound, p1.rel_err_bound)
        for x, y in zip(p0.psi, p1.psi):
            assert abs(x - y) <= tol * max(x, y) + mp.mpf(2) ** -60


# distance comparison: sin of the angle is at most the normalized distance
def test_angle_bounded_by_relative_distance():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 5)
        x = [rng.randint(-9, 9) for _ in range(n)]
        y = [rng.randint(-9, 9) for _ in range(n)]
        if not any(x) or not any(y):
            continue
        psi = vector_angle(x, y, bits=128)
        dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
        norm = math.sqrt(sum(a * a for a in x))
        # the bound is tight when x . y = 0, so leave room for the
        # double-precision rounding of the reference side
        assert psi <= dist / norm * (1 + 1e-12) + 1e-15


# reverse comparison for unit vectors on the same side
def test_angle_at_least_half_sqrt2_times_distance():
    rng = random.Random(6)
    count = 0
    while count < 200:
        n = rng.randint(2, 5)
        x = [rng.gauss(0, 1) for _ in range(n)]
        y = [rng.gauss(0, 1) for _ in range(n)]
        nx = math.sqrt(sum(a * a for a in x))
        ny = math.sqrt(sum(a * a for a in y))
        if nx < 1e-9 or ny < 1e-9:
            continue
        u = [a / nx for a in x]
        v = [a / ny for a in y]
        if sum(a * b for a, b in zip(u, v)) < 0:
            v = [-a for a in v]
        psi = vector_angle(u, v, bits=96)
        dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(u, v)))
        assert psi >= math.sqrt(2) / 2 * dist * (1 - 1e-9)
        count += 1


def test_triangle_inequality_for_lines():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 5)
        vecs = []
        while len(vecs) < 3:
            v = [rng.randint(-9, 9) for _ in range(n)]
            if any(v):
                vecs.append(v)
        p12 = vector_angle(vecs[0], vecs[1], bits=128)
        p13 = vector_angle(vecs[0], vecs[2], bits=128)
        p32 = vector_angle(vecs[2], vecs[1], bits=128)
        assert p12 <= (p13 + p32) * (1 + 1e-30) + 1e-30


# smallest angle of a member line never exceeds the largest profile entry
def test_member_line_angle_below_top_profile_entry():
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(3, 6)
        da = rng.randint(1, 3)
        db = rng.randint(da, min(3, n))
        if da > n or db > n:
            continue
        a = random_exact_basis(rng, n, da)
        b = random_exact_basis(rng, n, db)
        weights = [rng.randint(-5, 5) for _ in range(da)]
        if not any(weights):
            weights[0] = 1
        x = [
            sum(w * a.exact_matrix[i][j] for j, w in enumerate(weights))
            for i in range(n)
        ]
        if not any(x):
            continue
        pa = angles_adaptive(a, b)
        px = angles_adaptive(exact_basis(tuple(x)), b)
        top = pa.hi[-1]
        assert px.lo[0] <= top * (1 + 1e-12) + mp.mpf(2) ** -60


# invertible maps distort profiles by at most (s1*s2)/smin^2
def test_linear_map_distortion_bound():
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(2, 4)
        while True:
            phi = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
            from subdioph.exact import as_matrix, determinant

            if determinant(as_matrix(phi)) != 0:
                break
        with mp.workprec(256):
            pm = mp.matrix([[float(x) for x in row] for row in phi])
            s = mp.svd_r(pm, compute_uv=False)
            svals = sorted([s[i] for i in range(s.rows)], reverse=True)
        kappa = svals[0] * (svals[1] if len(svals) > 1 else svals[0]) / svals[-1] ** 2
        da = rng.randint(1, n - 1)
        db = rng.randint(1, n - 1)
        a = random_exact_basis(rng, n, da)
        b = random_exact_basis(rng, n, db)
        from subdioph.exact import mat_mul, as_matrix

        fa = RealBasis.from_exact(mat_mul(as_matrix(phi), a.exact_matrix))
        fb = RealBasis.from_exact(mat_mul(as_matrix(phi), b.exact_matrix))
        p0 = angles_adaptive(a, b)
        p1 = angles_adaptive(fa, fb)
        for x, y in zip(p0.psi, p1.psi):
            if x > mp.mpf(2) ** -40:
                assert y <= kappa * x * (1 + 1e-9)


def test_rank_loss_detection():
    with pytest.raises(NumericalRankLossError):
        RealBasis.from_exact([[1, 2], [2, 4]])
    lossy = RealBasis.from_float([[1.0, 1.0], [1.0, 1.0 + 2.0**-60]])
    with pytest.raises(NumericalRankLossError):
        orthonormal_basis(lossy, bits=64)


def test_precision_cap_raises():
    ctx = PrecisionContext(bits=64, max_bits=100)
    with pytest.raises(PrecisionExhaustedError):
        angles_adaptive(exact_basis((1, 0)), exact_basis((1, 1)), ctx)


def test_widened_profile():
    p = angles_adaptive(exact_basis((1, 0)), exact_basis((1, 1)))
    w = p.widened(Fraction(1, 100))
    assert w.lo[0] < p.lo[0]
    assert w.hi[0] > p.hi[0]
    assert w.lo[0] >= 0


def test_brute_force_minimum_matches_first_entry():
    # grid-search the smallest achievable line angle inside A against B
    rng = random.Random(10)
    for _ in range(5):
        a = random_exact_basis(rng, 4, 2)
        b = random_exact_basis(rng, 4, 2)
        p = principal_angles(a, b, bits=128)
        am = np.array([[float(x) for x in r] for r in a.exact_matrix])
        bm = np.array([[float(x) for x in r] for r in b.exact_matrix])
        qa, _ = np.linalg.qr(am)
        qb, _ = np.linalg.qr(bm)
        best = 1.0
        for t in np.linspace(0, math.pi, 4001):
            x = math.cos(t) * qa[:, 0] + math.sin(t) * qa[:, 1]
            resid = x - qb @ (qb.T @ x)
            best = min(best, float(np.linalg.norm(resid)))
        assert abs(best - float(p.psi[0])) < 5e-6
