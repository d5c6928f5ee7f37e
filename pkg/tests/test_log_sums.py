import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerodist.log_sums import WindowGrid, half_plane_log_sum, log_sum, log_sum_table, write_log_sum_csv

from conftest import seq


def naive(points, r, R, side):
    total = 0.0
    for z in points:
        z = complex(z)
        if r < abs(z) <= R:
            if side == "right" and z.real > 0:
                total += (1 / z).real
            elif side == "left" and z.real < 0:
                total += (-1 / z).real
    return total


H10_MINUS_1 = 1.9289682539682538


def test_harmonic_window():
    Z = seq(range(1, 101))
    assert half_plane_log_sum(Z, 1, 10, "right") == pytest.approx(H10_MINUS_1, abs=1e-15)
    assert naive(range(1, 101), 1, 10, "right") == pytest.approx(H10_MINUS_1, abs=1e-14)


def test_single_point_and_left_zero():
    assert half_plane_log_sum(seq([1 + 1j]), 0.5, 2, "right") == pytest.approx(0.5, abs=1e-16)
    assert half_plane_log_sum(seq([1 + 1j, 3, 4 - 2j]), 0.5, 20, "left") == 0.0


def test_log_sum_examples():
    k = list(range(1, 101))
    Z = seq(k + [-v for v in k])
    assert log_sum(Z, 1, 10) == pytest.approx(H10_MINUS_1, abs=1e-15)
    assert log_sum(seq([]), 1, 10) == 0.0
    assert log_sum(seq([3, -2]), 1, 10) == 0.5


def test_boundary_convention():
    Z = seq([1, 2, 3])
    # strict at r, inclusive at R
    assert half_plane_log_sum(Z, 1, 2, "right") == 0.5
    assert half_plane_log_sum(Z, 2, 3, "right") == pytest.approx(1 / 3)


def test_axis_points_contribute_nothing():
    Z = seq([2j, -3j, 2])
    t = log_sum_table(Z, [(1, 5)])
    assert t.right[0] == 0.5 and t.left[0] == 0.0 and t.axis_points == 2


@pytest.mark.parametrize("r,R", [(2, 2), (3, 1), (0, 1), (-1, 2)])
def test_bad_window(r, R):
    with pytest.raises(ValueError):
        log_sum(seq([1]), r, R)


def test_default_grid():
    g = WindowGrid.default()
    Rs = sorted(set(g.R))
    assert Rs[-1] == 1e4 and len(Rs) == 80
    assert all(R > r for r, R in g)
    assert set(g.r) == {1.0, 2.0, 5.0, 10.0}
    g2 = WindowGrid.default([1], 300, 5)
    assert max(g2.R) == 300.0


rand_points = st.lists(
    st.complex_numbers(max_magnitude=500, allow_nan=False, allow_infinity=False).filter(lambda z: abs(z) > 1e-2),
    max_size=60,
)


@settings(max_examples=80, deadline=None)
@given(rand_points, st.floats(0.01, 100), st.floats(1.01, 50), st.floats(1.01, 50))
def test_additivity_and_monotonicity(points, r, f1, f2):
    Z = seq(points)
    m, R = r * f1, r * f1 * f2
    for side in ("right", "left"):
        whole = half_plane_log_sum(Z, r, R, side)
        parts = half_plane_log_sum(Z, r, m, side) + half_plane_log_sum(Z, m, R, side)
        assert abs(whole - parts) <= 1e-12
        assert half_plane_log_sum(Z, r, m, side) <= whole + 1e-15
        assert half_plane_log_sum(Z, m, R, side) <= whole + 1e-15
        assert whole == pytest.approx(naive(points, r, R, side), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(rand_points, rand_points, st.floats(0.01, 10), st.floats(1.5, 100))
def test_union_additivity(p1, p2, r, f):
    A, B = seq(p1), seq(p2)
    for side in ("right", "left"):
        u = half_plane_log_sum(A.union(B), r, r * f, side)
        assert u == pytest.approx(half_plane_log_sum(A, r, r * f, side) + half_plane_log_sum(B, r, r * f, side), abs=1e-12)


def test_stieltjes_identity_for_positive_sequence():
    # l(r, R) = int_r^R t^-1 dn(t) = n(R)/R - n(r)/r + int_r^R n(t)/t^2 dt, n piecewise constant
    rng = np.random.default_rng(3)
    pts = np.sort(rng.uniform(0.5, 80, 300))
    Z = seq(pts)
    r, R = 2.0, 60.0
    n = lambda t: np.count_nonzero(pts <= t)
    inner = pts[(pts > r) & (pts < R)]
    edges = np.concatenate([[r], inner, [R]])
    integral = sum(n(a) * (1 / a - 1 / b) for a, b in zip(edges[:-1], edges[1:]))
    stieltjes = n(R) / R - n(r) / r + integral
    assert log_sum(Z, r, R) == pytest.approx(stieltjes, abs=1e-12)


def test_scaling_by_power_of_two():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=200) + 1j * rng.normal(size=200)
    Z = seq(pts * 10)
    lam = 8.0
    for r, R in [(0.5, 3.0), (1.0, 40.0), (2.5, 7.25)]:
        assert lam * log_sum(Z.scaled(lam), lam * r, lam * R) == log_sum(Z, r, R)


def test_table_matches_pointwise_and_threads(tmp_path):
    rng = np.random.default_rng(11)
    Z = seq(rng.normal(size=500) * 30 + 1j * rng.normal(size=500) * 30)
    g = WindowGrid.default([0.5, 3], 100, 10)
    t1 = log_sum_table(Z, g)
    t4 = log_sum_table(Z, g, workers=4)
    assert np.array_equal(t1.right, t4.right) and np.array_equal(t1.left, t4.left)
    for (r, R), a in zip(g, t1.total):
        assert a == log_sum(Z, r, R)
    path = tmp_path / "l.csv"
    write_log_sum_csv(t1, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,R,l_rh,l_lh,l" and len(lines) == len(g) + 1


def test_annulus_additivity_random_triples():
    Z = seq(range(1, 101))
    rnd = random.Random(5)
    for _ in range(100):
        r, m, R = sorted(rnd.uniform(0.5, 120) for _ in range(3))
        lhs = half_plane_log_sum(Z, r, R, "right")
        rhs = half_plane_log_sum(Z, r, m, "right") + half_plane_log_sum(Z, m, R, "right")
        assert abs(lhs - rhs) <= 1e-12
