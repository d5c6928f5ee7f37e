import contextlib
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerodist.growth import (
    GrowthDiagnostic,
    GrowthFunction,
    d_to_q,
    dq_slack,
    inverse_log_d,
    mirror_sequence,
    q_to_d,
    qd_slack,
    read_growth,
    synthesize_sequence,
    write_growth,
)
from zerodist.sequences import SequenceFormatError, radial_counting, upper_density

from conftest import seq


def simpson(f, a, b, n=20_000):
    x = np.linspace(a, b, n + 1)
    fx = f(x)
    h = (b - a) / n
    return h / 3 * (fx[0] + fx[-1] + 4 * fx[1:-1:2].sum() + 2 * fx[2:-1:2].sum())


def window_pairs(lo, hi, n=12):
    pts = np.geomspace(lo, hi, n)
    return [(float(a), float(b)) for i, a in enumerate(pts) for b in pts[i + 1:]]


@contextlib.contextmanager
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GrowthDiagnostic)
        yield


SQRT = GrowthFunction.from_function(np.sqrt, np.geomspace(1, 1e6, 601), "Q")


# -- the interpolant ---------------------------------------------------------


def test_interpolation_and_tails():
    Q = GrowthFunction([1, 2, 4], [0, 1, 2], "Q")
    assert Q(0.5) == 0.0
    assert Q(3) == 1.5
    assert Q(8) == 4.0  # last slope 1/2 continues
    d = GrowthFunction([1, 2], [3, 1], "d")
    assert d(100) == 1.0 and d.tail_rule == "constant" and Q.tail_rule == "linear"


@pytest.mark.parametrize(
    "x,values,kind",
    [
        ([1, 2], [2, 1], "Q"),
        ([1, 1], [0, 0], "d"),
        ([0, 1], [0, 0], "d"),
        ([1, 2], [-1, 0], "d"),
        ([1, 2], [0, np.nan], "Q"),
        ([1, 2], [0], "Q"),
        ([1, 2], [0, 1], "x"),
    ],
)
def test_invalid_samples(x, values, kind):
    with pytest.raises(ValueError):
        GrowthFunction(x, values, kind)


@pytest.mark.parametrize("r,R", [(1, 2), (1.5, 700), (0.5, 3), (900, 5000)])
def test_integral_over_x2_against_simpson(r, R):
    Q = GrowthFunction([1, 3, 10, 1000], [0, 2, 3, 50], "Q")
    # the interpolant is smooth between its kinks
    cuts = [r] + [t for t in Q.x if r < t < R] + [R]
    oracle = math.fsum(simpson(lambda t: Q(t) / t**2, a, b) for a, b in zip(cuts, cuts[1:]))
    assert Q.integral_over_x2(r, R) == pytest.approx(oracle, rel=1e-9)


def test_integral_closed_forms():
    lin = GrowthFunction([1, 2], [1, 2], "Q")
    assert lin.integral_over_x2(3, 30) == pytest.approx(math.log(10), rel=1e-14)
    const = GrowthFunction([1], [2.0], "d")
    assert const.integral_over_x2(2, 4) == pytest.approx(0.5, rel=1e-14)


# -- Q -> d ------------------------------------------------------------------


def test_linear_q_gives_constant_d_and_diagnostic():
    Q = GrowthFunction.from_function(lambda x: 0.3 * x, np.geomspace(1, 1e4, 50), "Q")
    with pytest.warns(GrowthDiagnostic):
        d = q_to_d(Q, 1.0, np.geomspace(2, 1e4, 20))
    assert np.allclose(d.values, 0.3, rtol=1e-12)
    assert d.diagnostics


def test_sqrt_q_matches_continuous_formula():
    R = np.geomspace(2, 1e6, 60)
    d = q_to_d(SQRT, 1.0, R)
    closed = 2 * (1 - R**-0.5) / np.log(R)
    assert np.all(d.values >= closed * (1 - 1e-12))
    assert np.all(d.values <= closed * 1.03)
    assert np.all(np.diff(d.values) <= 0)


def test_q_to_d_rejects_bad_grid():
    with pytest.raises(ValueError):
        q_to_d(SQRT, 1.0, [0.5, 10])
    with pytest.raises(ValueError):
        q_to_d(SQRT, 1.0, [10, 2e6])
    with pytest.raises(ValueError):
        q_to_d(GrowthFunction([1], [0], "d"), 1.0, [2])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.1, 10), st.floats(1, 5))
def test_q_to_d_inequality_holds(a, c, r0):
    Q = GrowthFunction.from_function(lambda x: c * x**a, np.geomspace(0.5, 1e5, 300), "Q")
    with quiet():
        d = q_to_d(Q, r0, np.geomspace(r0 * 1.5, 1e5, 40))
    pairs = window_pairs(r0, 1e5)
    assert dq_slack(Q, d, [(r, R) for r, R in pairs if R >= d.x[0]]) >= -1e-12


# -- d -> Q ------------------------------------------------------------------


def test_constant_d_gives_linear_q():
    d = GrowthFunction([1.0], [0.25], "d")
    with pytest.warns(GrowthDiagnostic):
        Q = d_to_q(d, 1.0, np.geomspace(1, 1e3, 30))
    assert np.allclose(Q.values, 0.25 * Q.x, rtol=1e-12)


def test_invlog_d_to_q_monotone_and_valid():
    x = np.geomspace(1, 1e5, 400)
    d = inverse_log_d(x)
    Q = d_to_q(d, 1.0, x)
    assert np.all(np.diff(Q.values) >= 0)
    ratio = Q.values / Q.x
    assert ratio[-1] < 0.5 * ratio[1]
    assert qd_slack(d, Q, window_pairs(1, 1e5)) >= -1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.05, 1), st.floats(0.5, 4))
def test_d_to_q_inequality_holds(c, p, r0):
    x = np.geomspace(r0, 1e5, 250)
    d = GrowthFunction.from_function(lambda t: c * (1 + t) ** -p, x, "d")
    with quiet():
        Q = d_to_q(d, r0, x)
    assert qd_slack(d, Q, window_pairs(r0, 1e5)) >= -1e-12


def test_round_trip_d_q_d_dominates():
    x = np.geomspace(1, 1e5, 300)
    d = inverse_log_d(x)
    Q = d_to_q(d, 1.0, x)
    R = x[1:]
    d2 = q_to_d(Q, 1.0, R)
    assert np.all(d2.values >= np.asarray(d(R)) * (1 - 1e-12))


# -- synthesis ---------------------------------------------------------------


def test_sqrt_synthesizes_squares():
    Q = GrowthFunction.from_function(np.sqrt, np.arange(1.0, 101.0), "Q")
    q = synthesize_sequence(Q, 100.0)
    assert np.allclose(q.points.real, np.arange(1, 11) ** 2, rtol=1e-14)


def test_log_synthesizes_exp_minus_one():
    x = np.linspace(0.01, 10, 5000)
    Q = GrowthFunction.from_function(np.log1p, x, "Q")
    q = synthesize_sequence(Q, 10.0, r0=0.01)
    assert q.points.real == pytest.approx([math.e - 1, math.e**2 - 1], rel=1e-6)


def test_counting_equals_floor_q_at_samples():
    x = np.geomspace(1, 1e4, 500)
    Q = GrowthFunction.from_function(lambda t: 3 * t**0.6, x, "Q")
    q = synthesize_sequence(Q, 1e4)
    for r in x[::7]:
        assert radial_counting(q, r) == math.floor(Q(r))


def test_synthesized_density_tends_to_zero():
    q = synthesize_sequence(SQRT, 1e6)
    assert upper_density(q, 1e4) < 0.011
    assert upper_density(q, 1e5) < upper_density(q, 1e3)


def test_synthesize_empty_and_errors():
    assert len(synthesize_sequence(GrowthFunction([1, 10], [0, 0.5], "Q"), 10)) == 0
    with pytest.raises(ValueError):
        synthesize_sequence(SQRT, 10, r0=20)
    with pytest.raises(ValueError):
        synthesize_sequence(GrowthFunction([1], [1], "d"), 10)


def test_mirror_sequence():
    m = mirror_sequence(seq([1, 2 + 1j]))
    assert sorted(m.points, key=lambda z: z.real) == [-2 - 1j, -1]


# -- file format -------------------------------------------------------------


@pytest.mark.parametrize("kind", ["Q", "d"])
def test_growth_csv_round_trip(tmp_path, kind):
    G = GrowthFunction([0.1, 1 / 3, 7.0], [1.0, 1.0 if kind == "d" else 2.0, 0.7 if kind == "d" else 9.0], kind)
    path = tmp_path / "g.csv"
    write_growth(G, path)
    back = read_growth(path)
    assert back.kind == kind
    assert np.array_equal(back.x, G.x) and np.array_equal(back.values, G.values)


@pytest.mark.parametrize(
    "text,line",
    [
        ("x,value\n1,2\n", 1),
        ("# kind=Z tail=linear\nx,value\n", 1),
        ("# kind=Q tail=constant\nx,value\n", 1),
        ("# kind=Q tail=linear\nx,y\n", 2),
        ("# kind=Q tail=linear\nx,value\n1,2\n2,oops\n", 4),
        ("# kind=d tail=constant\nx,value\n1,2,3\n", 3),
    ],
)
def test_growth_csv_errors(tmp_path, text, line):
    path = tmp_path / "g.csv"
    path.write_text(text)
    with pytest.raises(SequenceFormatError) as info:
        read_growth(path)
    assert info.value.line == line
