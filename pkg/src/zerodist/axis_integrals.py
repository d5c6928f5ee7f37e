"""Imaginary-axis log-integral by adaptive Gauss-Kronrod quadrature.

For a log-modulus ``v(y) = ln|f(iy)|`` the quantity computed is

    J(r, R; v) = 1/(2 pi) * integral_r^R (v(-y) + v(y)) / y**2 dy.

``v`` may be ``-inf`` at isolated points (zeros of ``f`` on the axis). Such
points are either declared up front or discovered when a quadrature node lands
on one; the integration range is split there and refined geometrically.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .log_sums import WindowGrid

__all__ = [
    "DEFAULT_TOL",
    "LogModulus",
    "QuadratureError",
    "axis_integral",
    "axis_integral_grid",
]

DEFAULT_TOL = 1e-8
SINGULAR_FLOOR = 1e-12
MAX_INTERVALS = 5000

# 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_GAUSS_IDX = np.arange(1, 15, 2)


class QuadratureError(RuntimeError):
    """Quadrature did not reach the tolerance within the subdivision budget."""

    def __init__(self, message: str, window=None, worst_interval=None, error_estimate=None):
        self.window = window
        self.worst_interval = worst_interval
        self.error_estimate = error_estimate
        details = []
        if window is not None:
            details.append(f"window={window}")
        if worst_interval is not None:
            details.append(f"worst interval=[{worst_interval[0]!r}, {worst_interval[1]!r}]")
        if error_estimate is not None:
            details.append(f"error estimate={error_estimate:.3e}")
        super().__init__(message + (" (" + ", ".join(details) + ")" if details else ""))


@dataclass(frozen=True)
class LogModulus:
    """``y -> ln|f(iy)|`` on the real line, vectorised over numpy arrays.

    ``singular_points`` lists real ``y`` with ``f(iy) = 0``. ``even`` declares
    ``v(-y) == v(y)`` so that only one side is evaluated.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    singular_points: tuple[float, ...] = ()
    even: bool = False
    label: str = ""

    def __call__(self, y):
        return self.eval(np.asarray(y, dtype=float))

    def symmetric_sum(self, y: np.ndarray) -> np.ndarray:
        """``v(-y) + v(y)``."""
        if self.even:
            return 2.0 * np.asarray(self.eval(y), dtype=float)
        return np.asarray(self.eval(-y), dtype=float) + np.asarray(self.eval(y), dtype=float)

    def scaled(self, a: float) -> "LogModulus":
        return LogModulus(lambda y: a * self.eval(y), self.singular_points, self.even, f"{a}*{self.label}")

    def __add__(self, other: "LogModulus") -> "LogModulus":
        return LogModulus(
            lambda y: self.eval(y) + other.eval(y),
            tuple(sorted(set(self.singular_points) | set(other.singular_points))),
            self.even and other.even,
            f"{self.label}+{other.label}",
        )


def _integrand(v: LogModulus):
    def f(y: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return v.symmetric_sum(y) / (2.0 * math.pi * y * y)
    return f


def _gk15(f, a: float, b: float):
    """Kronrod estimate, |Kronrod - Gauss| and the nodes used."""
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    x = c + h * _XK
    fx = f(x)
    if not np.all(np.isfinite(fx)):
        return math.nan, math.nan, x, fx  # caller inspects fx
    return h * float(fx @ _WK), abs(h * float(fx @ _WK - fx[_GAUSS_IDX] @ _WG)), x, fx


def _singular_breaks(points: Sequence[float], a: float, b: float) -> list[float]:
    """Breakpoints clustering geometrically onto each singular point in [a, b]."""
    breaks = set()
    for s in sorted({abs(p) for p in points}):
        if not (a <= s <= b):
            continue
        breaks.add(s)
        h = 0.5 * min(1.0, b - a)
        while h >= SINGULAR_FLOOR:
            for t in (s - h, s + h):
                if a < t < b:
                    breaks.add(t)
            h *= 0.1
    return sorted(breaks)


def _adaptive(f, a: float, b: float, tol: float, singular: Sequence[float], max_intervals: int):
    """Global adaptive bisection on [a, b]; returns (value, error estimate)."""
    edges = [a] + [t for t in _singular_breaks(singular, a, b) if a < t < b] + [b]
    heap: list[tuple[float, float, float, float]] = []
    count = 0

    def push(lo: float, hi: float) -> float:
        """Add [lo, hi] (split at any discovered singularity); return its error estimate."""
        nonlocal count
        val, err, x, fx = _gk15(f, lo, hi)
        count += 1
        if not np.all(np.isfinite(fx)):
            bad = ~np.isfinite(fx)
            if np.any(np.isnan(fx) | (fx == np.inf)):
                raise QuadratureError("integrand is NaN or +inf", worst_interval=(lo, hi))
            # -inf at a node: treat that node as a discovered singular point
            s = float(x[bad][0])
            pieces = [lo] + [u for u in _singular_breaks([s], lo, hi) if lo < u < hi] + [hi]
            if count > max_intervals:
                raise QuadratureError("subdivision budget exhausted", worst_interval=(lo, hi))
            return sum(push(p, q) for p, q in zip(pieces[:-1], pieces[1:]))
        heapq.heappush(heap, (-err, lo, hi, val))
        return err

    for lo, hi in zip(edges[:-1], edges[1:]):
        push(lo, hi)

    # running total is cheap but drifts; confirm with an exact sum before stopping
    total_err = math.fsum(-e for e, *_ in heap)
    while True:
        if total_err <= tol:
            total_err = math.fsum(-e for e, *_ in heap)
            if total_err <= tol:
                break
        if heap[0][0] == 0.0:
            break  # nothing left that can be refined
        if count >= max_intervals:
            e, lo, hi, _ = heap[0]
            raise QuadratureError(
                "subdivision budget exhausted", worst_interval=(lo, hi), error_estimate=total_err
            )
        e, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval cannot be split further in floating point; accept it
            heapq.heappush(heap, (0.0, lo, hi, _))
            total_err += e
            continue
        total_err += e + push(lo, mid) + push(mid, hi)

    # sort by position so the sum does not depend on heap order
    pieces = sorted((lo, val, -e) for e, lo, hi, val in heap)
    return math.fsum(p[1] for p in pieces), math.fsum(p[2] for p in pieces)


def axis_integral(
    v: LogModulus,
    r: float,
    R: float,
    tol: float = DEFAULT_TOL,
    max_intervals: int = MAX_INTERVALS,
) -> float:
    """Estimate ``J(r, R; v)`` with estimated absolute error at most ``tol``.

    Raises:
        ValueError: if the window or tolerance is invalid.
        QuadratureError: if the subdivision budget runs out; the exception
            carries the subinterval with the largest error estimate.
    """
    if not (0 < r < R):
        raise ValueError(f"window requires 0 < r < R, got r={r}, R={R}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    try:
        value, _ = _adaptive(_integrand(v), float(r), float(R), tol, v.singular_points, max_intervals)
    except QuadratureError as exc:
        raise QuadratureError(
            "axis integral did not converge", (r, R), exc.worst_interval, exc.error_estimate
        ) from None
    return value


def axis_integral_grid(
    v: LogModulus,
    grid: WindowGrid | Sequence[tuple[float, float]],
    tol: float = DEFAULT_TOL,
    workers: int = 1,
    max_intervals: int = MAX_INTERVALS,
) -> np.ndarray:
    """``axis_integral`` on every window, sharing work across overlapping windows.

    All window endpoints are merged into one breakpoint set; each elementary
    piece is integrated once with tolerance ``tol / k``, where ``k`` is the
    largest number of pieces any window spans, and window values are exact
    (``fsum``) sums of their pieces. Per-window error therefore stays within
    ``tol``.
    """
    if not isinstance(grid, WindowGrid):
        grid = WindowGrid(tuple(grid))
    if not tol > 0:
        raise ValueError("tol must be positive")
    if len(grid) == 0:
        return np.empty(0)
    edges = np.unique(np.concatenate([grid.r, grid.R]))
    lo_idx = np.searchsorted(edges, grid.r)
    hi_idx = np.searchsorted(edges, grid.R)
    needed = np.zeros(edges.size - 1, dtype=bool)
    for i, j in zip(lo_idx, hi_idx):
        needed[i:j] = True
    span = int(np.max(hi_idx - lo_idx))
    piece_tol = tol / span
    f = _integrand(v)
    jobs = [int(k) for k in np.flatnonzero(needed)]

    def one(k: int):
        a, b = float(edges[k]), float(edges[k + 1])
        try:
            return _adaptive(f, a, b, piece_tol, v.singular_points, max_intervals)[0], None
        except QuadratureError as exc:
            return math.nan, exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(k) for k in jobs]

    piece = np.full(edges.size - 1, math.nan)
    failures = {}
    for k, (val, exc) in zip(jobs, results):
        piece[k] = val
        if exc is not None:
            failures[k] = exc
    out = np.empty(len(grid))
    for w, (i, j) in enumerate(zip(lo_idx, hi_idx)):
        bad = [k for k in range(i, j) if k in failures]
        if bad:
            exc = failures[bad[0]]
            raise QuadratureError(
                "axis integral did not converge", grid.pairs[w], exc.worst_interval, exc.error_estimate
            )
        out[w] = math.fsum(piece[i:j].tolist())
    return out
