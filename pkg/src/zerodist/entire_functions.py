"""Log-moduli of even canonical products and of ``sin(pi b z)``, indicator
estimates, and support-function / width arithmetic for convex polygons."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .axis_integrals import LogModulus
from .sequences import ZeroSequence

__all__ = [
    "DegenerateFunctionWarning",
    "CanonicalProduct",
    "ConvexCompactPoly",
    "IndicatorEstimate",
    "log_sinh",
    "product_log_modulus",
    "product_axis_logmod",
    "sin_log_modulus",
    "sin_axis_logmod",
    "constant_axis_logmod",
    "indicator_estimate",
    "type_estimate",
    "support_function",
    "width0",
    "balancing_shift",
    "width_admissible",
]

# bound on zeros x evaluation points held in memory at once
_CHUNK_ELEMENTS = 1 << 21


class DegenerateFunctionWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class CanonicalProduct:
    """``z -> prod_k (1 - z**2 / w_k**2)``; vanishes exactly on ``+-w_k``.

    All ``w_k`` must lie in the open right half-plane.
    """

    zeros: ZeroSequence

    def __post_init__(self) -> None:
        if not isinstance(self.zeros, ZeroSequence):
            object.__setattr__(self, "zeros", ZeroSequence(np.asarray(self.zeros, dtype=complex)))
        if np.any(self.zeros.points.real <= 0):
            raise ValueError("canonical product zeros must have positive real part")

    def times(self, other: "CanonicalProduct") -> "CanonicalProduct":
        return CanonicalProduct(self.zeros.union(other.zeros))

    @property
    def zero_set(self) -> ZeroSequence:
        """Full zero set ``W`` united with ``-W``."""
        return self.zeros.union(ZeroSequence(-self.zeros.points))

    def __len__(self) -> int:
        return len(self.zeros)


def _log_abs_one_minus_ratio(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``ln|1 - z**2/w**2|`` elementwise (broadcast), accurate for small ratios
    and exactly ``-inf`` when ``z = +-w``."""
    z, w = np.broadcast_arrays(z, w)
    u = (z * z) / (w * w)
    small = np.abs(u) < 0.5
    out = np.empty(u.shape)
    us = u[small]
    out[small] = 0.5 * np.log1p(us.real * us.real + us.imag * us.imag - 2.0 * us.real)
    zb, wb = z[~small], w[~small]
    with np.errstate(divide="ignore"):
        out[~small] = np.log(np.abs(wb - zb)) + np.log(np.abs(wb + zb)) - 2.0 * np.log(np.abs(wb))
    return out


def product_log_modulus(P: CanonicalProduct, z):
    """``sum_k ln|1 - z**2/w_k**2|`` term by term; ``-inf`` exactly at ``+-w_k``.

    Accepts a scalar or an array of complex ``z``. Each row of terms is reduced
    with numpy's pairwise summation in modulus order, so the result does not
    depend on the order of the zeros or on threading.
    """
    zs = np.asarray(z, dtype=complex)
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs).ravel()
    w = P.zeros.by_modulus
    out = np.zeros(zs.size)
    if w.size:
        step = max(1, _CHUNK_ELEMENTS // w.size)
        for start in range(0, zs.size, step):
            terms = _log_abs_one_minus_ratio(zs[start:start + step, None], w[None, :])
            out[start:start + step] = terms.sum(axis=1)
    out = out.reshape(np.shape(z)) if not scalar else out
    return float(out[0]) if scalar else out


def product_axis_logmod(P: CanonicalProduct) -> LogModulus:
    """``y -> ln|P(iy)|``. Right-half-plane zeros never sit on the axis."""
    if len(P) == 0:
        return constant_axis_logmod(0.0)
    return LogModulus(
        lambda y: product_log_modulus(P, 1j * np.asarray(y, dtype=float)),
        even=True,
        label=f"product[{len(P)}]",
    )


def log_sinh(x):
    """``ln(sinh x)`` for ``x > 0`` without overflow or cancellation."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = x - math.log(2.0) + np.log(-np.expm1(-2.0 * x))
    return out if out.ndim else float(out)


def sin_log_modulus(b: float, y):
    """``ln|sin(pi b iy)| = ln sinh(pi b |y|)``.

    ``b = 0`` is the zero function; the result is ``-inf`` and a
    :class:`DegenerateFunctionWarning` is issued.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    if b == 0:
        warnings.warn("sin(0*z) vanishes identically", DegenerateFunctionWarning, stacklevel=2)
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, -np.inf)
        return out if out.ndim else float(out)
    return log_sinh(math.pi * b * np.abs(np.asarray(y, dtype=float)))


def sin_axis_logmod(b: float) -> LogModulus:
    """``y -> ln|sin(pi b iy)|``; its only axis zero is ``y = 0``."""
    if b <= 0:
        raise ValueError("sin axis log-modulus needs b > 0")
    return LogModulus(lambda y: sin_log_modulus(b, y), singular_points=(0.0,), even=True, label=f"sin({b}*pi*z)")


def constant_axis_logmod(c: float = 0.0) -> LogModulus:
    return LogModulus(lambda y: np.full(np.shape(y), float(c)), even=True, label=f"const({c})")


@dataclass(frozen=True)
class IndicatorEstimate:
    value: float
    r_window: tuple[float, float]
    samples_used: int
    skipped: int


def indicator_estimate(
    logmod_along_ray: Callable[[np.ndarray], np.ndarray],
    r_grid: Sequence[float],
    tail_fraction: float = 0.5,
) -> IndicatorEstimate:
    """Estimate the growth indicator on one ray as a max of ``ln|f|/r`` over the
    upper ``tail_fraction`` of ``r_grid``.

    No extrapolation is attempted; the window used is part of the result.
    Samples equal to ``-inf`` (the ray meets a zero) are skipped with a warning.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise ValueError("r_grid needs at least 2 increasing positive points")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    start = min(r.size - 1, int(math.floor(r.size * (1 - tail_fraction))))
    tail = r[start:]
    vals = np.asarray(logmod_along_ray(tail), dtype=float)
    bad = np.isneginf(vals)
    if np.any(bad):
        warnings.warn(f"skipped {int(bad.sum())} samples where the ray hits a zero", RuntimeWarning, stacklevel=2)
    if np.all(bad):
        raise ValueError("every tail sample is a zero of f")
    ratios = vals[~bad] / tail[~bad]
    return IndicatorEstimate(float(np.max(ratios)), (float(tail[0]), float(tail[-1])), int(ratios.size), int(bad.sum()))


def type_estimate(
    logmod: Callable[[np.ndarray], np.ndarray],
    r_grid: Sequence[float],
    n_directions: int = 64,
    tail_fraction: float = 0.5,
) -> float:
    """Max of indicator estimates over equally spaced rays.

    ``logmod`` maps complex points to ``ln|f|``.
    """
    best = -math.inf
    for theta in np.linspace(0.0, 2 * math.pi, n_directions, endpoint=False):
        e = np.exp(1j * theta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            est = indicator_estimate(lambda r, e=e: logmod(r * e), r_grid, tail_fraction)
        best = max(best, est.value)
    return best


# -- convex polygons ---------------------------------------------------------


def _hull(points: Iterable[complex]) -> list[complex]:
    pts = sorted({(p.real, p.imag) for p in map(complex, points)})
    if len(pts) <= 2:
        return [complex(*p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [complex(*p) for p in lower[:-1] + upper[:-1]]


@dataclass(frozen=True)
class ConvexCompactPoly:
    """Convex polygon (possibly a segment or a point) given by its vertices."""

    vertices: tuple[complex, ...]

    def __post_init__(self) -> None:
        verts = tuple(complex(v) for v in self.vertices)
        if not verts:
            raise ValueError("polygon needs at least one vertex")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in verts):
            raise ValueError("polygon vertices must be finite")
        if len(set(verts)) != len(verts) or set(_hull(verts)) != set(verts):
            raise ValueError("vertices are not the convex hull of themselves; use ConvexCompactPoly.hull")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def hull(cls, points: Iterable[complex]) -> "ConvexCompactPoly":
        return cls(tuple(_hull(points)))

    def translated(self, shift: complex) -> "ConvexCompactPoly":
        return ConvexCompactPoly(tuple(v + shift for v in self.vertices))


def support_function(K: ConvexCompactPoly, theta: float) -> float:
    """``max over vertices of Re(v * exp(-i theta))``."""
    e = complex(math.cos(theta), -math.sin(theta))
    return max((v * e).real for v in K.vertices)


def width0(K: ConvexCompactPoly) -> float:
    """Vertical extent ``max Im - min Im``."""
    ims = [v.imag for v in K.vertices]
    return max(ims) - min(ims)


def balancing_shift(h_up: float, h_down: float) -> tuple[float, float]:
    """Real ``a`` such that ``exp(iaz) f`` has equal indicator at ``+-pi/2``.

    Multiplying by ``exp(iaz)`` lowers the indicator at ``pi/2`` by ``a`` and
    raises it at ``-pi/2`` by ``a``. Returns ``(a, common value)``.
    """
    a = 0.5 * (h_up - h_down)
    return a, 0.5 * (h_up + h_down)


def width_admissible(K: ConvexCompactPoly, b: float) -> bool:
    """Whether ``width0(K) <= 2 pi b``."""
    return width0(K) <= 2 * math.pi * b
