"""Sampled growth functions and the two-way transforms between an increasing
``Q`` with ``Q(x)/x -> 0`` and a vanishing ``d``.

The transforms are constructive:

* ``q_to_d``: ``eps(t) = sup_{x >= t} Q(x)/x`` and
  ``d(R) = sup_{r0 <= r < R} (int_r^R eps(x)/x dx) / ln(R/r)``, which gives
  ``int_r^R Q/x^2 <= d(R) ln(R/r)``.
* ``d_to_q``: ``delta(t) = sup_{s >= t} d(s)`` and ``Q(x) = sup_{t <= x} t delta(t)``,
  which gives ``d(R) ln(R/r) <= int_r^R Q/x^2``.

Both inequalities are re-checked on the output grid; see :func:`dq_slack` and
:func:`qd_slack`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

from ._io import atomic_write_text, csv_text
from .sequences import SequenceFormatError, ZeroSequence

__all__ = [
    "GrowthDiagnostic",
    "GrowthFunction",
    "q_to_d",
    "d_to_q",
    "dq_slack",
    "qd_slack",
    "synthesize_sequence",
    "mirror_sequence",
    "read_growth",
    "write_growth",
    "inverse_log_d",
]

Kind = Literal["Q", "d"]
DEFAULT_DECAY_RATIO = 0.5


class GrowthDiagnostic(UserWarning):
    """A sampled function does not show the tail decay the transforms assume."""


@dataclass(frozen=True, eq=False)
class GrowthFunction:
    """Piecewise-linear function through ``(x, value)`` samples.

    Left of the first sample the first value is held. Right of the last
    sample a ``d``-like function stays constant and a ``Q``-like function
    continues with its last slope.
    """

    x: np.ndarray
    values: np.ndarray
    kind: Kind
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float).ravel()
        v = np.array(self.values, dtype=float).ravel()
        if self.kind not in ("Q", "d"):
            raise ValueError(f"kind must be 'Q' or 'd', got {self.kind!r}")
        if x.size == 0 or x.size != v.size:
            raise ValueError("need matching, nonempty x and value samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("samples must be finite")
        if x[0] <= 0 or np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be positive and strictly increasing")
        if np.any(v < 0):
            raise ValueError("growth function values must be nonnegative")
        if self.kind == "Q" and np.any(np.diff(v) < 0):
            raise ValueError("Q-like values must be nondecreasing")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], x: Sequence[float], kind: Kind) -> "GrowthFunction":
        xs = np.asarray(x, dtype=float)
        return cls(xs, np.asarray(f(xs), dtype=float), kind)

    @classmethod
    def zero(cls, kind: Kind = "d", x0: float = 1.0) -> "GrowthFunction":
        return cls(np.array([x0]), np.array([0.0]), kind)

    @property
    def tail_rule(self) -> str:
        return "linear" if self.kind == "Q" else "constant"

    @property
    def last_slope(self) -> float:
        if self.kind == "d" or self.x.size < 2:
            return 0.0
        return float((self.values[-1] - self.values[-2]) / (self.x[-1] - self.x[-2]))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.x, self.values)
        if self.kind == "Q":
            beyond = t > self.x[-1]
            out = np.where(beyond, self.values[-1] + self.last_slope * (t - self.x[-1]), out)
        return out if out.ndim else float(out)

    def integral_over_x2(self, r: float, R: float) -> float:
        """Exact ``int_r^R f(x)/x**2 dx`` for the piecewise-linear interpolant."""
        if not (0 < r < R):
            raise ValueError(f"need 0 < r < R, got {r}, {R}")
        inner = self.x[(self.x > r) & (self.x < R)]
        p = np.concatenate([[r], inner])
        q = np.concatenate([inner, [R]])
        fp, fq = self(p), self(q)
        slope = (fq - fp) / (q - p)
        const = fp - slope * p
        terms = const * (1.0 / p - 1.0 / q) + slope * np.log(q / p)
        return math.fsum(np.atleast_1d(terms).tolist())


def _decay_diagnostic(values: np.ndarray, what: str, ratio: float) -> list[str]:
    if values.size < 2 or values[0] <= 0:
        return []
    if values[-1] > ratio * values[0]:
        return [f"{what} does not decay over the sampled range "
                f"(last/first = {values[-1] / values[0]:.3g} > {ratio})"]
    return []


def _emit(diags: list[str]) -> None:
    for msg in diags:
        warnings.warn(msg, GrowthDiagnostic, stacklevel=3)


def q_to_d(
    Q: GrowthFunction,
    r0: float,
    R_grid: Sequence[float],
    decay_ratio: float = DEFAULT_DECAY_RATIO,
) -> GrowthFunction:
    """Nonincreasing ``d`` on ``R_grid`` with ``int_r^R Q/x^2 <= d(R) ln(R/r)``.

    ``R_grid`` must lie in ``(r0, last Q sample]``. A
    :class:`GrowthDiagnostic` is emitted when ``Q(x)/x`` shows no decay.
    """
    if Q.kind != "Q":
        raise ValueError("q_to_d needs a Q-like function")
    R = np.asarray(R_grid, dtype=float)
    if R.size == 0 or np.any(np.diff(R) <= 0):
        raise ValueError("R_grid must be nonempty and strictly increasing")
    if not (r0 > 0 and R[0] > r0 and R[-1] <= Q.x[-1]):
        raise ValueError("R_grid must lie in (r0, last Q sample]")
    nodes = np.unique(np.concatenate([[r0], Q.x[(Q.x > r0) & (Q.x < R[-1])], R]))
    ratio = np.asarray(Q(nodes)) / nodes
    # Q/x is monotone between consecutive nodes, so the suffix max is the
    # exact sup of the interpolant over [node_i, last node].
    eps = np.maximum.accumulate(ratio[::-1])[::-1]
    logs = np.log(nodes[1:] / nodes[:-1])
    cum = np.concatenate([[0.0], np.cumsum(eps[:-1] * logs)])
    pos = np.searchsorted(nodes, R)
    raw = np.empty(R.size)
    for j, k in enumerate(pos):
        lo = np.arange(k)
        raw[j] = np.max((cum[k] - cum[lo]) / np.log(nodes[k] / nodes[lo]))
    d = np.maximum.accumulate(raw[::-1])[::-1]
    diags = _decay_diagnostic(eps, "Q(x)/x", decay_ratio)
    _emit(diags)
    return GrowthFunction(R, d, "d", tuple(diags))


def d_to_q(
    d: GrowthFunction,
    r0: float,
    x_grid: Sequence[float],
    decay_ratio: float = DEFAULT_DECAY_RATIO,
) -> GrowthFunction:
    """Nondecreasing ``Q`` on ``x_grid`` with ``d(R) ln(R/r) <= int_r^R Q/x^2``.

    ``Q`` at a node uses the majorant ``sup d`` from the previous node onward,
    which keeps the inequality true for the piecewise-linear interpolant
    and not only at the nodes.
    """
    if d.kind != "d":
        raise ValueError("d_to_q needs a d-like function")
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    xs = np.asarray(x_grid, dtype=float)
    nodes = np.unique(np.concatenate([[r0], xs[xs > r0]]))
    d_at = np.asarray(d(nodes), dtype=float)
    # sup of d over [t, inf): node value, later samples, constant tail
    later = np.maximum.accumulate(d.values[::-1])[::-1]
    idx = np.searchsorted(d.x, nodes, side="left")
    later_max = np.where(idx < d.x.size, later[np.minimum(idx, d.x.size - 1)], d.values[-1])
    delta = np.maximum(d_at, later_max)
    delta = np.maximum.accumulate(delta[::-1])[::-1]
    prev = np.concatenate([[delta[0]], delta[:-1]])
    Qv = np.maximum.accumulate(nodes * prev)
    diags = _decay_diagnostic(delta, "d", decay_ratio)
    diags += _decay_diagnostic(Qv / nodes, "Q(x)/x", decay_ratio)
    _emit(diags)
    return GrowthFunction(nodes, Qv, "Q", tuple(diags))


def dq_slack(Q: GrowthFunction, d: GrowthFunction, pairs: Sequence[tuple[float, float]]) -> float:
    """``min over pairs of d(R) ln(R/r) - int_r^R Q/x^2``; nonnegative when the
    first inequality holds."""
    return min(float(d(R)) * math.log(R / r) - Q.integral_over_x2(r, R) for r, R in pairs)


def qd_slack(d: GrowthFunction, Q: GrowthFunction, pairs: Sequence[tuple[float, float]]) -> float:
    """``min over pairs of int_r^R Q/x^2 - d(R) ln(R/r)``."""
    return min(Q.integral_over_x2(r, R) - float(d(R)) * math.log(R / r) for r, R in pairs)


def synthesize_sequence(Q: GrowthFunction, r_max: float, r0: float | None = None) -> ZeroSequence:
    """Positive sequence whose counting function is ``floor(Q(r))`` on ``[r0, r_max]``.

    ``q_k = inf{r >= r0 : Q(r) >= k}`` for ``k = 1 .. floor(Q(r_max))``,
    located by bisection over the samples and solved exactly inside the
    bracketing linear piece.
    """
    if Q.kind != "Q":
        raise ValueError("synthesize_sequence needs a Q-like function")
    r0 = float(Q.x[0]) if r0 is None else float(r0)
    if not (0 < r0 <= r_max):
        raise ValueError("need 0 < r0 <= r_max")
    K = int(math.floor(float(Q(r_max))))
    if K < 1:
        return ZeroSequence()
    xs = np.unique(np.concatenate([[r0], Q.x[(Q.x > r0) & (Q.x < r_max)], [r_max]]))
    vs = np.asarray(Q(xs), dtype=float)
    k = np.arange(1, K + 1, dtype=float)
    idx = np.searchsorted(vs, k, side="left")
    out = np.empty(K)
    at_start = idx == 0
    out[at_start] = r0
    i = idx[~at_start]
    x0, x1, v0, v1 = xs[i - 1], xs[i], vs[i - 1], vs[i]
    t = x0 + (k[~at_start] - v0) / (v1 - v0) * (x1 - x0)
    # keep each point strictly inside its bracket so counts at samples are exact
    t = np.minimum(np.maximum(t, np.nextafter(x0, np.inf)), x1)
    t = np.where(k[~at_start] == v1, x1, t)
    out[~at_start] = t
    return ZeroSequence(out.astype(complex))


def mirror_sequence(S: ZeroSequence) -> ZeroSequence:
    return ZeroSequence(-S.points)


def inverse_log_d(x: Sequence[float]) -> GrowthFunction:
    """Samples of ``d(R) = 1/ln(e + R)``."""
    xs = np.asarray(x, dtype=float)
    return GrowthFunction(xs, 1.0 / np.log(math.e + xs), "d")


# -- file format -------------------------------------------------------------


def write_growth(G: GrowthFunction, path: str | Path) -> None:
    preamble = f"# kind={G.kind} tail={G.tail_rule}\n"
    rows = [(float(a), float(b)) for a, b in zip(G.x, G.values)]
    atomic_write_text(path, csv_text(["x", "value"], rows, preamble))


def read_growth(path: str | Path) -> GrowthFunction:
    """Read ``# kind=<Q|d> tail=<linear|constant>`` + ``x,value`` CSV."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SequenceFormatError("missing '# kind=... tail=...' header line", 1)
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split() if "=" in tok)
    kind = meta.get("kind")
    if kind not in ("Q", "d"):
        raise SequenceFormatError(f"unknown kind {kind!r}", 1)
    expected_tail = "linear" if kind == "Q" else "constant"
    if meta.get("tail", expected_tail) != expected_tail:
        raise SequenceFormatError(f"kind {kind} requires tail={expected_tail}", 1)
    if len(lines) < 2 or lines[1].replace(" ", "").lower() != "x,value":
        raise SequenceFormatError("expected column header 'x,value'", 2)
    xs, vs = [], []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 2:
            raise SequenceFormatError(f"expected 2 columns, got {len(cells)}", lineno)
        try:
            a, b = float(cells[0]), float(cells[1])
        except ValueError:
            raise SequenceFormatError(f"cannot parse {line!r}", lineno) from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise SequenceFormatError("non-finite value", lineno)
        xs.append(a)
        vs.append(b)
    try:
        return GrowthFunction(np.array(xs), np.array(vs), kind)
    except ValueError as exc:
        raise SequenceFormatError(str(exc)) from None
