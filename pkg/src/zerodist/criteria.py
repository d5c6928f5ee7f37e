"""Finite-window evaluation of logarithmic-sum criteria.

Every check tabulates ``excess = lhs - rhs`` over a :class:`WindowGrid`, fits
the additive constant as ``C = max(0, sup excess)`` and summarises growth of
the running supremum against ``ln R`` as a trend slope. Verdicts are proxies:
``bounded`` means the data are consistent with the inequality holding for
some constant, ``divergent`` means they are not.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from ._io import csv_text
from .axis_integrals import DEFAULT_TOL, LogModulus, axis_integral_grid
from .entire_functions import CanonicalProduct, product_axis_logmod
from .growth import GrowthFunction, d_to_q, mirror_sequence, synthesize_sequence
from .log_sums import WindowGrid, log_sum_table
from .sequences import DEFAULT_SEPARATION_THRESHOLD, ZeroSequence, separation_margin

__all__ = [
    "HypothesisWarning",
    "Thresholds",
    "CriterionReport",
    "PipelineResult",
    "excess_table",
    "mr_check",
    "dominance_check",
    "logmod_dominance_check",
    "multiplier_check",
    "width_check",
    "completeness_diagnostic",
    "lemma_gap",
    "majorant_pipeline",
]

BOUNDED, DIVERGENT, INCONCLUSIVE = "bounded", "divergent", "inconclusive"


class HypothesisWarning(UserWarning):
    """An input violates a standing hypothesis (e.g. axis separation)."""


@dataclass(frozen=True)
class Thresholds:
    """Verdict rules.

    ``trend_fraction`` is the upper share of the ``ln R`` range used for the
    least-squares slope.
    """

    trend_bounded: float = 0.01
    trend_divergent: float = 0.05
    trend_fraction: float = 0.5
    separation: float = DEFAULT_SEPARATION_THRESHOLD

    def __post_init__(self) -> None:
        if not self.trend_bounded <= self.trend_divergent:
            raise ValueError("trend_bounded must not exceed trend_divergent")
        if not 0 < self.trend_fraction <= 1:
            raise ValueError("trend_fraction must lie in (0, 1]")


@dataclass
class CriterionReport:
    criterion_id: str
    grid: WindowGrid
    lhs: np.ndarray
    rhs: np.ndarray
    excess: np.ndarray
    sup_excess: float
    C: float
    trend: float
    verdict: str
    R_levels: np.ndarray
    running_sup: np.ndarray
    parameters: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    uncertainty: float = 0.0

    @property
    def summary(self) -> str:
        if self.verdict == BOUNDED:
            return f"{self.criterion_id}: consistent with the inequality (C = {self.C:.6g})"
        if self.verdict == DIVERGENT:
            return f"{self.criterion_id}: inconsistent with the inequality (trend {self.trend:.4g} per unit ln R)"
        return f"{self.criterion_id}: inconclusive on this window (trend {self.trend:.4g})"

    def to_dict(self) -> dict:
        return {
            "tool": "zerodist",
            "version": __version__,
            "criterion_id": self.criterion_id,
            "parameters": self.parameters,
            "grid": [list(p) for p in self.grid.pairs],
            "lhs": [float(v) for v in self.lhs],
            "rhs": [float(v) for v in self.rhs],
            "excess": [float(v) for v in self.excess],
            "sup_excess": float(self.sup_excess),
            "C": float(self.C),
            "trend": float(self.trend),
            "verdict": self.verdict,
            "summary": self.summary,
            "uncertainty": float(self.uncertainty),
            "running_sup": [[float(a), float(b)] for a, b in zip(self.R_levels, self.running_sup)],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def surface_csv(self) -> str:
        rows = [
            (r, R, float(a), float(b), float(c))
            for (r, R), a, b, c in zip(self.grid.pairs, self.lhs, self.rhs, self.excess)
        ]
        return csv_text(["r", "R", "lhs", "rhs", "excess"], rows)


def _values(side, grid: WindowGrid) -> np.ndarray:
    if callable(side):
        return np.array([float(side(r, R)) for r, R in grid.pairs])
    arr = np.asarray(side, dtype=float)
    if arr.shape != (len(grid),):
        raise ValueError(f"expected {len(grid)} values, got shape {arr.shape}")
    return arr


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def excess_table(
    lhs: Callable[[float, float], float] | Sequence[float],
    rhs: Callable[[float, float], float] | Sequence[float],
    grid: WindowGrid,
    criterion_id: str = "custom",
    thresholds: Thresholds | None = None,
    parameters: dict | None = None,
    notes: Sequence[str] = (),
    uncertainty: float = 0.0,
) -> CriterionReport:
    """Tabulate ``lhs - rhs`` on ``grid`` and classify its growth.

    The running sup ``S(R*) = max{excess(r, R) : R <= R*}`` is regressed on
    ``ln R*`` over the upper ``trend_fraction`` of the ``ln R`` range (at
    least the last two levels). Verdict: ``bounded`` if the slope is below
    ``trend_bounded``; ``divergent`` if it exceeds ``trend_divergent`` and
    the per-level maximum is nondecreasing over the last decade of ``R``;
    ``inconclusive`` otherwise.
    """
    if len(grid) == 0:
        raise ValueError("grid is empty")
    th = thresholds or Thresholds()
    lv, rv = _values(lhs, grid), _values(rhs, grid)
    excess = lv - rv
    R = grid.R
    levels = np.unique(R)
    level_max = np.array([np.max(excess[R == L]) for L in levels])
    running = np.maximum.accumulate(level_max)
    logs = np.log(levels)
    if levels.size >= 2:
        cut = logs[-1] - th.trend_fraction * (logs[-1] - logs[0])
        use = logs >= cut
        if use.sum() < 2:
            use[-2:] = True
        trend = _slope(logs[use], running[use])
    else:
        trend = 0.0
    last_decade = levels >= levels[-1] / 10.0
    monotone = bool(np.all(np.diff(level_max[last_decade]) >= 0))
    if trend < th.trend_bounded:
        verdict = BOUNDED
    elif trend > th.trend_divergent and monotone:
        verdict = DIVERGENT
    else:
        verdict = INCONCLUSIVE
    sup = float(np.max(excess))
    params = dict(parameters or {})
    params["thresholds"] = {
        "trend_bounded": th.trend_bounded,
        "trend_divergent": th.trend_divergent,
        "trend_fraction": th.trend_fraction,
    }
    return CriterionReport(
        criterion_id, grid, lv, rv, excess, sup, max(0.0, sup), trend, verdict,
        levels, running, params, list(notes), uncertainty,
    )


# -- helpers -----------------------------------------------------------------


def _default_grid(grid: WindowGrid | None) -> WindowGrid:
    return grid if grid is not None else WindowGrid.default()


def _separation_notes(name: str, Z: ZeroSequence, th: Thresholds) -> list[str]:
    if len(Z) == 0:
        return []
    rep = separation_margin(Z, len(Z) // 2, th.separation)
    if rep.separated:
        return []
    msg = (f"{name} is not separated from the imaginary axis on its upper half "
           f"(margin {rep.margin:.3g} <= {th.separation}); the criterion's hypothesis fails")
    warnings.warn(msg, HypothesisWarning, stacklevel=3)
    return [msg]


def _d_values(d: GrowthFunction | None, grid: WindowGrid) -> np.ndarray:
    if d is None:
        return np.zeros(len(grid))
    if d.kind != "d":
        raise ValueError("expected a d-like growth function")
    return np.asarray(d(grid.R), dtype=float)


def _d_label(d: GrowthFunction | None) -> str | dict:
    if d is None:
        return "zero"
    return {"kind": d.kind, "samples": int(d.x.size), "x_range": [float(d.x[0]), float(d.x[-1])]}


def _log_ratio(grid: WindowGrid) -> np.ndarray:
    return np.log(grid.R / grid.r)


# -- checks ------------------------------------------------------------------


def mr_check(
    Z: ZeroSequence,
    b: float,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """``l_Z(r, R) <= (b + d(R)) ln(R/r) + C``."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    grid, th = _default_grid(grid), thresholds or Thresholds()
    notes = _separation_notes("Z", Z, th)
    lhs = log_sum_table(Z, grid, workers).total
    rhs = (b + _d_values(d, grid)) * _log_ratio(grid)
    return excess_table(lhs, rhs, grid, "mr", th, {"b": b, "d": _d_label(d), "n_zeros": len(Z)}, notes)


def dominance_check(
    Z: ZeroSequence,
    W: ZeroSequence,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """``l_Z(r, R) <= l_W(r, R) + d(R) ln(R/r) + C`` with ``W`` in the right half-plane."""
    if np.any(W.points.real <= 0):
        raise ValueError("W must lie in the open right half-plane")
    grid, th = _default_grid(grid), thresholds or Thresholds()
    notes = _separation_notes("Z", Z, th) + _separation_notes("W", W, th)
    lhs = log_sum_table(Z, grid, workers).total
    rhs = log_sum_table(W, grid, workers).total + _d_values(d, grid) * _log_ratio(grid)
    params = {"d": _d_label(d), "n_zeros": len(Z), "n_w": len(W)}
    return excess_table(lhs, rhs, grid, "dominance", th, params, notes)


def logmod_dominance_check(
    Z: ZeroSequence,
    g_axis: LogModulus,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    tol: float = DEFAULT_TOL,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """``l_Z(r, R) <= J(r, R; ln|g|) + d(R) ln(R/r) + C``."""
    grid, th = _default_grid(grid), thresholds or Thresholds()
    notes = _separation_notes("Z", Z, th)
    lhs = log_sum_table(Z, grid, workers).total
    rhs = axis_integral_grid(g_axis, grid, tol, workers) + _d_values(d, grid) * _log_ratio(grid)
    params = {"g": g_axis.label, "d": _d_label(d), "tol": tol, "n_zeros": len(Z)}
    return excess_table(lhs, rhs, grid, "logmod", th, params, notes, uncertainty=tol)


def multiplier_check(
    p_axis: LogModulus,
    g_axis: LogModulus,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    tol: float = DEFAULT_TOL,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """``J(r, R; ln|p|) <= J(r, R; ln|g|) + d(R) ln(R/r) + C``."""
    grid, th = _default_grid(grid), thresholds or Thresholds()
    lhs = axis_integral_grid(p_axis, grid, tol, workers)
    rhs = axis_integral_grid(g_axis, grid, tol, workers) + _d_values(d, grid) * _log_ratio(grid)
    params = {"p": p_axis.label, "g": g_axis.label, "d": _d_label(d), "tol": tol}
    return excess_table(lhs, rhs, grid, "multiplier", th, params, uncertainty=2 * tol)


def width_check(
    mu_hat_axis: LogModulus,
    b: float,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    tol: float = DEFAULT_TOL,
    thresholds: Thresholds | None = None,
    workers: int = 1,
    zeros: ZeroSequence | None = None,
) -> CriterionReport:
    """``J(r, R; ln|mu_hat|) <= (b + d(R)) ln(R/r) + C``.

    Axis separation of the zeros of ``mu_hat`` is required (and checked when
    ``zeros`` is given); the report records that this is stricter than
    separation from the origin alone.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    grid, th = _default_grid(grid), thresholds or Thresholds()
    notes = ["zeros of mu_hat are required to be separated from the imaginary axis; "
             "separation from the origin alone is not treated as sufficient"]
    if zeros is not None:
        notes += _separation_notes("zeros of mu_hat", zeros, th)
    else:
        notes.append("axis separation of the zeros of mu_hat was not checked (no zeros supplied)")
    lhs = axis_integral_grid(mu_hat_axis, grid, tol, workers)
    rhs = (b + _d_values(d, grid)) * _log_ratio(grid)
    params = {"mu_hat": mu_hat_axis.label, "b": b, "d": _d_label(d), "tol": tol}
    return excess_table(lhs, rhs, grid, "width", th, params, notes, uncertainty=tol)


def completeness_diagnostic(
    Z: ZeroSequence,
    b: float,
    grid: WindowGrid | None = None,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """Growth of ``sup_{1 <= r < R <= R*} (l_Z(r, R) - b ln(R/r))`` in ``R*``.

    The infimum over admissible ``d`` is replaced by ``d = 0``: every admissible
    ``d`` tends to 0, so it can neither cancel nor create a positive slope in
    ``ln R``. ``divergent`` therefore signals completeness of the exponential
    system on convex compacts of width at most ``2 pi b``; ``bounded``
    signals incompleteness.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    grid, th = _default_grid(grid), thresholds or Thresholds()
    notes = _separation_notes("Z", Z, th)
    kept = tuple(p for p in grid.pairs if p[0] >= 1.0)
    if len(kept) < len(grid):
        notes.append(f"dropped {len(grid) - len(kept)} windows with r < 1")
    if not kept:
        raise ValueError("no windows with r >= 1")
    grid = WindowGrid(kept)
    lhs = log_sum_table(Z, grid, workers).total
    rhs = b * _log_ratio(grid)
    rep = excess_table(lhs, rhs, grid, "completeness", th, {"b": b, "d": "zero", "n_zeros": len(Z)}, notes)
    rep.notes.append(
        "complete for every convex compact of width <= 2*pi*b" if rep.verdict == DIVERGENT
        else "no evidence of completeness on this window" if rep.verdict == BOUNDED
        else "completeness undecided on this window"
    )
    return rep


def lemma_gap(
    f_axis: LogModulus,
    Zf: ZeroSequence,
    grid: WindowGrid | None = None,
    tol: float = DEFAULT_TOL,
    thresholds: Thresholds | None = None,
    workers: int = 1,
) -> CriterionReport:
    """``max(|J - l^rh|, |J - l^lh|)`` per window.

    ``Zf`` must be the zero set of the function whose axis log-modulus is
    ``f_axis``; this is not verified. A zero at the origin is never in an
    annulus ``r < |z|`` and may simply be left out.
    """
    grid, th = _default_grid(grid), thresholds or Thresholds()
    J = axis_integral_grid(f_axis, grid, tol, workers)
    table = log_sum_table(Zf, grid, workers)
    gap = np.maximum(np.abs(J - table.right), np.abs(J - table.left))
    params = {"f": f_axis.label, "tol": tol, "n_zeros": len(Zf)}
    return excess_table(gap, np.zeros(len(grid)), grid, "lemma_gap", th, params, uncertainty=tol)


@dataclass
class PipelineResult:
    report: CriterionReport
    dominance: CriterionReport
    product: CanonicalProduct | None
    Q: GrowthFunction | None
    q_sequence: ZeroSequence | None


def majorant_pipeline(
    Z: ZeroSequence,
    W: ZeroSequence,
    d: GrowthFunction | None = None,
    grid: WindowGrid | None = None,
    tol: float = DEFAULT_TOL,
    thresholds: Thresholds | None = None,
    workers: int = 1,
    q_per_decade: int = 50,
) -> PipelineResult:
    """Build the majorant product ``g q`` and test ``l_Z <= J(ln|g q|) + C``.

    Steps: dominance of ``l_Z`` by ``l_W + d ln(R/r)``; ``Q`` from ``d``; the
    sequence with counting function ``floor(Q)``; ``q`` the even product over
    it and ``g`` the even product over ``W``. The intermediate bounds
    ``l_Z <= l_{W u Q}`` and ``l_Z <= l_{W u Q u -Q}`` are recorded in the
    parameters. If the dominance check is not bounded the pipeline stops and
    returns that report.
    """
    grid, th = _default_grid(grid), thresholds or Thresholds()
    dom = dominance_check(Z, W, d, grid, th, workers)
    if dom.verdict != BOUNDED:
        dom.notes.append("pipeline stopped: dominance check is not bounded")
        return PipelineResult(dom, dom, None, None, None)

    r0 = float(np.min(grid.r))
    R_top = float(np.max(grid.R))
    n_nodes = max(2, int(math.ceil(q_per_decade * math.log10(R_top / r0))) + 1)
    d_eff = d if d is not None else GrowthFunction.zero("d", r0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Q = d_to_q(d_eff, r0, np.geomspace(r0, R_top, n_nodes))
    q_seq = synthesize_sequence(Q, R_top, r0)
    g = CanonicalProduct(W)
    q = CanonicalProduct(q_seq)
    gq = g.times(q)

    lz = log_sum_table(Z, grid, workers).total
    wq = log_sum_table(W.union(q_seq), grid, workers).total
    wqm = log_sum_table(W.union(q_seq).union(mirror_sequence(q_seq)), grid, workers).total
    J = axis_integral_grid(product_axis_logmod(gq), grid, tol, workers)

    params = {
        "d": _d_label(d),
        "tol": tol,
        "n_zeros": len(Z),
        "n_w": len(W),
        "n_q": len(q_seq),
        "r0": r0,
        "Q_at_R_max": float(Q(R_top)),
        "sup_excess_dominance": dom.sup_excess,
        "sup_excess_W_union_Q": float(np.max(lz - wq)),
        "sup_excess_W_union_Q_mirror": float(np.max(lz - wqm)),
    }
    notes = [str(w.message) for w in caught]
    if len(q_seq):
        notes.append("q has zero upper density on the sampled range only; "
                     "ln|q(iy)| = o(|y|) is not certified by finite data")
    report = excess_table(lz, J, grid, "pipeline", th, params, notes, uncertainty=tol)
    return PipelineResult(report, dom, gq, Q, q_seq)
