"""Half-plane logarithmic sums over annuli ``r < |z| <= R``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from ._io import atomic_write_text, csv_text
from .sequences import ZeroSequence

__all__ = [
    "WindowGrid",
    "half_plane_log_sum",
    "log_sum",
    "LogSumTable",
    "log_sum_table",
    "write_log_sum_csv",
]

Side = Literal["right", "left"]


@dataclass(frozen=True)
class WindowGrid:
    """Finite set of windows ``(r, R)`` with ``0 < r < R``."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        pairs = tuple((float(r), float(R)) for r, R in self.pairs)
        for r, R in pairs:
            if not (0 < r < R) or not math.isfinite(R):
                raise ValueError(f"invalid window ({r}, {R}); need 0 < r < R < inf")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def default(
        cls,
        r_values: Iterable[float] = (1.0, 2.0, 5.0, 10.0),
        r_max: float = 1e4,
        per_decade: int = 20,
    ) -> "WindowGrid":
        """Every ``r`` in ``r_values`` against ``R = 10**(k/per_decade) <= r_max``.

        ``r_max`` itself is always one of the right endpoints.
        """
        if per_decade < 1:
            raise ValueError("per_decade must be >= 1")
        top = int(math.floor(per_decade * math.log10(r_max) + 1e-9))
        R_values = [10.0 ** (k / per_decade) for k in range(1, top + 1)]
        R_values = [R for R in R_values if R <= r_max]
        if not R_values or R_values[-1] != r_max:
            R_values.append(float(r_max))
        pairs = [(float(r), R) for r in sorted(set(r_values)) for R in R_values if R > r]
        if not pairs:
            raise ValueError("grid specification yields no windows")
        return cls(tuple(pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def r(self) -> np.ndarray:
        return np.array([p[0] for p in self.pairs])

    @property
    def R(self) -> np.ndarray:
        return np.array([p[1] for p in self.pairs])


def _check_window(r: float, R: float) -> None:
    if not (0 < r < R):
        raise ValueError(f"window requires 0 < r < R, got r={r}, R={R}")


def _side_terms(Z: ZeroSequence, side: Side) -> np.ndarray:
    pts = Z.by_modulus
    inv = (1.0 / pts).real if pts.size else np.empty(0)
    if side == "right":
        return np.where(pts.real > 0, inv, 0.0)
    if side == "left":
        return np.where(pts.real < 0, -inv, 0.0)
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


def _annulus_sum(moduli: np.ndarray, terms: np.ndarray, r: float, R: float) -> float:
    lo = np.searchsorted(moduli, r, side="right")
    hi = np.searchsorted(moduli, R, side="right")
    # fsum is correctly rounded, so the result is independent of term order
    return math.fsum(terms[lo:hi].tolist()) if hi > lo else 0.0


def half_plane_log_sum(Z: ZeroSequence, r: float, R: float, side: Side) -> float:
    """Sum of ``Re(1/z)`` (right) or ``Re(-1/z)`` (left) over ``r < |z| <= R``.

    Points on the imaginary axis belong to neither side.
    """
    _check_window(r, R)
    return _annulus_sum(Z.moduli, _side_terms(Z, side), r, R)


def log_sum(Z: ZeroSequence, r: float, R: float) -> float:
    """Larger of the two half-plane sums over the annulus."""
    _check_window(r, R)
    m = Z.moduli
    return max(
        _annulus_sum(m, _side_terms(Z, "right"), r, R),
        _annulus_sum(m, _side_terms(Z, "left"), r, R),
    )


@dataclass(frozen=True)
class LogSumTable:
    grid: WindowGrid
    right: np.ndarray
    left: np.ndarray
    axis_points: int

    @property
    def total(self) -> np.ndarray:
        return np.maximum(self.right, self.left)


def log_sum_table(Z: ZeroSequence, grid: WindowGrid | Sequence[tuple[float, float]], workers: int = 1) -> LogSumTable:
    """Evaluate both half-plane sums on every window of ``grid``.

    ``axis_points`` counts points with zero real part; they contribute to
    neither side and are reported so callers can flag them.
    """
    if not isinstance(grid, WindowGrid):
        grid = WindowGrid(tuple(grid))
    m = Z.moduli
    rt, lt = _side_terms(Z, "right"), _side_terms(Z, "left")

    def one(pair):
        r, R = pair
        return _annulus_sum(m, rt, r, R), _annulus_sum(m, lt, r, R)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, grid.pairs))
    else:
        rows = [one(p) for p in grid.pairs]
    arr = np.array(rows, dtype=float).reshape(len(rows), 2)
    return LogSumTable(grid, arr[:, 0], arr[:, 1], int(np.sum(Z.points.real == 0)))


def write_log_sum_csv(table: LogSumTable, path: str | Path) -> None:
    rows = [
        (r, R, float(a), float(b), float(c))
        for (r, R), a, b, c in zip(table.grid.pairs, table.right, table.left, table.total)
    ]
    atomic_write_text(path, csv_text(["r", "R", "l_rh", "l_lh", "l"], rows))
