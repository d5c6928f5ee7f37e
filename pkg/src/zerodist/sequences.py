"""Finite zero sequences and their counting characteristics.

A :class:`ZeroSequence` is a finite multiset of nonzero complex points;
repetition of a point encodes its multiplicity. All characteristics here are
finite-window proxies for tail notions (limsup / liminf) and are reported as
estimates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from ._io import atomic_write_text, csv_text

__all__ = [
    "DEFAULT_SEPARATION_THRESHOLD",
    "SequenceFormatError",
    "ZeroSequence",
    "SeparationReport",
    "radial_counting",
    "counting_measure",
    "upper_density",
    "separation_margin",
    "exponential_system",
    "read_sequence",
    "write_sequence",
]

DEFAULT_SEPARATION_THRESHOLD = 0.01


class SequenceFormatError(ValueError):
    """Malformed zero-sequence input. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Finite multiset of nonzero complex points.

    The stored array keeps the caller's order, but every derived quantity goes
    through :attr:`by_modulus`, so permuting the input never changes a result.
    """

    points: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex).ravel().copy()
        if not np.all(np.isfinite(pts)):
            raise ValueError("zero sequence contains non-finite points")
        if np.any(pts == 0):
            raise ValueError("zero sequence contains the origin")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_iterable(cls, values: Iterable[complex]) -> "ZeroSequence":
        return cls(np.fromiter((complex(v) for v in values), dtype=complex))

    def __len__(self) -> int:
        return self.points.size

    def __iter__(self):
        return iter(self.points)

    def __repr__(self) -> str:
        return f"ZeroSequence(n={len(self)})"

    @cached_property
    def by_modulus(self) -> np.ndarray:
        """Points sorted by (modulus, real part, imaginary part)."""
        pts = self.points
        order = np.lexsort((pts.imag, pts.real, np.abs(pts)))
        out = pts[order]
        out.setflags(write=False)
        return out

    @cached_property
    def moduli(self) -> np.ndarray:
        """Ascending moduli aligned with :attr:`by_modulus`."""
        m = np.abs(self.by_modulus)
        m.setflags(write=False)
        return m

    def union(self, other: "ZeroSequence") -> "ZeroSequence":
        """Union with counting measures added (multiplicities add up)."""
        return ZeroSequence(np.concatenate([self.points, other.points]))

    def scaled(self, factor: float) -> "ZeroSequence":
        return ZeroSequence(self.points * factor)


@dataclass(frozen=True)
class SeparationReport:
    margin: float
    tail_start: int
    separated: bool
    threshold: float = DEFAULT_SEPARATION_THRESHOLD


def radial_counting(Z: ZeroSequence, r: float) -> int:
    """Number of points of modulus at most ``r``, counted with multiplicity."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return int(np.searchsorted(Z.moduli, r, side="right"))


def counting_measure(Z: ZeroSequence, contains) -> int:
    """Counting measure of a set given by a membership predicate on complex points."""
    return sum(1 for z in Z.points if contains(complex(z)))


def upper_density(Z: ZeroSequence, r_min: float) -> float:
    """Finite-window estimate of the upper density ``limsup n(r)/r``.

    ``n(r)/r`` is right-continuous and decreasing between jumps, so its
    supremum over ``r >= r_min`` is attained either at ``r_min`` or at one of
    the moduli ``>= r_min``. The value is an upper estimate of the tail
    behaviour on the sampled range only.
    """
    if not r_min > 0:
        raise ValueError(f"r_min must be positive, got {r_min}")
    m = Z.moduli
    if m.size == 0:
        return 0.0
    best = radial_counting(Z, r_min) / r_min
    start = int(np.searchsorted(m, r_min, side="left"))
    if start < m.size:
        jumps = m[start:]
        counts = np.searchsorted(m, jumps, side="right")
        best = max(best, float(np.max(counts / jumps)))
    return float(best)


def separation_margin(
    Z: ZeroSequence,
    tail_start: int = 0,
    threshold: float = DEFAULT_SEPARATION_THRESHOLD,
) -> SeparationReport:
    """Minimum of ``|Re z|/|z|`` over the tail of the sequence.

    The tail is taken in order of increasing modulus, starting at the 0-based
    index ``tail_start``. An empty tail is vacuously separated with margin 1.
    """
    n = len(Z)
    if tail_start < 0 or (n and tail_start >= n) or (not n and tail_start):
        raise ValueError(f"tail_start {tail_start} out of range for {n} points")
    tail = Z.by_modulus[tail_start:]
    if tail.size == 0:
        margin = 1.0
    else:
        margin = float(np.min(np.abs(tail.real) / np.abs(tail)))
    margin = min(max(margin, 0.0), 1.0)
    return SeparationReport(margin, tail_start, margin > threshold, threshold)


def exponential_system(Z: ZeroSequence) -> list[tuple[complex, int]]:
    """Exponents of the system ``z^p exp(z_k z)``, ``0 <= p < multiplicity``.

    Bookkeeping only: returns ``(z_k, p)`` pairs in modulus order.
    """
    counts = Counter(complex(z) for z in Z.by_modulus)
    return [(z, p) for z, m in counts.items() for p in range(m)]


# -- file formats ------------------------------------------------------------


def _parse_float(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SequenceFormatError(f"cannot parse number {text!r}", line) from None
    if not math.isfinite(value):
        raise SequenceFormatError(f"non-finite value {text!r}", line)
    return value


def _checked_point(re: float, im: float, line: int) -> complex:
    if re == 0 and im == 0:
        raise SequenceFormatError("point at the origin", line)
    return complex(re, im)


def _parse_csv(text: str) -> ZeroSequence:
    reader = csv.reader(io.StringIO(text))
    pts: list[complex] = []
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if not header_seen:
            if [c.lower() for c in cells] != ["re", "im"]:
                raise SequenceFormatError("expected header 're,im'", lineno)
            header_seen = True
            continue
        if len(cells) != 2:
            raise SequenceFormatError(f"expected 2 columns, got {len(cells)}", lineno)
        re, im = (_parse_float(c, lineno) for c in cells)
        pts.append(_checked_point(re, im, lineno))
    if not header_seen:
        raise SequenceFormatError("missing header 're,im'", 1)
    return ZeroSequence(np.array(pts, dtype=complex))


def _parse_json(text: str) -> ZeroSequence:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SequenceFormatError(exc.msg, exc.lineno) from None
    if not isinstance(data, list):
        raise SequenceFormatError("expected a JSON array of [re, im] pairs")
    pts = []
    for i, item in enumerate(data):
        if not (isinstance(item, list) and len(item) == 2):
            raise SequenceFormatError(f"entry {i} is not an [re, im] pair")
        try:
            re, im = float(item[0]), float(item[1])
        except (TypeError, ValueError):
            raise SequenceFormatError(f"entry {i} is not numeric") from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise SequenceFormatError(f"entry {i} is not finite")
        if re == 0 and im == 0:
            raise SequenceFormatError(f"entry {i} is the origin")
        pts.append(complex(re, im))
    return ZeroSequence(np.array(pts, dtype=complex))


def read_sequence(path: str | Path) -> ZeroSequence:
    """Read a zero sequence from CSV (header ``re,im``) or a JSON array."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        return _parse_json(text)
    return _parse_csv(text)


def write_sequence(Z: ZeroSequence, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        atomic_write_text(path, json.dumps([[z.real, z.imag] for z in Z.points]) + "\n")
        return
    rows = [(float(z.real), float(z.imag)) for z in Z.points]
    atomic_write_text(path, csv_text(["re", "im"], rows))
