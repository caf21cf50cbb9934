"""Time-frequency index sets: regular lattices and semi-irregular ``Lambda x beta Z``."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

# relative slack for float comparisons against alpha and the unit separation
REL_TOL = 1e-12


@dataclass(frozen=True)
class RegularGrid:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"lattice parameters must be positive, got ({self.alpha}, {self.beta})")

    @property
    def product(self) -> float:
        return self.alpha * self.beta

    @property
    def admissible(self) -> bool:
        """``alpha * beta <= 1``; denser lattices are the only candidates for frames."""
        return self.product <= 1.0 + REL_TOL

    def points_between(self, lo: float, hi: float) -> np.ndarray:
        """Translation points ``alpha * n`` lying in ``[lo, hi]``."""
        n = np.arange(math.ceil(lo / self.alpha), math.floor(hi / self.alpha) + 1)
        return self.alpha * n

    def phases_for(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))


@dataclass(frozen=True)
class ValidationReport:
    gap_ok: bool
    max_gap: float
    min_gap: float
    separation_m: Optional[int]
    # number of starting indices over which the separation was checked
    checked_windows: int

    @property
    def ok(self) -> bool:
        return self.gap_ok and self.separation_m is not None


def validate_semi_irregular(points, alpha: float) -> ValidationReport:
    """Check the gap bound ``lambda_{n+1} - lambda_n <= alpha`` and find the separation index.

    ``separation_m`` is the smallest ``m`` for which every available window of
    ``m`` steps spans at least 1.  The check is necessarily restricted to the
    finite list.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ValueError("need at least two points")
    gaps = np.diff(pts)
    if np.any(gaps <= 0):
        raise ValueError("points must be strictly increasing")
    gap_ok = bool(np.all(gaps <= alpha * (1 + REL_TOL)))
    sep = None
    checked = 0
    for m in range(1, pts.size):
        spans = pts[m:] - pts[:-m]
        if spans.min() >= 1.0 - REL_TOL:
            sep, checked = m, spans.size
            break
    return ValidationReport(gap_ok, float(gaps.max()), float(gaps.min()), sep, checked)


@dataclass(frozen=True, eq=False)
class SemiIrregularGrid:
    """``Gamma = union over lambda of {lambda} x (beta Z + c_lambda)``."""

    points: np.ndarray
    beta: float
    alpha: float
    phases: Optional[np.ndarray] = None
    validation: ValidationReport = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if not (self.beta > 0 and self.alpha > 0):
            raise ValueError("alpha and beta must be positive")
        phases = np.zeros(pts.size) if self.phases is None else np.asarray(self.phases, dtype=float)
        if phases.shape != pts.shape:
            raise ValueError("one phase per point is required")
        pts.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "validation", validate_semi_irregular(pts, self.alpha))

    @property
    def product(self) -> float:
        return self.alpha * self.beta

    @property
    def has_phases(self) -> bool:
        return bool(np.any(self.phases != 0))

    def points_between(self, lo: float, hi: float) -> np.ndarray:
        return self.points[(self.points >= lo) & (self.points <= hi)]

    def phases_for(self, points: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.points, points)
        return self.phases[idx]

    def covered_columns(self) -> tuple[int, int]:
        """Column indices ``n`` whose time slot ``[n/beta, (n+1)/beta)`` is inside the span.

        For those columns every fiber point ``x`` in ``[0, 1/beta)`` has a point
        of the list in ``(x + n/beta - alpha, x + n/beta]``.
        """
        lo = math.ceil(self.points[0] * self.beta - REL_TOL)
        hi = math.floor(self.points[-1] * self.beta + REL_TOL) - 1
        return lo, hi


def regular_lattice(alpha: float, beta: float) -> RegularGrid:
    return RegularGrid(float(alpha), float(beta))


def semi_irregular(points, beta: float, alpha: float, phases=None) -> SemiIrregularGrid:
    return SemiIrregularGrid(np.asarray(points, dtype=float), float(beta), float(alpha), phases)


def jittered_lattice(alpha: float, jitter: float, seed: int, count: int) -> np.ndarray:
    """Perturbed lattice ``alpha * n + u_n`` rescaled so that every gap is at most ``alpha``."""
    if not 0 <= jitter < alpha / 4:
        raise ValueError("jitter must lie in [0, alpha/4)")
    rng = np.random.default_rng(seed)
    pts = alpha * np.arange(count) + rng.uniform(-jitter, jitter, size=count)
    max_gap = float(np.diff(pts).max()) if count > 1 else alpha
    if max_gap > alpha:
        pts = pts * (alpha / max_gap)
    if count > 1 and not validate_semi_irregular(pts, alpha).gap_ok:
        raise AssertionError("rescaled lattice still violates the gap bound")
    return pts


def load_points_csv(path: str | Path) -> np.ndarray:
    vals = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not row[0].strip():
                continue
            try:
                vals.append(float(row[0]))
            except ValueError:
                if lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: not a number: {row[0]!r}")
    return np.array(vals)


def save_points_csv(points, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda"])
        for p in points:
            writer.writerow([repr(float(p))])
