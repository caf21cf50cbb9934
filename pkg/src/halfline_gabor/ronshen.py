"""Truncated Ron-Shen fiber matrices and their reduction to dominant form.

For a fiber point ``x`` the matrix ``G_x`` has rows indexed by translations
``lambda`` and columns by ``n``, with entries ``g(x + n/beta - lambda)``
(times ``exp(2 pi i c_lambda n / beta)`` for phase-shifted sets).  Keeping
one row per column gives an upper-triangular matrix ``G*``; right
multiplication by ``Id - qS`` turns it into a row dominant matrix ``D``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .grids import REL_TOL, RegularGrid, SemiIrregularGrid
from .windows import Window

Grid = Union[RegularGrid, SemiIrregularGrid]


def fiber_offsets(x: float, alpha: float, beta: float, m_range: tuple[int, int]) -> list[tuple[int, int, float]]:
    """For each column ``m`` the unique row ``n`` with ``0 <= x - alpha n + m/beta < alpha``.

    Returns ``(m, n, tau)`` triples.
    """
    if alpha * beta > 1.0 + REL_TOL:
        raise ValueError(f"row selection needs alpha*beta <= 1, got {alpha * beta:g}")
    out = []
    for m in range(m_range[0], m_range[1] + 1):
        s = x + m / beta
        n = math.floor(s / alpha)
        tau = s - alpha * n
        # float guard: keep tau in [0, alpha)
        if tau < 0:
            if tau > -1e-12 * max(1.0, abs(s)):
                tau = 0.0
            else:
                n -= 1
                tau = s - alpha * n
        elif tau >= alpha:
            n += 1
            tau = max(s - alpha * n, 0.0)
        out.append((m, n, tau))
    return out


def fiber_matrix(window: Window, points, beta: float, x: float, columns, phases=None) -> np.ndarray:
    """Entries ``g(x + n/beta - lambda) exp(2 pi i c_lambda n/beta)`` for given rows and columns."""
    points = np.asarray(points, dtype=float)
    columns = np.asarray(columns)
    args = x + columns[None, :] / beta - points[:, None]
    vals = window(args)
    if phases is None or not np.any(phases):
        return vals
    phase = np.exp(2j * np.pi * np.multiply.outer(np.asarray(phases, dtype=float), columns / beta))
    return vals * phase


@dataclass(frozen=True, eq=False)
class RonShenSlice:
    x: float
    rows: np.ndarray  # translation points lambda of the kept rows
    cols: np.ndarray  # column indices n
    entries: np.ndarray
    tau: np.ndarray  # leading offset of each row, in [0, 1/beta)
    row_labels: Optional[np.ndarray] = None  # lattice index n when the grid is regular

    @property
    def shape(self):
        return self.entries.shape

    def entry(self, row_label, col: int):
        labels = self.row_labels if self.row_labels is not None else self.rows
        i = int(np.flatnonzero(np.isclose(labels, row_label))[0])
        j = int(np.flatnonzero(self.cols == col)[0])
        return self.entries[i, j]

    def to_csv(self, path: str | Path) -> None:
        labels = self.row_labels if self.row_labels is not None else self.rows
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "real", "imag"])
            for i, lab in enumerate(labels):
                for j, c in enumerate(self.cols):
                    z = complex(self.entries[i, j])
                    writer.writerow([repr(float(lab)), int(c), repr(z.real), repr(z.imag)])


def _leading_columns(points: np.ndarray, beta: float, x: float) -> np.ndarray:
    # smallest n with x + n/beta - lambda >= 0
    m = np.ceil((points - x) * beta - 1e-12)
    return m.astype(int)


def slice_columns(grid: Grid, truncation: int) -> tuple[int, int]:
    """Column window of half-width ``truncation``; clipped to the covered span for finite lists."""
    if truncation < 1:
        raise ValueError("truncation must be positive")
    if isinstance(grid, RegularGrid):
        return -truncation, truncation
    lo, hi = grid.covered_columns()
    if hi < lo:
        raise ValueError("point list too short to cover a single column")
    centre = (lo + hi) // 2
    return max(lo, centre - truncation), min(hi, centre + truncation)


def build_slice(window: Window, grid: Grid, x: float, truncation) -> RonShenSlice:
    """Truncated fiber matrix ``G_x``.

    ``truncation`` is either ``M`` (columns ``[-M, M]``, rows whose leading
    nonzero entry falls inside that window, double rows included) or, for
    regular grids, an explicit ``(N, M)`` pair giving rows ``[-N, N]``.
    """
    beta = grid.beta
    if not 0 <= x < 1 / beta:
        raise ValueError(f"fiber point {x} outside [0, 1/beta)")
    if isinstance(grid, SemiIrregularGrid):
        if not grid.validation.gap_ok:
            raise ValueError(f"semi-irregular grid fails the gap bound (max gap {grid.validation.max_gap:g})")
        if isinstance(truncation, tuple):
            raise ValueError("explicit row ranges are only supported for regular grids")
        lo, hi = slice_columns(grid, truncation)
        cols = np.arange(lo, hi + 1)
        lead = _leading_columns(grid.points, beta, x)
        keep = (lead >= lo) & (lead <= hi)
        rows = grid.points[keep]
        phases = grid.phases[keep]
        labels = None
    else:
        if isinstance(truncation, tuple):
            n_rows, m_cols = truncation
            if n_rows < 0 or m_cols < 1:
                raise ValueError("empty truncation")
            cols = np.arange(-m_cols, m_cols + 1)
            labels = np.arange(-n_rows, n_rows + 1)
        else:
            lo, hi = slice_columns(grid, truncation)
            cols = np.arange(lo, hi + 1)
            a = grid.alpha
            cand = np.arange(math.floor((x + (lo - 1) / beta) / a) - 1, math.ceil((x + hi / beta) / a) + 2)
            lead = _leading_columns(a * cand, beta, x)
            labels = cand[(lead >= lo) & (lead <= hi)]
        rows = grid.alpha * labels
        phases = None
    entries = fiber_matrix(window, rows, beta, x, cols, phases)
    tau = x - rows + _leading_columns(rows, beta, x) / beta
    return RonShenSlice(float(x), rows, cols, entries, tau, labels)


@dataclass(frozen=True, eq=False)
class ReducedSlice:
    """Square upper-triangular ``G*`` or its dominant form ``D = G* (Id - qS)``."""

    matrix: np.ndarray
    tau: np.ndarray
    beta: float
    g0: float
    columns: np.ndarray
    q: Optional[float] = None  # set once the U-transform has been applied
    rows: Optional[np.ndarray] = None  # translation point selected for each column

    @property
    def form(self) -> str:
        return "G*" if self.q is None else "D"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _triangular_from_offsets(window: Window, tau: np.ndarray, beta: float) -> np.ndarray:
    k = np.arange(tau.size)
    lag = k[None, :] - k[:, None]
    vals = window(tau[:, None] + lag / beta)
    return np.where(lag >= 0, vals, 0.0)


def reduced_upper_triangular(window: Window, alpha: float, beta: float, x: float, m_range) -> ReducedSlice:
    """``G*``: row ``m`` holds ``g(tau_m + (k - m)/beta)`` for ``k >= m``."""
    offs = fiber_offsets(x, alpha, beta, m_range)
    tau = np.array([t for _, _, t in offs])
    rows = np.array([alpha * n for _, n, _ in offs])
    cols = np.array([m for m, _, _ in offs])
    return ReducedSlice(_triangular_from_offsets(window, tau, beta), tau, beta, window.g0, cols, None, rows)


def reduced_semi_irregular(window: Window, grid: SemiIrregularGrid, x: float, truncation: int) -> ReducedSlice:
    """``G*`` for ``Lambda x beta Z``: per column keep the last point with offset in ``[0, alpha)``."""
    if grid.has_phases:
        raise ValueError("the dominance reduction needs zero phases")
    if not grid.validation.gap_ok:
        raise ValueError("semi-irregular grid fails the gap bound")
    beta, alpha = grid.beta, grid.alpha
    lo, hi = slice_columns(grid, truncation)
    cols = np.arange(lo, hi + 1)
    pts = grid.points
    tau = np.empty(cols.size)
    rows = np.empty(cols.size)
    for i, n in enumerate(cols):
        s = x + n / beta
        j = int(np.searchsorted(pts, s, side="right")) - 1
        if j < 0 or s - pts[j] >= alpha * (1 + REL_TOL):
            raise ValueError(f"no point of the list selects column {n} at x={x:g}")
        rows[i] = pts[j]
        tau[i] = max(s - pts[j], 0.0)
    return ReducedSlice(_triangular_from_offsets(window, tau, beta), tau, beta, window.g0, cols, None, rows)


def u_transform(gstar: ReducedSlice, q: float) -> ReducedSlice:
    """Right-multiply ``G*`` by ``Id - qS``: ``d(n, m) = G*(n, m) - q G*(n, m - 1)``.

    Since ``G*`` is upper triangular the finite block product reproduces the
    bi-infinite entry formula exactly, including the last column.
    """
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if gstar.q is not None:
        raise ValueError("slice is already in D form")
    g = gstar.matrix
    d = g.copy()
    d[:, 1:] -= q * g[:, :-1]
    return ReducedSlice(d, gstar.tau, gstar.beta, gstar.g0, gstar.columns, q, gstar.rows)


@dataclass(frozen=True)
class DominanceReport:
    delta_obs: float
    sign_ok: bool
    worst_row_slack: float
    decay_C: float
    rows_failing: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.sign_ok and not self.rows_failing and self.delta_obs > 0


def dominance_report(d: ReducedSlice, q: Optional[float] = None, rtol: float = 1e-12) -> DominanceReport:
    """Check the sign pattern and row dominance of ``D``.

    A row fails when its off-diagonal mass exceeds ``q d(n, n)`` plus the
    geometric tail ``g(0) q^(M - n) / (1 - q)`` that truncation cuts away.
    """
    q = d.q if q is None else q
    if q is None:
        raise ValueError("dominance report needs q (apply u_transform first)")
    mat = np.asarray(d.matrix)
    size = mat.shape[0]
    diag = np.real(np.diag(mat))
    off = mat - np.diag(np.diag(mat))
    scale = float(np.abs(mat).max()) if mat.size else 1.0
    sign_ok = bool(np.all(diag > 0) and np.all(np.real(off) <= rtol * scale) and np.all(np.imag(off) == 0))
    row_mass = np.abs(off).sum(axis=1)
    slack = q * diag - row_mass
    idx = np.arange(size)
    tail = d.g0 * q ** (size - 1 - idx) / (1 - q)
    failing = tuple(int(i) for i in np.flatnonzero(row_mass > q * diag + tail + rtol * scale))
    lag = np.abs(idx[None, :] - idx[:, None])
    mag = np.abs(off)
    nz = mag > 0
    decay_C = float(np.max(np.log(mag[nz]) - lag[nz] * math.log(q))) if np.any(nz) else -math.inf
    return DominanceReport(
        delta_obs=float(diag.min()),
        sign_ok=sign_ok,
        worst_row_slack=float(slack.min()),
        decay_C=math.exp(decay_C),
        rows_failing=failing,
    )
