"""One-sided, stably decreasing windows.

A window ``g`` vanishes on the negative half-line, is non-increasing on
``[0, inf)`` and admits, for each ``t > 0``, a ratio ``q(t) < 1`` with
``g(x + t) <= q(t) g(x)``.  Every window here is an immutable value that can
be evaluated on numpy arrays.
"""
from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

Q_FLOOR = 1e-6
TABULATED_GRID_POINTS = 10_000


class NotStablyDecreasing(ValueError):
    """Raised when no ratio ``q(t) < 1`` exists for a requested shift."""


class Window(ABC):
    """Base class for half-line windows."""

    kind: str = "window"

    @property
    @abstractmethod
    def support_sup(self) -> float:
        """Supremum of ``{x >= 0 : g(x) > 0}``; ``math.inf`` if unbounded."""

    @property
    @abstractmethod
    def boundary_limit(self) -> float:
        """Left limit of ``g`` at ``support_sup`` (0.0 when the support is unbounded)."""

    @abstractmethod
    def _on_support(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the defining formula for ``0 <= x <= support_sup``."""

    @abstractmethod
    def _sup_ratio(self, t: float) -> float:
        """Supremum of ``g(x + t) / g(x)`` over the positivity set."""

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.zeros(arr.shape)
        inside = (arr >= 0.0) & (arr <= self.support_sup)
        if np.any(inside):
            out[inside] = self._on_support(arr[inside])
        if out.ndim == 0:
            return float(out)
        return out

    def decay_ratio(self, t: float) -> float:
        if not t > 0:
            raise ValueError(f"decay ratio needs t > 0, got {t!r}")
        sup = self._sup_ratio(float(t))
        if sup >= 1.0:
            raise NotStablyDecreasing(
                f"{self.kind}: sup g(x+{t:g})/g(x) = {sup:.6g} is not below 1"
            )
        # a vanishing supremum (shift past a compact support) is replaced by the floor
        return sup if sup > 0 else Q_FLOOR

    @property
    def g0(self) -> float:
        return float(self(0.0))

    def left_limit(self, x: float) -> float:
        """``lim_{y -> x-} g(y)``; windows are continuous inside their support."""
        if x <= 0:
            return 0.0 if x < 0 else self.g0
        if x < self.support_sup:
            return float(self(x))
        if x == self.support_sup:
            return self.boundary_limit
        return 0.0

    def jumps(self) -> list[tuple[float, float]]:
        """Discontinuities as ``(position, g(position+) - g(position-))``."""
        out = [(0.0, self.g0)]
        if math.isfinite(self.support_sup) and self.boundary_limit > 0:
            out.append((self.support_sup, -self.boundary_limit))
        return out

    def effective_support(self, tol: float = 1e-18) -> float:
        """Length beyond which ``g`` is below ``tol`` (the true support if compact)."""
        if math.isfinite(self.support_sup):
            return self.support_sup
        q1 = self.decay_ratio(1.0)
        steps = math.log(tol / self.g0) / math.log(q1)
        return float(math.ceil(max(steps, 0.0)) + 1)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class OneSidedExponential(Window):
    rate: float = 1.0
    kind: str = field(default="one-sided-exp", init=False, repr=False)

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def support_sup(self) -> float:
        return math.inf

    @property
    def boundary_limit(self) -> float:
        return 0.0

    def _on_support(self, x):
        return np.exp(-self.rate * x)

    def _sup_ratio(self, t):
        return math.exp(-self.rate * t)

    def describe(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class TruncatedLinear(Window):
    """``g(x) = 1 - x / x0`` on ``[0, x0]``."""

    x0: float = 1.0
    kind: str = field(default="trunc-linear", init=False, repr=False)

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValueError("x0 must be positive")

    @property
    def support_sup(self) -> float:
        return self.x0

    @property
    def boundary_limit(self) -> float:
        return 0.0

    def _on_support(self, x):
        return 1.0 - x / self.x0

    def _sup_ratio(self, t):
        # (x0 - x - t) / (x0 - x) decreases in x, so x = 0 is extremal
        return max(1.0 - t / self.x0, 0.0)

    def describe(self):
        return {"kind": self.kind, "x0": self.x0}


@dataclass(frozen=True)
class TruncatedExponential(Window):
    """``g(x) = exp(-rate x)`` on the closed interval ``[0, x0]``."""

    rate: float = 1.0
    x0: float = 1.0
    kind: str = field(default="trunc-exp", init=False, repr=False)

    def __post_init__(self):
        if not (self.rate > 0 and self.x0 > 0):
            raise ValueError("rate and x0 must be positive")

    @property
    def support_sup(self) -> float:
        return self.x0

    @property
    def boundary_limit(self) -> float:
        return math.exp(-self.rate * self.x0)

    def _on_support(self, x):
        return np.exp(-self.rate * x)

    def _sup_ratio(self, t):
        return math.exp(-self.rate * t) if t <= self.x0 else 0.0

    def describe(self):
        return {"kind": self.kind, "rate": self.rate, "x0": self.x0}


@dataclass(frozen=True)
class CauchyFourier(Window):
    """Fourier transform of a Cauchy transform of a discrete positive measure.

    ``g(xi) = sum_k mass_k exp(-2 pi xi t_k)`` for ``xi >= 0``.  Gabor analysis
    of the time-side window at ``(alpha, beta)`` is carried out on this window
    at ``(beta, alpha)``.
    """

    atoms: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
    kind: str = field(default="cauchy", init=False, repr=False)

    def __post_init__(self):
        atoms = tuple((float(m), float(t)) for m, t in self.atoms)
        if not atoms:
            raise ValueError("at least one atom is required")
        for mass, loc in atoms:
            if not (mass > 0 and loc > 0):
                raise ValueError(f"atom ({mass}, {loc}) needs positive mass and location")
        object.__setattr__(self, "atoms", atoms)

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for m, _ in self.atoms])

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for _, t in self.atoms])

    @property
    def support_sup(self) -> float:
        return math.inf

    @property
    def boundary_limit(self) -> float:
        return 0.0

    def _on_support(self, x):
        return np.exp(-2 * np.pi * np.multiply.outer(x, self.locations)) @ self.masses

    def _sup_ratio(self, t):
        # the ratio is a weighted mean of exp(-2 pi t t_k) whose weights move
        # toward the smallest location as xi grows
        return math.exp(-2 * math.pi * t * float(self.locations.min()))

    def describe(self):
        return {"kind": self.kind, "atoms": [list(a) for a in self.atoms]}


@dataclass(frozen=True, eq=False)
class Tabulated(Window):
    """Piecewise-linear window through samples ``(xs[i], gs[i])`` with ``xs[0] == 0``.

    The support ends at the first zero sample, or at the last sample if all
    samples are positive (then ``g`` jumps to zero there).
    """

    xs: np.ndarray
    gs: np.ndarray
    kind: str = field(default="tabulated", init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        gs = np.asarray(self.gs, dtype=float)
        if xs.ndim != 1 or xs.shape != gs.shape or xs.size < 2:
            raise ValueError("need matching 1-d sample arrays with at least 2 points")
        if xs[0] != 0.0 or np.any(np.diff(xs) <= 0):
            raise ValueError("sample abscissae must start at 0 and increase strictly")
        if np.any(gs < 0) or gs[0] <= 0:
            raise ValueError("samples must be nonnegative with g(0) > 0")
        zeros = np.flatnonzero(gs == 0.0)
        cut = int(zeros[0]) if zeros.size else xs.size - 1
        xs, gs = xs[: cut + 1].copy(), gs[: cut + 1].copy()
        xs.setflags(write=False)
        gs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "gs", gs)

    @property
    def support_sup(self) -> float:
        return float(self.xs[-1])

    @property
    def boundary_limit(self) -> float:
        return float(self.gs[-1])

    def _on_support(self, x):
        return np.interp(x, self.xs, self.gs)

    def _ratio_at(self, x, t):
        gx = self(x)
        keep = gx > 0
        return np.max(self(x[keep] + t) / gx[keep]) if np.any(keep) else 0.0

    def _sup_ratio(self, t):
        grid = np.linspace(0.0, self.support_sup, TABULATED_GRID_POINTS)
        # the ratio of two linear pieces is monotone between breakpoints, so
        # the samples and their back-shifts complete the grid exactly
        extra = np.concatenate([self.xs, self.xs - t])
        extra = extra[(extra >= 0) & (extra <= self.support_sup)]
        return float(max(self._ratio_at(grid, t), self._ratio_at(extra, t)))

    def grid_error(self, t: float) -> float:
        """How much the plain ``10^4``-point grid underestimates the supremum."""
        grid = np.linspace(0.0, self.support_sup, TABULATED_GRID_POINTS)
        return self._sup_ratio(t) - float(self._ratio_at(grid, t))

    def describe(self):
        return {"kind": self.kind, "samples": int(self.xs.size), "support": self.support_sup}

    @classmethod
    def from_csv(cls, path: str | Path) -> "Tabulated":
        xs, gs = [], []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    xs.append(float(row[0]))
                    gs.append(float(row[1]))
                except (ValueError, IndexError):
                    if lineno == 1:
                        continue  # header
                    raise ValueError(f"{path}:{lineno}: expected two numeric columns")
        return cls(np.array(xs), np.array(gs))


def window_value(w: Window, x):
    return w(x)


def decay_ratio(w: Window, t: float) -> float:
    """Smallest ``q`` with ``g(x + t) <= q g(x)``, floored at ``Q_FLOOR``."""
    return w.decay_ratio(t)


def boundary_profile(w: Window) -> tuple[float, float]:
    return w.support_sup, w.boundary_limit


def cauchy_transform_window(atoms: Sequence[tuple[float, float]]) -> CauchyFourier:
    """Fourier-side window of ``int dmu(t) / (x - i t)`` for ``mu = sum mass_k delta_{t_k}``."""
    return CauchyFourier(tuple(atoms))


def parse_window(spec: str) -> Window:
    """Parse ``kind:params`` window descriptors used by the command line.

    ``one-sided-exp:RATE``, ``trunc-linear:X0``, ``trunc-exp:RATE,X0``,
    ``cauchy:MASS@LOC,MASS@LOC,...`` and ``tabulated:PATH``.
    """
    kind, _, params = spec.partition(":")
    kind = kind.strip()
    try:
        if kind == "one-sided-exp":
            return OneSidedExponential(float(params or 1.0))
        if kind == "trunc-linear":
            return TruncatedLinear(float(params or 1.0))
        if kind == "trunc-exp":
            rate, x0 = (float(p) for p in params.split(","))
            return TruncatedExponential(rate, x0)
        if kind == "cauchy":
            atoms = []
            for item in params.split(","):
                mass, loc = item.split("@")
                atoms.append((float(mass), float(loc)))
            return cauchy_transform_window(atoms)
        if kind == "tabulated":
            return Tabulated.from_csv(params)
    except ValueError as exc:
        raise ValueError(f"bad window spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown window kind {kind!r}")
