"""Frame decisions, certified lower frame bounds and numerical evidence.

Frame bounds follow the fiber normalisation ``A = beta * inf_x sigma_min(G_x)^2``
and ``B = beta * sup_x sigma_max(G_x)^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import quadrature as quad
from .dominance import DominanceCertificate, certificate, hypothesis_scan, smallest_singular_value
from .grids import REL_TOL, RegularGrid, SemiIrregularGrid
from .ronshen import (
    build_slice,
    dominance_report,
    fiber_matrix,
    reduced_semi_irregular,
    reduced_upper_triangular,
    u_transform,
)
from .spectral import extreme_singular_values
from .windows import NotStablyDecreasing, Window

Grid = Union[RegularGrid, SemiIrregularGrid]


class Verdict(str, enum.Enum):
    FRAME = "Frame"
    NOT_FRAME = "NotFrame"
    UNSUPPORTED = "Unsupported"


class Reason(str, enum.Enum):
    PRODUCT_RULE = "product_rule"
    SUPPORT_RULE = "support_rule"
    BOUNDARY_RULE = "boundary_rule"
    CERTIFIED = "certified"
    # frame by the three-case rule, before (or without) a certificate
    CRITERION = "criterion"
    HYPOTHESIS = "hypothesis_violation"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    reason: Reason
    detail: str = ""

    @property
    def is_frame(self) -> bool:
        return self.verdict is Verdict.FRAME


def window_problems(w: Window, beta: float = 1.0, samples: int = 200) -> list[str]:
    """Sampled check that ``w`` is one-sided, non-increasing and stably decreasing."""
    problems = []
    if np.any(w(np.linspace(-5.0, -1e-9, 50)) != 0):
        problems.append("nonzero on the negative half-line")
    top = min(w.support_sup, 10.0)
    vals = w(np.linspace(0.0, top, samples))
    if np.any(np.diff(vals) > 1e-14 * max(vals[0], 1.0)):
        problems.append("not non-increasing")
    for t in sorted({0.01, 0.1, 0.5, 1.0, 1.0 / beta}):
        try:
            w.decay_ratio(t)
        except NotStablyDecreasing as exc:
            problems.append(str(exc))
    return problems


def classify(w: Window, alpha: float, beta: float) -> Classification:
    """Decide the frame property of the regular system with window ``w``.

    Frame iff ``alpha*beta <= 1`` and either the support is unbounded,
    ``alpha < x0``, or ``alpha == x0`` with a positive left limit at ``x0``.
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError("lattice parameters must be positive")
    problems = window_problems(w, beta)
    if problems:
        return Classification(Verdict.UNSUPPORTED, Reason.HYPOTHESIS, "; ".join(problems))
    if alpha * beta > 1.0 + REL_TOL:
        return Classification(Verdict.NOT_FRAME, Reason.PRODUCT_RULE, f"alpha*beta = {alpha * beta:g} > 1")
    x0 = w.support_sup
    if math.isfinite(x0):
        if alpha > x0 * (1 + REL_TOL):
            return Classification(Verdict.NOT_FRAME, Reason.SUPPORT_RULE, f"alpha = {alpha:g} > x0 = {x0:g}")
        if abs(alpha - x0) <= REL_TOL * x0 and w.boundary_limit <= 0:
            return Classification(Verdict.NOT_FRAME, Reason.BOUNDARY_RULE,
                                  f"alpha = x0 = {x0:g} with vanishing boundary limit")
    return Classification(Verdict.FRAME, Reason.CRITERION)


def x_grid(beta: float, size: int) -> np.ndarray:
    """Uniform fiber points in ``[0, 1/beta)`` offset by half a step."""
    if size < 1:
        raise ValueError("x grid needs at least one point")
    return (np.arange(size) + 0.5) / (beta * size)


@dataclass
class EmpiricalBounds:
    A: float
    B: float
    xs: np.ndarray
    sigma_min: np.ndarray
    sigma_max: np.ndarray

    def rows(self):
        return [(float(x), float(a), float(b)) for x, a, b in zip(self.xs, self.sigma_min, self.sigma_max)]


def empirical_frame_bounds(w: Window, grid: Grid, x_grid_size: int = 32, truncation: int = 64,
                           tol: float = 1e-8) -> EmpiricalBounds:
    """Frame bound estimates from the unreduced truncated fibers ``G_x``."""
    xs = x_grid(grid.beta, x_grid_size)
    smin = np.empty(xs.size)
    smax = np.empty(xs.size)
    for i, x in enumerate(xs):
        res = extreme_singular_values(build_slice(w, grid, float(x), truncation).entries, tol)
        smin[i], smax[i] = res.sigma_min, res.sigma_max
    beta = grid.beta
    return EmpiricalBounds(beta * float(smin.min()) ** 2, beta * float(smax.max()) ** 2, xs, smin, smax)


@dataclass
class FrameReport:
    verdict: Verdict
    reason: Reason
    certified_epsilon: Optional[float] = None
    certified_A: Optional[float] = None
    empirical_A: Optional[float] = None
    empirical_B: Optional[float] = None
    certificate: Optional[DominanceCertificate] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.certified_epsilon is not None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason.value,
            "certified_epsilon": self.certified_epsilon,
            "certified_A": self.certified_A,
            "empirical_A": self.empirical_A,
            "empirical_B": self.empirical_B,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "diagnostics": self.diagnostics,
        }


def _reduced_d(w: Window, grid: Grid, x: float, truncation: int, q: float):
    if isinstance(grid, SemiIrregularGrid):
        gstar = reduced_semi_irregular(w, grid, x, truncation)
    else:
        gstar = reduced_upper_triangular(w, grid.alpha, grid.beta, x, (-truncation, truncation))
    return u_transform(gstar, q)


def _check_semi_irregular(w: Window, grid: SemiIrregularGrid) -> None:
    v = grid.validation
    if not v.gap_ok:
        raise ValueError(f"gap bound violated: max gap {v.max_gap:g} > alpha = {grid.alpha:g}")
    if v.separation_m is None:
        raise ValueError("no separation index m within the point list")
    if grid.product > 1.0 + REL_TOL:
        raise ValueError("alpha*beta must not exceed 1")
    if grid.has_phases:
        raise ValueError("certification needs zero phases")
    problems = window_problems(w, grid.beta)
    if problems:
        raise ValueError("window outside the hypotheses: " + "; ".join(problems))
    if not w.left_limit(grid.alpha) > 0:
        raise ValueError("window must stay positive up to alpha")


def certify_lower_frame_bound(w: Window, grid: Grid, x_grid_size: int = 32, truncation: int = 64,
                              empirical: bool = True, tol: float = 1e-8) -> FrameReport:
    """Certified lower frame bound through the dominance reduction.

    The diagonal floor is ``g(alpha-)``, the decay constant ``g(0)/q`` and
    the rate ``q = q(1/beta)``; every fiber of the grid must pass the
    dominance scan, otherwise the report keeps empirical bounds only.
    """
    if isinstance(grid, SemiIrregularGrid):
        _check_semi_irregular(w, grid)
        cls = Classification(Verdict.FRAME, Reason.CRITERION, "semi-irregular hypotheses hold")
    else:
        cls = classify(w, grid.alpha, grid.beta)
        if not cls.is_frame:
            return FrameReport(cls.verdict, cls.reason, diagnostics={"detail": cls.detail})
    beta = grid.beta
    q = w.decay_ratio(1.0 / beta)
    delta = w.left_limit(grid.alpha)
    cert = certificate(delta, w.g0 / q, q)
    xs = x_grid(beta, x_grid_size)
    delta_obs, sigma_d, failing = [], [], []
    for x in xs:
        d = _reduced_d(w, grid, float(x), truncation, q)
        rep = dominance_report(d)
        scan = hypothesis_scan(d.matrix, cert.delta, cert.C, cert.lam)
        delta_obs.append(rep.delta_obs)
        sigma_d.append(smallest_singular_value(d.matrix))
        if not (rep.passed and scan.ok):
            failing.append(float(x))
    diagnostics = {
        "x_grid_size": int(x_grid_size),
        "truncation": int(truncation),
        "q": q,
        "delta_floor": delta,
        "delta_obs": [float(v) for v in delta_obs],
        "min_sigma_D": float(min(sigma_d)),
        "failing_x": failing,
    }
    if isinstance(grid, SemiIrregularGrid):
        diagnostics["separation_m"] = grid.validation.separation_m
        diagnostics["max_gap"] = grid.validation.max_gap
    report = FrameReport(Verdict.FRAME, cls.reason, diagnostics=diagnostics)
    if not failing:
        report.reason = Reason.CERTIFIED
        report.certificate = cert
        report.certified_epsilon = cert.epsilon
        report.certified_A = beta * (cert.epsilon / (1.0 + q)) ** 2
    if empirical:
        emp = empirical_frame_bounds(w, grid, x_grid_size, truncation, tol)
        report.empirical_A, report.empirical_B = emp.A, emp.B
    return report


@dataclass
class QuadraticForm:
    direct: float
    fiber: float
    tail: float
    points: np.ndarray
    notes: list = field(default_factory=list)

    @property
    def relative_discrepancy(self) -> float:
        scale = max(abs(self.direct), abs(self.fiber))
        return abs(self.direct - self.fiber) / scale if scale > 0 else 0.0


def _grid_points(w: Window, grid: Grid, f: quad.TestFunction):
    lo = f.support[0] - w.effective_support()
    if isinstance(grid, RegularGrid):
        pts = grid.points_between(lo, f.support[1])
    else:
        pts = grid.points
    pts = quad.relevant_points(w, f, pts)
    return pts, grid.phases_for(pts)


def fiber_quadratic_form(w: Window, f: quad.TestFunction, points, phases, beta: float,
                         tol: float = quad.ABS_TOL) -> float:
    """``(1/beta) int_0^{1/beta} ||G_x v_f(x)||^2 dx`` with ``v_f(x) = conj f(x + n/beta)``."""
    cols = quad.periodization_columns(f, beta)
    edges = quad.fiber_edges(w, f, points, beta)

    def energy(x: float) -> float:
        v = np.conj(f(x + cols / beta))
        return float(np.sum(np.abs(fiber_matrix(w, points, beta, x, cols, phases) @ v) ** 2))

    width = min(1.0 / beta, f.scale / 2)
    return quad.scalar_fiber_integral(energy, edges, width, tol) / beta


def frame_operator_quadratic_form(w: Window, grid: Grid, f: quad.TestFunction, trunc: int = 64,
                                  tol: float = quad.ABS_TOL) -> QuadraticForm:
    """Frame-operator quadratic form ``<Sf, f>`` computed two ways.

    ``direct`` sums squared inner products over the translations near ``f``
    and modulations ``|k| <= trunc`` (completed by the jump asymptotics);
    ``fiber`` integrates the fiber energy.  Their agreement checks the
    fiber normalisation and phase convention of ``G_x``.
    """
    pts, phases = _grid_points(w, grid, f)
    fs = quad.frame_sum(w, f, pts, phases, grid.beta, trunc, tol)
    fiber = fiber_quadratic_form(w, f, pts, phases, grid.beta, tol)
    notes = []
    if fs.total > 0 and fs.tail > 1e-2 * fs.total:
        notes.append(f"modulation tail is {fs.tail / fs.total:.2%} of the sum; raise trunc")
    if isinstance(grid, SemiIrregularGrid):
        if grid.points[0] > f.support[0] - w.effective_support() or grid.points[-1] < f.support[1]:
            notes.append("point list does not cover the effective support of f")
    return QuadraticForm(fs.total, fiber, fs.tail, pts, notes)


@dataclass(frozen=True)
class IncompletenessWitness:
    interval: tuple[float, float]
    residual: float


def incompleteness_witness(w: Window, alpha: float, beta: float, n_range: int = 8,
                           K: int = 32) -> IncompletenessWitness:
    """Indicator inside an uncovered gap; all its Gabor coefficients vanish when ``alpha > x0``."""
    x0 = w.support_sup
    if not (math.isfinite(x0) and alpha > x0):
        raise ValueError("a coverage gap needs a compactly supported window with alpha > x0")
    margin = (alpha - x0) / 4
    h = quad.indicator(x0 + margin, alpha - margin)
    freqs = beta * np.arange(-K, K + 1)
    residual = 0.0
    for n in range(-n_range, n_range + 1):
        coef = quad.gabor_coefficients(w, h, alpha * n, freqs)
        residual = max(residual, float(np.abs(coef).max()))
    return IncompletenessWitness((x0 + margin, alpha - margin), residual)


def boundary_degeneration_demo(w: Window, beta: float, eps_list, K: int = 256) -> list[float]:
    """Normalised frame sums ``R(eps)`` of ``chi_[x0 - eps, x0]`` at ``alpha = x0``."""
    x0 = w.support_sup
    if not math.isfinite(x0):
        raise ValueError("window must have compact support")
    if w.boundary_limit > 0:
        raise ValueError("boundary degeneration needs a vanishing boundary limit")
    if x0 * beta > 1.0 + REL_TOL:
        raise ValueError("alpha*beta must not exceed 1")
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 or e >= x0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be strictly decreasing in (0, x0)")
    grid = RegularGrid(x0, beta)
    out = []
    for eps in eps_list:
        f = quad.indicator(x0 - eps, x0)
        pts, phases = _grid_points(w, grid, f)
        out.append(quad.frame_sum(w, f, pts, phases, beta, K).total / eps)
    return out
