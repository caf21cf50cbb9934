"""Composite Gauss-Legendre quadrature and Gabor coefficients of piecewise-smooth functions.

Inner products ``<f, pi_{lam, w} g> = int f(t) exp(-2 pi i w t) g(t - lam) dt``
are integrated panel by panel between the discontinuities of the integrand,
doubling the number of panels until the estimate settles.  Sums of squared
coefficients over a modulation lattice are completed beyond the truncation
by the leading jump asymptotics ``|J|^2 / (2 pi w)^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import polygamma

from .windows import Window

GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
ABS_TOL = 1e-10
MAX_DOUBLINGS = 10
# cross terms between distinct jump classes summed explicitly this far past K
TAIL_EXPLICIT = 1 << 13
_JUMP_PROBE = 1e-11


class QuadratureError(RuntimeError):
    pass


def composite_nodes(edges: Sequence[float], width: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on each ``[edges[i], edges[i+1]]``, panels at most ``width`` wide."""
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        k = max(1, math.ceil((b - a) / width))
        left = a + (b - a) * np.arange(k) / k
        h = (b - a) / k
        xs.append((left[:, None] + 0.5 * h * (_GL_NODES + 1.0)[None, :]).ravel())
        ws.append(np.tile(0.5 * h * _GL_WEIGHTS, k))
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def integrate(func: Callable[[np.ndarray], np.ndarray], edges: Sequence[float], width: float,
              tol: float = ABS_TOL):
    """Integrate ``func`` (values along the last axis) over the breakpoint partition.

    The panel width is halved until two successive estimates agree to ``tol``.
    Returns ``(value, error_estimate)``.
    """
    edges = np.unique(np.asarray(edges, dtype=float))
    if edges.size < 2:
        return 0.0, 0.0
    width = min(width, float(edges[-1] - edges[0]))
    x, w = composite_nodes(edges, width)
    prev = func(x) @ w
    for _ in range(MAX_DOUBLINGS):
        width /= 2
        x, w = composite_nodes(edges, width)
        cur = func(x) @ w
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol:
            return cur, err
        prev = cur
    raise QuadratureError(f"no convergence to {tol:g} (last change {err:.3g})")


@dataclass(frozen=True)
class TestFunction:
    """Piecewise-smooth function with known effective support and breakpoints."""

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    label: str = "f"
    # smallest length scale on which f varies, used to size panels
    scale: float = 1.0

    __test__ = False  # not a pytest class

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        inside = (t >= self.support[0]) & (t <= self.support[1])
        out[inside] = self.func(t[inside])
        return out

    def norm_squared(self) -> float:
        val, _ = integrate(lambda t: np.abs(self(t)) ** 2, [self.support[0], *self.breakpoints, self.support[1]],
                           self.scale / 4)
        return float(val)


def gaussian_bump(center: float, width: float, cutoff: float = 9.0) -> TestFunction:
    """``exp(-(t - center)^2 / (2 width^2))``, truncated at ``cutoff`` widths (value ~ 2.6e-18)."""
    return TestFunction(
        lambda t: np.exp(-0.5 * ((t - center) / width) ** 2),
        (center - cutoff * width, center + cutoff * width),
        (),
        f"gaussian({center:g},{width:g})",
        width,
    )


def indicator(a: float, b: float) -> TestFunction:
    if not b > a:
        raise ValueError("empty interval")
    return TestFunction(lambda t: np.ones_like(t), (a, b), (a, b), f"indicator[{a:g},{b:g}]", b - a)


def window_function(w: Window, tol: float = 1e-18) -> TestFunction:
    end = w.effective_support(tol)
    bps = tuple(p for p, _ in w.jumps())
    return TestFunction(w, (0.0, end), bps, f"window:{w.kind}", min(1.0, end))


def _integrand_breaks(w: Window, f: TestFunction, shift: float) -> list[float]:
    lo = max(f.support[0], shift)
    hi = min(f.support[1], shift + w.effective_support())
    if hi <= lo:
        return []
    pts = [lo, hi]
    pts += [p for p in f.breakpoints if lo < p < hi]
    pts += [shift + p for p, _ in w.jumps() if lo < shift + p < hi]
    return sorted(pts)


def _product(w: Window, f: TestFunction, shift: float):
    return lambda t: f(t) * np.conj(w(t - shift))


def phase_matrix(freqs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``exp(-2 pi i freqs[k] t[j])``; equispaced frequencies use a running product."""
    steps = np.diff(freqs)
    if freqs.size < 3 or not np.allclose(steps, steps[0], rtol=0, atol=1e-14 * max(1.0, abs(steps[0]))):
        return np.exp(-2j * np.pi * np.multiply.outer(freqs, t))
    out = np.empty((freqs.size, t.size), dtype=complex)
    out[0] = np.exp(-2j * np.pi * freqs[0] * t)
    step = np.exp(-2j * np.pi * steps[0] * t)
    # re-anchor every 32 rows so rounding cannot accumulate
    for k in range(1, freqs.size):
        out[k] = out[k - 1] * step if k % 32 else np.exp(-2j * np.pi * freqs[k] * t)
    return out


def gabor_coefficients(w: Window, f: TestFunction, shift: float, freqs, tol: float = ABS_TOL) -> np.ndarray:
    """``<f, pi_{shift, w} g>`` for every frequency in ``freqs``."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    edges = _integrand_breaks(w, f, shift)
    if not edges:
        return np.zeros(freqs.size, dtype=complex)
    h = _product(w, f, shift)
    wmax = max(float(np.abs(freqs).max()), 1.0)
    width = min(2.0 / wmax, f.scale / 2)

    def integrand(t):
        return phase_matrix(freqs, t) * h(t)[None, :]

    val, _ = integrate(integrand, edges, width, tol)
    return np.asarray(val)


def integrand_jumps(w: Window, f: TestFunction, shift: float) -> list[tuple[float, complex]]:
    """Positions and sizes of the discontinuities of ``f(t) conj(g(t - shift))``."""
    h = _product(w, f, shift)
    cands = set(f.breakpoints) | {f.support[0], f.support[1]} | {shift + p for p, _ in w.jumps()}
    out = []
    for p in sorted(cands):
        eta = _JUMP_PROBE * max(1.0, abs(p))
        jump = complex(h(np.array([p + eta]))[0] - h(np.array([p - eta]))[0])
        if abs(jump) > 1e-300:
            out.append((p, jump))
    return out


def jump_tail(jumps: list[tuple[float, complex]], beta: float, phase: float, K: int) -> float:
    """Asymptotic ``sum_{|k| > K} |<f, pi g>|^2`` at frequencies ``beta k + phase``.

    Uses ``F(w) ~ sum_j J_j exp(-2 pi i w t_j) / (2 pi i w)``.  Jumps whose
    positions agree modulo ``1/beta`` add coherently and are merged; the
    squared amplitudes of the merged classes are summed in closed form with
    the trigamma function, the oscillating cross terms explicitly up to
    ``K + TAIL_EXPLICIT``.
    """
    if not jumps:
        return 0.0
    period = 1.0 / beta
    classes: dict[float, complex] = {}
    for p, j in jumps:
        r = p % period
        key = next((k for k in classes if min(abs(k - r), period - abs(k - r)) < 1e-12 * max(1.0, period)), r)
        classes[key] = classes.get(key, 0.0) + j * np.exp(-2j * np.pi * phase * p)
    pos = np.array(list(classes))
    amp = np.array(list(classes.values()))
    c = phase / beta
    scale = 1.0 / (4 * np.pi ** 2 * beta ** 2)
    total = scale * float(np.sum(np.abs(amp) ** 2)) * float(polygamma(1, K + 1 + c) + polygamma(1, K + 1 - c))
    if pos.size > 1:
        ks = np.arange(K + 1, K + TAIL_EXPLICIT + 1)
        for sign in (1, -1):
            kk = sign * ks
            om = beta * kk + phase
            terms = np.exp(-2j * np.pi * beta * np.multiply.outer(kk, pos)) * amp[None, :]
            cross = np.abs(terms.sum(axis=1)) ** 2 - np.sum(np.abs(terms) ** 2, axis=1)
            total += float(np.sum(cross / (2 * np.pi * om) ** 2))
    return total


@dataclass
class FrameSum:
    """Truncated frame sum ``sum_gamma |<f, pi_gamma g>|^2`` with its jump-tail completion."""

    head: float
    tail: float
    points: np.ndarray
    K: int
    per_point: np.ndarray = field(repr=False)

    @property
    def total(self) -> float:
        return self.head + self.tail


def relevant_points(w: Window, f: TestFunction, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    ext = w.effective_support()
    return pts[(pts < f.support[1]) & (pts + ext > f.support[0])]


def frame_sum(w: Window, f: TestFunction, points, phases, beta: float, K: int,
              tol: float = ABS_TOL, with_tail: bool = True) -> FrameSum:
    """Squared Gabor coefficients over ``points x (beta Z + phase)``, modulations ``|k| <= K``."""
    points = np.asarray(points, dtype=float)
    phases = np.zeros(points.size) if phases is None else np.asarray(phases, dtype=float)
    ks = np.arange(-K, K + 1)
    head = np.zeros(points.size)
    tail = 0.0
    for i, (lam, c) in enumerate(zip(points, phases)):
        coef = gabor_coefficients(w, f, lam, beta * ks + c, tol)
        head[i] = float(np.sum(np.abs(coef) ** 2))
        if with_tail:
            tail += jump_tail(integrand_jumps(w, f, lam), beta, c, K)
    return FrameSum(float(head.sum()), tail, points, K, head)


def fiber_edges(w: Window, f: TestFunction, points, beta: float) -> list[float]:
    """Breakpoints in ``[0, 1/beta)`` where some entry of ``G_x v_f(x)`` is discontinuous."""
    period = 1.0 / beta
    marks = [0.0, period]
    for lam in np.asarray(points, dtype=float):
        marks += [(lam + p) % period for p, _ in w.jumps()]
    marks += [p % period for p in f.breakpoints]
    return sorted(set(marks))


def periodization_columns(f: TestFunction, beta: float) -> np.ndarray:
    """Column indices ``n`` with ``x + n/beta`` inside the support of ``f`` for some ``x``."""
    return np.arange(math.floor(f.support[0] * beta) - 1, math.ceil(f.support[1] * beta) + 1)


def scalar_fiber_integral(func: Callable[[float], float], edges, width: float,
                          tol: float = ABS_TOL) -> float:
    """Integrate a scalar function of one fiber point (evaluated pointwise) over ``edges``."""
    val, _ = integrate(lambda xs: np.array([func(float(x)) for x in xs]), edges, width, tol)
    return float(np.real(val))
