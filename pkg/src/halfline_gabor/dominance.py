"""Explicit lower bounds for row dominant matrices with exponential off-diagonal decay.

Hypotheses on a (finite or bi-infinite) matrix ``D``:

* ``|d(n, n)| >= delta``,
* ``|d(n, m)| <= C lam^|m - n|`` for ``m != n``,
* ``sum_{m != n} |d(n, m)| <= lam |d(n, n)|``.

Under these, ``||D v|| >= eps ||v||`` with ``eps`` produced by :func:`certificate`.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

N0_GRID = range(1, 61)
KAPPA_EXPONENTS = range(1, 51)
SIGMA_SLACK = 1e-10


class CertificateError(ValueError):
    """No admissible ``(n0, kappa)`` pair on the search grid."""


class HypothesisError(ValueError):
    """A matrix handed to the certificate check violates the hypotheses."""


@dataclass(frozen=True)
class DominanceCertificate:
    delta: float
    C: float
    lam: float
    n0: int
    kappa: float
    q_val: float
    epsilon: float

    def to_dict(self) -> dict:
        return asdict(self)


def q_value(lam: float, c_ratio: float, n0: int, kappa: float) -> float:
    """``lam kappa^-n0 + 2 c_ratio sum_{l > n0} (lam/kappa)^l``, tail in closed form."""
    r = lam / kappa
    if not r < 1:
        return math.inf
    return lam * kappa ** (-n0) + 2.0 * c_ratio * r ** (n0 + 1) / (1.0 - r)


def spread_factor(kappa: float) -> float:
    """``1 + sum_{l != 0} kappa^(2|l|)``."""
    k2 = kappa * kappa
    return 1.0 + 2.0 * k2 / (1.0 - k2)


def epsilon_for(delta: float, q_val: float, kappa: float) -> float:
    return delta * (1.0 - q_val) / math.sqrt(spread_factor(kappa))


def certificate(delta: float, C: float, lam: float) -> DominanceCertificate:
    """Best ``eps`` over the fixed ``(n0, kappa)`` grid.

    Rows are normalised by their diagonal, so the decay constant enters as
    ``C / delta``.  ``C`` below ``delta * lam`` is raised to it, which only
    weakens the hypothesis.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")
    C = max(float(C), delta * lam)
    c_ratio = C / delta
    best = None
    best_q = math.inf
    for n0 in N0_GRID:
        for j in KAPPA_EXPONENTS:
            kappa = 1.0 - 2.0 ** (-j)
            if lam / kappa >= 1:
                continue
            qv = q_value(lam, c_ratio, n0, kappa)
            best_q = min(best_q, qv)
            if qv >= 1:
                continue
            eps = epsilon_for(delta, qv, kappa)
            if best is None or eps > best[0]:
                best = (eps, n0, kappa, qv)
    if best is None:
        raise CertificateError(f"no admissible (n0, kappa); smallest q found {best_q:.6g}")
    eps, n0, kappa, qv = best
    return DominanceCertificate(float(delta), C, float(lam), n0, kappa, qv, eps)


@dataclass(frozen=True)
class HypothesisScan:
    diagonal_ok: bool
    decay_ok: bool
    dominance_ok: bool
    worst_dominance_ratio: float

    @property
    def ok(self) -> bool:
        return self.diagonal_ok and self.decay_ok and self.dominance_ok


def hypothesis_scan(D, delta: float, C: float, lam: float, rtol: float = 1e-12) -> HypothesisScan:
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("square matrix expected")
    mag = np.abs(D)
    diag = np.diag(mag).copy()
    off = mag.copy()
    np.fill_diagonal(off, 0.0)
    idx = np.arange(D.shape[0])
    lag = np.abs(idx[None, :] - idx[:, None])
    bound = C * np.power(lam, lag, dtype=float)
    scale = float(mag.max()) if mag.size else 1.0
    decay_ok = bool(np.all(off <= bound * (1 + rtol) + rtol * scale))
    diagonal_ok = bool(np.all(diag >= delta * (1 - rtol)))
    row = off.sum(axis=1)
    dominance_ok = bool(np.all(row <= lam * diag * (1 + rtol) + rtol * scale))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(diag > 0, row / diag, np.inf)
    return HypothesisScan(diagonal_ok, decay_ok, dominance_ok, float(ratio.max()))


def smallest_singular_value(D) -> float:
    return float(np.linalg.svd(np.asarray(D), compute_uv=False).min())


def certified_sigma_min_check(D, cert: DominanceCertificate) -> bool:
    """``sigma_min(D) >= cert.epsilon`` for a matrix that satisfies the hypotheses.

    Raises :class:`HypothesisError` when the matrix is outside the bound's
    reach; a ``False`` return therefore signals an unsound certificate.
    """
    scan = hypothesis_scan(D, cert.delta, cert.C, cert.lam)
    if not scan.ok:
        raise HypothesisError(f"matrix violates the dominance hypotheses: {scan}")
    return smallest_singular_value(D) >= cert.epsilon - SIGMA_SLACK


def random_conforming_matrix(delta: float, C: float, lam: float, size: int, seed: int,
                             complex_entries: bool = False) -> np.ndarray:
    """Seeded random matrix meeting all three hypotheses by construction.

    Diagonal magnitudes are drawn from ``[delta, 2 delta]``.  Each row spends
    a budget of ``lam |d(n, n)|`` from left to right, every entry taking a
    random fraction of ``min(C lam^|m-n|, remaining budget)``.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = np.random.default_rng(seed)
    dtype = complex if complex_entries else float

    def unit(shape):
        if complex_entries:
            return np.exp(2j * np.pi * rng.random(shape))
        return rng.choice([-1.0, 1.0], size=shape)

    D = np.zeros((size, size), dtype=dtype)
    diag = rng.uniform(delta, 2 * delta, size=size)
    D[np.diag_indices(size)] = diag * unit(size)
    for n in range(size):
        budget = lam * diag[n]
        fractions = rng.random(size)
        signs = unit(size)
        for m in range(size):
            if m == n:
                continue
            cap = min(C * lam ** abs(m - n), budget)
            mag = fractions[m] * cap
            budget -= mag
            D[n, m] = mag * signs[m]
    return D
