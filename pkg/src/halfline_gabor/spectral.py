"""Extreme singular values of dense matrices at desk scale."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

MAX_DIM = 2048


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralResult:
    sigma_min: float
    sigma_max: float
    iterations: int
    residual: float


def extreme_singular_values(M, tol: float = 1e-8) -> SpectralResult:
    """Largest and smallest singular value of ``M`` via a dense LAPACK SVD.

    For a wide matrix (fewer rows than columns) ``sigma_min`` is 0, the
    smallest singular value of the full operator.  ``residual`` is the
    largest relative singular-triplet residual of the two extremes.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("non-empty 2-d matrix expected")
    if min(M.shape) > MAX_DIM:
        raise ValueError(f"matrix {M.shape} exceeds desk-scale limit {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"SVD did not converge: {exc}") from exc
    smax = float(s[0])
    scale = smax if smax > 0 else 1.0
    res = 0.0
    for k in (0, s.size - 1):
        u, v = U[:, k], Vh[k].conj()
        res = max(res, np.linalg.norm(M @ v - s[k] * u) / scale,
                  np.linalg.norm(M.conj().T @ u - s[k] * v) / scale)
    if res > tol:
        raise SpectralError(f"singular triplet residual {res:.3g} above tolerance")
    smin = float(s[-1]) if M.shape[0] >= M.shape[1] else 0.0
    # one direct LAPACK call (gesdd); it has no user-visible iteration count
    return SpectralResult(smin, smax, 1, float(res))


def truncation_sweep(builder: Callable[[int], np.ndarray], sizes: Iterable[int],
                     tol: float = 1e-8) -> list[tuple[int, SpectralResult]]:
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be increasing")
    return [(n, extreme_singular_values(builder(n), tol)) for n in sizes]


def write_sweep_csv(rows: list[tuple[int, SpectralResult]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "sigma_min", "sigma_max", "residual"])
        for n, r in rows:
            writer.writerow([n, repr(r.sigma_min), repr(r.sigma_max), repr(r.residual)])
