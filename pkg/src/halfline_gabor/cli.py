"""Command line front end: certifications, bound tables, sweeps and demos.

Settings come from flags and, optionally, a flat ``key = value`` file passed
with ``--config``; keys are the long flag names (dashes or underscores) and
flags win over the file.  With ``--output DIR`` artifacts are written into
``DIR``; otherwise the primary artifact goes to stdout.

Exit status: 0 success, 2 NotFrame verdict from ``certify``, 1 any error.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import schemas
from .dominance import (
    CertificateError,
    HypothesisError,
    certificate,
    certified_sigma_min_check,
    random_conforming_matrix,
    smallest_singular_value,
)
from .framecert import (
    Verdict,
    boundary_degeneration_demo,
    certify_lower_frame_bound,
    classify,
    empirical_frame_bounds,
    incompleteness_witness,
)
from .grids import jittered_lattice, load_points_csv, regular_lattice, save_points_csv, semi_irregular
from .windows import Window, parse_window

COMMANDS = ("certify", "bounds", "sweep", "irregular", "demo", "dominance-test")
EXIT_OK, EXIT_ERROR, EXIT_NOT_FRAME = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: Optional[str] = None
    window: Optional[str] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    x_grid_size: int = 32
    truncation: int = 64
    seed: int = 0
    output: Optional[str] = None
    workers: int = 1
    spectral_tol: float = 1e-8
    empirical: Optional[bool] = None
    points: Optional[str] = None
    jitter: float = 0.1
    count: Optional[int] = None
    demo: str = "boundary"
    eps: str = "0.2,0.1,0.05,0.025"
    delta: float = 1.0
    C: float = 1.0
    lam: float = 0.5
    sweep_min: float = 0.05
    sweep_max: float = 1.50
    sweep_step: float = 0.05

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {self.command!r}")
        for name in ("x_grid_size", "truncation", "workers", "spectral_tol", "jitter", "delta", "C",
                     "sweep_min", "sweep_max", "sweep_step"):
            if not getattr(self, name) > 0 and not (name == "jitter" and self.jitter == 0):
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)!r}")
        for name in ("alpha", "beta", "count"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ConfigError(f"{name}: must be positive, got {val!r}")
        if not 0 < self.lam < 1:
            raise ConfigError(f"lambda: must lie in (0, 1), got {self.lam!r}")
        if self.demo not in ("incompleteness", "boundary"):
            raise ConfigError(f"demo: expected incompleteness or boundary, got {self.demo!r}")
        return self

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"{self.command}: missing setting(s) {', '.join(missing)}")


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONVERTERS = {"alpha": float, "beta": float, "x_grid_size": int, "truncation": int, "seed": int,
               "workers": int, "spectral_tol": float, "empirical": _bool, "jitter": float, "count": int,
               "delta": float, "C": float, "lam": float, "sweep_min": float, "sweep_max": float,
               "sweep_step": float}
# file key -> field; flag spellings are accepted with dashes or underscores
_ALIASES = {"lambda": "lam", "x_grid": "x_grid_size", "c": "C"}
_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def _key_to_field(key: str) -> Optional[str]:
    key = key.strip().replace("-", "_")
    key = _ALIASES.get(key, key)
    return key if key in _FIELD_NAMES else None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into field values; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        name = _key_to_field(key)
        if name is None:
            raise ConfigError(f"{source}:{lineno}: unknown key {key.strip()!r}")
        value = value.strip()
        try:
            out[name] = _CONVERTERS.get(name, str)(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: field {key.strip()!r}: {exc}") from None
    return out


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for NotFrame
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="halfline-gabor", description="Gabor frames for half-line windows.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--window", help="one-sided-exp:R | trunc-linear:X0 | trunc-exp:R,X0 | "
                                    "cauchy:M@T,... | tabulated:PATH")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--x-grid", "--x-grid-size", dest="x_grid_size", type=int)
    p.add_argument("--truncation", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="directory for artifacts")
    p.add_argument("--workers", type=int)
    p.add_argument("--spectral-tol", type=float)
    p.add_argument("--empirical", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--points", help="CSV of translation points (irregular, bounds)")
    p.add_argument("--jitter", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--demo", choices=("incompleteness", "boundary"))
    p.add_argument("--eps", help="comma separated, strictly decreasing")
    p.add_argument("--delta", type=float)
    p.add_argument("--C", "--c", dest="C", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--sweep-min", type=float)
    p.add_argument("--sweep-max", type=float)
    p.add_argument("--sweep-step", type=float)
    return p


def load_config(argv: list[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    values = {}
    path = ns.pop("config")
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        values.update(parse_config_text(text, path))
    values.update({k: v for k, v in ns.items() if v is not None})
    return RunConfig(**values).validate()


# ----------------------------------------------------------------- helpers

def analysis_parameters(w: Window, alpha: float, beta: float) -> tuple[float, float, bool]:
    """Cauchy-transform windows are analysed on the Fourier side, with ``(alpha, beta)`` swapped."""
    if w.kind == "cauchy":
        return beta, alpha, True
    return alpha, beta, False


def _grid_block(alpha, beta, variant="regular"):
    return {"variant": variant, "alpha": alpha, "beta": beta}


def _emit(cfg: RunConfig, payload: dict, name: str) -> None:
    text = schemas.dumps(payload)
    if cfg.output:
        (Path(cfg.output) / name).write_text(text)
    else:
        sys.stdout.write(text)


def _outdir(cfg: RunConfig) -> Optional[Path]:
    if not cfg.output:
        return None
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands

def cmd_certify(cfg: RunConfig) -> int:
    cfg.require("window", "alpha", "beta")
    w = parse_window(cfg.window)
    a, b, swapped = analysis_parameters(w, cfg.alpha, cfg.beta)
    empirical = True if cfg.empirical is None else cfg.empirical
    report = certify_lower_frame_bound(w, regular_lattice(a, b), cfg.x_grid_size, cfg.truncation,
                                       empirical, cfg.spectral_tol)
    _outdir(cfg)
    _emit(cfg, {
        "command": "certify",
        "window": {"spec": cfg.window, **w.describe()},
        "grid": _grid_block(cfg.alpha, cfg.beta),
        "analyzed": {"alpha": a, "beta": b, "swapped": swapped},
        "report": report.to_dict(),
    }, "report.json")
    return EXIT_NOT_FRAME if report.verdict is Verdict.NOT_FRAME else EXIT_OK


def _grid_from_config(cfg: RunConfig, w: Window):
    a, b, swapped = analysis_parameters(w, cfg.alpha, cfg.beta)
    if cfg.points:
        return semi_irregular(load_points_csv(cfg.points), b, a), "semi-irregular", swapped
    return regular_lattice(a, b), "regular", swapped


def cmd_bounds(cfg: RunConfig) -> int:
    cfg.require("window", "alpha", "beta")
    w = parse_window(cfg.window)
    grid, variant, swapped = _grid_from_config(cfg, w)
    emp = empirical_frame_bounds(w, grid, cfg.x_grid_size, cfg.truncation, cfg.spectral_tol)
    out = _outdir(cfg)
    if out:
        schemas.write_csv(schemas.FIBER_HEADER, emp.rows(), out / "fibers.csv")
    _emit(cfg, {
        "command": "bounds",
        "window": {"spec": cfg.window, **w.describe()},
        "grid": _grid_block(cfg.alpha, cfg.beta, variant),
        "analyzed": {"alpha": grid.alpha, "beta": grid.beta, "swapped": swapped},
        "x_grid_size": cfg.x_grid_size,
        "truncation": cfg.truncation,
        "empirical_A": emp.A,
        "empirical_B": emp.B,
        "argmin_x": float(emp.xs[int(np.argmin(emp.sigma_min))]),
        "argmax_x": float(emp.xs[int(np.argmax(emp.sigma_max))]),
    }, "summary.json")
    return EXIT_OK


def sweep_values(lo: float, hi: float, step: float) -> list[float]:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(n)]


def sweep_cell(args) -> tuple:
    """One ``(alpha, beta)`` cell; top level so it pickles for worker processes."""
    spec, alpha, beta, x_grid_size, truncation, empirical, tol = args
    w = parse_window(spec)
    a, b, _ = analysis_parameters(w, alpha, beta)
    cls = classify(w, a, b)
    if not cls.is_frame:
        return (alpha, beta, cls.verdict.value, None, None, None)
    try:
        rep = certify_lower_frame_bound(w, regular_lattice(a, b), x_grid_size, truncation, empirical, tol)
    except CertificateError:
        # frame by the criterion, but the dominance constants admit no certificate
        if not empirical:
            return (alpha, beta, cls.verdict.value, None, None, None)
        emp = empirical_frame_bounds(w, regular_lattice(a, b), x_grid_size, truncation, tol)
        return (alpha, beta, cls.verdict.value, None, emp.A, emp.B)
    return (alpha, beta, rep.verdict.value, rep.certified_A, rep.empirical_A, rep.empirical_B)


def cmd_sweep(cfg: RunConfig) -> int:
    cfg.require("window")
    parse_window(cfg.window)  # fail early on a bad spec
    if cfg.sweep_max < cfg.sweep_min:
        raise ConfigError("sweep_max: must not be below sweep_min")
    vals = sweep_values(cfg.sweep_min, cfg.sweep_max, cfg.sweep_step)
    empirical = False if cfg.empirical is None else cfg.empirical
    jobs = [(cfg.window, a, b, cfg.x_grid_size, cfg.truncation, empirical, cfg.spectral_tol)
            for a in vals for b in vals]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(sweep_cell, jobs, chunksize=8))
    else:
        rows = [sweep_cell(j) for j in jobs]
    out = _outdir(cfg)
    if out:
        schemas.write_csv(schemas.SWEEP_HEADER, rows, out / "sweep.csv")
    else:
        schemas.write_csv(schemas.SWEEP_HEADER, rows, sys.stdout)
    return EXIT_OK


def cmd_irregular(cfg: RunConfig) -> int:
    cfg.require("window", "alpha", "beta")
    w = parse_window(cfg.window)
    out = _outdir(cfg)
    if cfg.points:
        pts = load_points_csv(cfg.points)
        source = {"points_file": cfg.points}
    else:
        count = cfg.count or 128
        pts = jittered_lattice(cfg.alpha, cfg.jitter, cfg.seed, count)
        source = {"generator": "jittered_lattice", "jitter": cfg.jitter, "seed": cfg.seed, "count": count}
        if out:
            save_points_csv(pts, out / "points.csv")
    grid = semi_irregular(pts, cfg.beta, cfg.alpha)
    v = grid.validation
    empirical = True if cfg.empirical is None else cfg.empirical
    report = certify_lower_frame_bound(w, grid, cfg.x_grid_size, cfg.truncation, empirical, cfg.spectral_tol)
    _emit(cfg, {
        "command": "irregular",
        "window": {"spec": cfg.window, **w.describe()},
        "grid": {**_grid_block(cfg.alpha, cfg.beta, "semi-irregular"), **source,
                 "num_points": int(pts.size)},
        "validation": {"gap_ok": v.gap_ok, "max_gap": v.max_gap, "min_gap": v.min_gap,
                       "separation_m": v.separation_m},
        "report": report.to_dict(),
    }, "report.json")
    return EXIT_OK


def _parse_eps(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"eps: {exc}") from None


def cmd_demo(cfg: RunConfig) -> int:
    cfg.require("window", "beta")
    w = parse_window(cfg.window)
    out = _outdir(cfg)
    payload = {"command": "demo", "demo": cfg.demo, "window": {"spec": cfg.window, **w.describe()},
               "beta": cfg.beta}
    if cfg.demo == "incompleteness":
        cfg.require("alpha")
        wit = incompleteness_witness(w, cfg.alpha, cfg.beta)
        payload.update(alpha=cfg.alpha, interval=list(wit.interval), residual=wit.residual)
    else:
        eps = _parse_eps(cfg.eps)
        ratios = boundary_degeneration_demo(w, cfg.beta, eps)
        payload.update(alpha=w.support_sup, eps=eps, ratios=ratios,
                       strictly_decreasing=all(b < a for a, b in zip(ratios, ratios[1:])),
                       last_over_first=ratios[-1] / ratios[0])
        if out:
            schemas.write_csv(schemas.DEMO_HEADER, zip(eps, ratios), out / "demo.csv")
    _emit(cfg, payload, "demo.json")
    return EXIT_OK


def dominance_campaign(delta: float, C: float, lam: float, count: int, seed: int,
                       sizes: tuple[int, int] = (2, 40)) -> dict:
    """Random conforming matrices, alternating real and complex, against the certificate."""
    cert = certificate(delta, C, lam)
    rng = np.random.default_rng(seed)
    dims = rng.integers(sizes[0], sizes[1] + 1, size=count)
    seeds = rng.integers(0, 2**63 - 1, size=count)
    violations, margin = 0, math.inf
    for i in range(count):
        D = random_conforming_matrix(delta, C, lam, int(dims[i]), int(seeds[i]), complex_entries=bool(i % 2))
        if not certified_sigma_min_check(D, cert):
            violations += 1
        margin = min(margin, smallest_singular_value(D) - cert.epsilon)
    return {"certificate": cert.to_dict(), "count": count, "violations": violations, "min_margin": margin,
            "seed": seed}


def cmd_dominance(cfg: RunConfig) -> int:
    count = cfg.count or 200
    summary = dominance_campaign(cfg.delta, cfg.C, cfg.lam, count, cfg.seed)
    payload = {"command": "dominance-test", **summary}
    if _outdir(cfg):
        _emit(cfg, payload, "dominance.json")
    sys.stdout.write(f"violations: {summary['violations']}\n")
    return EXIT_OK


HANDLERS = {"certify": cmd_certify, "bounds": cmd_bounds, "sweep": cmd_sweep, "irregular": cmd_irregular,
            "demo": cmd_demo, "dominance-test": cmd_dominance}


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = load_config(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
    except (ValueError, CertificateError, HypothesisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def config_dict(cfg: RunConfig) -> dict:
    return asdict(cfg)


if __name__ == "__main__":
    sys.exit(main())
