"""JSON schemas and CSV headers for everything the command line writes."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

_NUM_OR_NULL = {"type": ["number", "null"]}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["delta", "C", "lam", "n0", "kappa", "q_val", "epsilon"],
    "properties": {
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "C": {"type": "number", "exclusiveMinimum": 0},
        "lam": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "n0": {"type": "integer", "minimum": 1},
        "kappa": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "q_val": {"type": "number", "exclusiveMaximum": 1},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "window", "grid", "report"],
    "properties": {
        "command": {"enum": ["certify", "irregular"]},
        "window": {"type": "object", "required": ["kind"]},
        "grid": {"type": "object", "required": ["variant", "alpha", "beta"]},
        "analyzed": {"type": "object"},
        "validation": {"type": "object"},
        "report": {
            "type": "object",
            "required": ["verdict", "reason", "certified_epsilon", "certified_A",
                         "empirical_A", "empirical_B", "certificate", "diagnostics"],
            "properties": {
                "verdict": {"enum": ["Frame", "NotFrame", "Unsupported"]},
                "reason": {"enum": ["product_rule", "support_rule", "boundary_rule", "certified",
                                    "criterion", "hypothesis_violation"]},
                "certified_epsilon": _NUM_OR_NULL,
                "certified_A": _NUM_OR_NULL,
                "empirical_A": _NUM_OR_NULL,
                "empirical_B": _NUM_OR_NULL,
                "certificate": {"oneOf": [{"type": "null"}, CERTIFICATE_SCHEMA]},
                "diagnostics": {"type": "object"},
            },
        },
    },
}

BOUNDS_SCHEMA = {
    "type": "object",
    "required": ["command", "window", "grid", "empirical_A", "empirical_B", "x_grid_size", "truncation"],
    "properties": {
        "command": {"const": "bounds"},
        "empirical_A": {"type": "number", "minimum": 0},
        "empirical_B": {"type": "number", "minimum": 0},
        "x_grid_size": {"type": "integer", "minimum": 1},
        "truncation": {"type": "integer", "minimum": 1},
    },
}

DOMINANCE_SCHEMA = {
    "type": "object",
    "required": ["command", "certificate", "count", "violations", "min_margin", "seed"],
    "properties": {
        "command": {"const": "dominance-test"},
        "certificate": CERTIFICATE_SCHEMA,
        "count": {"type": "integer", "minimum": 1},
        "violations": {"type": "integer", "minimum": 0},
        "min_margin": {"type": "number"},
        "seed": {"type": "integer"},
    },
}

DEMO_SCHEMA = {
    "type": "object",
    "required": ["command", "demo", "window"],
    "properties": {
        "command": {"const": "demo"},
        "demo": {"enum": ["incompleteness", "boundary"]},
        "interval": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "residual": {"type": "number", "minimum": 0},
        "eps": {"type": "array", "items": {"type": "number"}},
        "ratios": {"type": "array", "items": {"type": "number"}},
        "strictly_decreasing": {"type": "boolean"},
    },
}

SCHEMAS = {
    "certify": REPORT_SCHEMA,
    "irregular": REPORT_SCHEMA,
    "bounds": BOUNDS_SCHEMA,
    "dominance-test": DOMINANCE_SCHEMA,
    "demo": DEMO_SCHEMA,
}

SWEEP_HEADER = ["alpha", "beta", "verdict", "certified_A", "empirical_A", "empirical_B"]
FIBER_HEADER = ["x", "sigma_min", "sigma_max"]
DEMO_HEADER = ["eps", "R"]
POINTS_HEADER = ["lambda"]


def plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(payload) -> str:
    return json.dumps(plain(payload), indent=2, sort_keys=True) + "\n"


def write_json(payload, path: str | Path) -> None:
    Path(path).write_text(dumps(payload))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(header: list[str], rows, target) -> None:
    """Write ``header`` and ``rows`` to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(target, header, rows)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
