"""Verification records, JSON encoding and per-check random streams."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class VerificationReport:
    name: str
    statement: str
    params: dict[str, Any]
    residual: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name: str, statement: str, params: dict[str, Any],
                      residual: float, tolerance: float, **details: Any) -> "VerificationReport":
        residual = float(residual)
        ok = math.isfinite(residual) and residual <= tolerance
        return cls(name, statement, params, residual, tolerance, ok, details=details)

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out = {
            "name": self.name,
            "statement": self.statement,
            "params": encode(self.params),
            "residual": encode(self.residual),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "details": encode(self.details),
        }
        if include_timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: residual={self.residual:.3e} tol={self.tolerance:.1e}"


def encode(obj: Any) -> Any:
    """Convert numpy/complex values into JSON-ready structures; complex -> [re, im]."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_finite(obj.real), _finite(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _finite(obj)
    return obj


def _finite(x: Any) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def decode_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def reports_to_json(reports: Iterable[VerificationReport], config: dict[str, Any] | None = None,
                    include_timing: bool = False) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "config": encode(config or {}),
        "records": [r.to_dict(include_timing) for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Random stream that depends only on (seed, check name)."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *words]))
