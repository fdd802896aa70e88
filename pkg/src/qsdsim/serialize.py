"""Deterministic JSON / CSV encoding of report payloads.

Floats are rounded to 10 significant digits before encoding so that two
runs of the same computation serialize byte-identically; complex numbers
become [re, im] pairs.  Keys are sorted and a trailing newline is always
emitted.
"""

from __future__ import annotations

import io
import json

import numpy as np

SIGNIFICANT_DIGITS = 10


def round_sig(x: float) -> float:
    """Round to SIGNIFICANT_DIGITS significant digits (exact for 0/inf/nan)."""
    x = float(x)
    if x == 0.0 or not np.isfinite(x):
        return x
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [round_sig(z.real), round_sig(z.imag)]


def parse_complex(text: str) -> complex:
    """Parse 're,im' (a bare 're' means a real value)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse complex number from {text!r}")


def parse_polar(text: str) -> complex:
    """Parse 'magnitude,phase-radians' into a complex number."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        mag, phase = float(parts[0]), float(parts[1])
        return complex(mag * np.cos(phase), mag * np.sin(phase))
    raise ValueError(f"cannot parse polar pair from {text!r}")


def jsonify(obj):
    """Recursively convert to plain JSON types with rounded floats."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0.0:
            return round_sig(z.real)
        return complex_pair(z)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload: dict) -> str:
    return json.dumps(jsonify(payload), indent=2, sort_keys=True) + "\n"


def table_csv(table, header: tuple[str, str, str] = ("k", "j", "p")) -> str:
    """Flatten a p(j|k) matrix to 'k,j,p' rows with 1-based indices."""
    table = np.asarray(table, dtype=float)
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for k, row in enumerate(table, start=1):
        for j, p in enumerate(row, start=1):
            out.write(f"{k},{j},{round_sig(float(p)):.10g}\n")
    return out.getvalue()
