"""JSON rendering with exact rationals next to their decimal values."""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__
from .window import MeasureInterval


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator), "decimal": float(x)}


def interval(m: MeasureInterval) -> dict:
    return {"lo": rational(m.lo), "hi": rational(m.hi)}


def plain(obj):
    """Recursively convert Fractions, intervals, sets and tuples to JSON-ready values."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return {"value": obj, "kind": "float"}
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, MeasureInterval):
        return interval(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(plain(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return plain(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(command: str, config: dict, result) -> dict:
    return {
        "tool": "symwin",
        "version": __version__,
        "command": command,
        "config": plain(config),
        "result": plain(result),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
