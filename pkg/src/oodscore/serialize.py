"""Deterministic JSON/NDJSON serialization.

Outputs must be byte-identical across runs, platforms, and thread counts, so
floats are always written with 17 significant digits (enough to round-trip
any float64 exactly) and dict key order is preserved as constructed.
"""

import math
from typing import Any

from .errors import NonFinite


def format_float(x: float) -> str:
    """Render a float with 17 significant digits, always re-parsable as float."""
    if not math.isfinite(x):
        raise NonFinite(f"cannot serialize non-finite value {x!r}")
    s = format(float(x), ".17g")
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def dumps(obj: Any) -> str:
    """Serialize to compact JSON with deterministic float formatting."""
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def dump_ndjson(objs, path) -> None:
    """Write one compact JSON object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for obj in objs:
            fh.write(dumps(obj))
            fh.write("\n")


def _write(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(_quote(obj))
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format_float(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be strings, got {type(k).__name__}")
            if i:
                parts.append(",")
            parts.append(_quote(k))
            parts.append(":")
            _write(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, v in enumerate(obj):
            if i:
                parts.append(",")
            _write(v, parts)
        parts.append("]")
    else:
        # numpy scalars and similar duck-typed numbers
        item = getattr(obj, "item", None)
        if item is not None:
            _write(item(), parts)
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")


_ESCAPES = {
    '"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t",
    "\b": "\\b", "\f": "\\f",
}


def _quote(s: str) -> str:
    out = ['"']
    for ch in s:
        esc = _ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
