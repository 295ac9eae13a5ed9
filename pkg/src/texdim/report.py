"""Report envelopes and their canonical JSON / CSV encodings."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from texdim import __version__

if hasattr(sys, "set_int_max_str_digits"):
    # exact binomial counts run to thousands of digits
    sys.set_int_max_str_digits(0)


def to_plain(obj):
    """Recursively convert dataclasses, numpy values and Fractions to JSON-ready data."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if f.name == "per_point" and value is None:
                continue
            out[f.name] = to_plain(value)
        for name in ("agrees", "formatted"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_plain(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = f"{obj:.17g}"
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Key-sorted JSON with floats at 17 significant digits; non-finite -> null."""
    return _encode(to_plain(obj))


def _nonfinite_paths(obj, prefix=""):
    if isinstance(obj, float) and not math.isfinite(obj):
        yield prefix or "$"
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from _nonfinite_paths(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _nonfinite_paths(v, f"{prefix}[{i}]")


def envelope(command: str, config: dict, results, flags=()) -> dict:
    plain = to_plain(results)
    all_flags = list(flags) + [f"nonfinite:{p}" for p in _nonfinite_paths(plain)]
    return {
        "tool": "texdim",
        "version": __version__,
        "command": command,
        "config": to_plain(config),
        "results": plain,
        "flags": all_flags,
    }


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    if v is None:
        return ""
    return str(v)


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    rows = [to_plain(r) for r in rows]
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()
