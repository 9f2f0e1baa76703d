"""JSON and CSV emission with deterministic number formatting.

Floats are rounded to 15 significant digits, infinities become the
strings ``"inf"``/``"-inf"``, complex numbers become ``{"re", "im"}``
objects and fractions become ``"p/q"`` strings.  Keys are sorted, so the
same inputs always give byte-identical output.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = "quadwalks-report/1"
DIGITS = 15


def fmt_float(v: float):
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.{DIGITS}g}")


def jsonable(obj):
    """Recursively convert results into plain JSON values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        if math.isinf(abs(c)):
            return "inf"
        return {"re": fmt_float(c.real), "im": fmt_float(c.imag)}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    return str(obj)


def dumps(payload: dict) -> str:
    """Serialize a report, adding the schema version."""
    body = {"schema": SCHEMA_VERSION, **payload}
    return json.dumps(jsonable(body), sort_keys=True, indent=2) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        f = fmt_float(v)
        return f if isinstance(f, str) else f"{f:.{DIGITS}g}"
    return v
