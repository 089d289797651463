"""Deterministic JSON rendering: sorted keys, reals with 9 fractional digits."""

from __future__ import annotations

import json
import math
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

_Q = Decimal("0.000000001")


def render_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    elif isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            raise ValueError(f"cannot render non-finite number {x!r}")
        d = Decimal(repr(x))
    else:
        d = Decimal(x)
    d = d.quantize(_Q, rounding=ROUND_HALF_EVEN)
    if d == 0:
        d = abs(d)
    return f"{d:f}"


class Int(int):
    """Marks an integer that must render without a fractional part (indices)."""


def dumps(obj, indent: int | None = 2) -> str:
    return _render(obj, indent, 0) + ("\n" if indent is not None else "")


def _render(obj, indent, level) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, Int):
        return str(int(obj))
    if isinstance(obj, (int, float, Fraction, Decimal)):
        return render_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{json.dumps(str(k))}: {_render(obj[k], indent, level + 1)}" for k in sorted(obj, key=str)]
        return _join("{", "}", parts, indent, level)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return _join("[", "]", [_render(v, indent, level + 1) for v in obj], indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _join(open_, close, parts, indent, level) -> str:
    if indent is None:
        return open_ + ", ".join(parts) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + p for p in parts) + "\n" + end + close
