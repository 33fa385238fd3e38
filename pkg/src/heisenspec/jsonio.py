"""Deterministic full-precision serialization helpers.

Floats are rendered with 17 significant digits (exact round-trip),
rationals as "p/q" strings, infinities as the string "infinite". Keys are
emitted in sorted order so identical values give identical bytes.
"""

from __future__ import annotations

import math
from fractions import Fraction


def fmt_float(x: float) -> str:
    if math.isinf(x):
        return '"infinite"'
    if math.isnan(x):
        return '"nan"'
    out = format(x, ".17g")
    return out


def fmt_float_plain(x: float) -> str:
    """Float as text for CSV cells."""
    if math.isinf(x):
        return "infinite"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _escape(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )


def dumps(obj, indent: int = 0) -> str:
    """JSON text with full-precision numbers; dict keys sorted."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return str(obj.numerator)
        return f'"{obj.numerator}/{obj.denominator}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{_escape(str(k))}": {dumps(v, indent + 2)}'
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dumps(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
