"""Text rendering of values and trace events for ``print`` and ``--trace``."""

from __future__ import annotations

import math
from decimal import Decimal

from .runtime import VOID, CharArray, ConceptValue, Reference, TraceEvent

SIGNIFICANT_DIGITS = 12


def format_double(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    # round to 12 significant digits, then print positionally (never 1e+20)
    rounded = Decimal(f"{x:.{SIGNIFICANT_DIGITS - 1}e}")
    text = format(rounded, "f")
    if "." in text:
        text = text.rstrip("0")
        if text.endswith("."):
            text += "0"
    else:
        text += ".0"
    return text


def _segment(concept: str, values) -> str:
    return f"{concept}({','.join(format_value(v) for v in values)})"


def format_value(v) -> str:
    if v is VOID:
        return "void"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_double(v)
    if isinstance(v, str):
        return v
    if isinstance(v, CharArray):
        return v.trimmed
    if isinstance(v, Reference):
        return "<" + ":".join(_segment(s.concept, s.values) for s in v.segments) + ">"
    if isinstance(v, ConceptValue):
        return _segment(v.concept, v.values)
    raise TypeError(f"not a copl value: {v!r}")


def format_trace_event(e: TraceEvent) -> str:
    return f"{e.phase} {e.direction} {e.concept}.{e.member}"
