"""Hex-float text encoding of intervals, shared by pair files and adapters.

Grammar::

    interval := "[empty]" | "[entire]" | "[" endpoint "," endpoint "]"
    endpoint := "-inf" | "inf" | <C99 hex float, e.g. -0x1.8p+1>
"""

from __future__ import annotations

import math
import re

from .formats import Format
from .interval import Interval, InvalidInterval, empty, entire, make


def format_endpoint(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0x0p+0"
    h = float.hex(x)
    mant, exp = h.split("p")
    if "." in mant:
        mant = mant.rstrip("0").rstrip(".")
    return f"{mant}p{exp}"


def format_interval(x: Interval) -> str:
    if x.is_empty:
        return "[empty]"
    if x.is_entire:
        return "[entire]"
    return f"[{format_endpoint(x.inf)},{format_endpoint(x.sup)}]"


_ENDPOINT = re.compile(r"^-?(inf|0x[0-9a-f]+(\.[0-9a-f]*)?p[+-]?\d+)$", re.IGNORECASE)


def parse_endpoint(text: str) -> float:
    text = text.strip()
    if not _ENDPOINT.match(text):
        raise ValueError(f"bad endpoint {text!r}")
    if text.lower().lstrip("-") == "inf":
        return -math.inf if text.startswith("-") else math.inf
    return float.fromhex(text)


def parse_interval(text: str, fmt: Format) -> Interval:
    """Parse one interval token; raises ValueError or InvalidInterval."""
    t = text.strip()
    if t == "[empty]":
        return empty(fmt)
    if t == "[entire]":
        return entire(fmt)
    if not (t.startswith("[") and t.endswith("]")) or t.count(",") != 1:
        raise ValueError(f"bad interval {text!r}")
    lo, hi = t[1:-1].split(",")
    a, b = parse_endpoint(lo), parse_endpoint(hi)
    return make(a, b, fmt)


__all__ = ["format_endpoint", "format_interval", "parse_endpoint", "parse_interval", "InvalidInterval"]
