"""Neighbours in a format, outward widening, and directed rounding."""

from __future__ import annotations

import enum
import math
import struct
from fractions import Fraction

from .dyadic import Dyadic
from .formats import BINARY64, Format, get_format
from .interval import Interval


class Direction(enum.Enum):
    DOWN = "down"
    UP = "up"

    def __neg__(self) -> Direction:
        return Direction.UP if self is Direction.DOWN else Direction.DOWN


DOWN = Direction.DOWN
UP = Direction.UP

_CODECS = {32: ("<f", "<I", 0x7FFFFFFF, 0x80000000), 64: ("<d", "<Q", 0x7FFFFFFFFFFFFFFF, 1 << 63)}


def _to_key(x: float, fmt: Format) -> int:
    # sign-magnitude encoding mapped onto a monotone signed integer line; +-0 -> 0
    ffmt, ifmt, mag, sign = _CODECS[fmt.width]
    try:
        bits = struct.unpack(ifmt, struct.pack(ffmt, x))[0]
    except OverflowError:
        raise ValueError(f"{x!r} is not a {fmt} value") from None
    if fmt.width == 32 and struct.unpack("<f", struct.pack("<I", bits))[0] != x:
        raise ValueError(f"{x!r} is not a {fmt} value")
    return -(bits & mag) if bits & sign else bits


def _from_key(k: int, fmt: Format) -> float:
    ffmt, ifmt, _, sign = _CODECS[fmt.width]
    bits = k if k >= 0 else sign | -k
    return struct.unpack(ffmt, struct.pack(ifmt, bits))[0]


def next_up(x: float, fmt: Format | str = BINARY64) -> float:
    """Least member of ``fmt`` strictly greater than ``x``; +inf is a fixed point."""
    fmt = get_format(fmt)
    if math.isnan(x):
        raise ValueError("next_up of NaN")
    if x == math.inf:
        return x
    return _from_key(_to_key(x, fmt) + 1, fmt)


def next_down(x: float, fmt: Format | str = BINARY64) -> float:
    if math.isnan(x):
        raise ValueError("next_down of NaN")
    return -next_up(-x, fmt)


def next_out(x: Interval) -> Interval:
    if x.is_empty:
        return x
    return Interval(next_down(x.inf, x.fmt), next_up(x.sup, x.fmt), x.fmt)


def ordered_key(x: float, fmt: Format | str = BINARY64) -> int:
    """Position of ``x`` on the integer line of ``fmt`` values (0 for +-0)."""
    return _to_key(x, get_format(fmt))


def from_ordered_key(k: int, fmt: Format | str = BINARY64) -> float:
    return _from_key(k, get_format(fmt))


def _floor_log2(num: int, den: int) -> int:
    t = num.bit_length() - den.bit_length()
    if (t >= 0 and num < den << t) or (t < 0 and num << -t < den):
        t -= 1
    return t


def _round_scaled(num: int, den: int, e: int, fmt: Format, direction: Direction) -> float:
    """Round ``(num / den) * 2**e`` (den > 0) into ``fmt`` toward ``direction``."""
    if num == 0:
        return 0.0
    negative = num < 0
    num = -num if negative else num
    # rounding the magnitude away from zero?
    away = (direction is UP) != negative
    p = fmt.precision
    top = e + _floor_log2(num, den)
    if top > fmt.emax:
        mag = math.inf if away else fmt.max_finite
        return -mag if negative else mag
    if top < fmt.emin - p - 1:
        n, inexact, qe = 0, True, fmt.emin - p + 1
    else:
        qe = max(top, fmt.emin) - p + 1
        s = e - qe
        if s >= 0:
            n, r = divmod(num << s, den)
        else:
            n, r = divmod(num, den << -s)
        inexact = r != 0
    if inexact and away:
        n += 1
    if n and n.bit_length() + qe - 1 > fmt.emax:
        mag = math.inf
    else:
        mag = math.ldexp(n, qe)
    return -mag if negative else mag


def round_to_format(v, fmt: Format | str, direction: Direction) -> float:
    """Greatest ``fmt`` value <= v (DOWN) or least ``fmt`` value >= v (UP).

    ``v`` may be a Dyadic, Fraction, int or float (including infinities).
    Overflow saturates to +-inf on the outward side and +-max_finite on the
    other; results never flush subnormals to zero.
    """
    fmt = get_format(fmt)
    if isinstance(v, Dyadic):
        return _round_scaled(v.m, 1, v.e, fmt, direction)
    if isinstance(v, float):
        if math.isnan(v):
            raise ValueError("cannot round NaN")
        if math.isinf(v):
            return v
        if fmt.width == 64:
            return v
        num, den = v.as_integer_ratio()
        return _round_scaled(num, den, 0, fmt, direction)
    if isinstance(v, int):
        return _round_scaled(v, 1, 0, fmt, direction)
    if isinstance(v, Fraction):
        return _round_scaled(v.numerator, v.denominator, 0, fmt, direction)
    raise TypeError(f"cannot round {type(v).__name__}")
