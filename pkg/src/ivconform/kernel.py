"""Interval kernel: tightest basic arithmetic and elementary functions.

Binary64 endpoints are computed with round-to-nearest plus an error-free
transformation of the residual; a nonzero residual on the wrong side moves
the result one step outward. This keeps every operation pure (no rounding
mode state). Where the transformations are not exact (operands or results
near the underflow or overflow thresholds) and for binary32, the endpoint
is rounded directly from its exact rational value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .formats import Format
from .interval import (
    BASIC_FUNCTIONS,
    ELEMENTARY_FUNCTIONS,
    INF,
    Interval,
    empty,
    entire,
    function_info,
)
from .oracle import DEFAULT_CONFIG, OracleConfig, tightest_hull
from .rounding import DOWN, UP, Direction, next_down, next_up, round_to_format

_SPLITTER = 134217729.0  # 2**27 + 1
_TINY = 2.0**-900
_HUGE = 2.0**995

# every operation of the kernel is tightest
MODES = {name: "tightest" for name in (*BASIC_FUNCTIONS, *ELEMENTARY_FUNCTIONS)}


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _safe(*vals: float) -> bool:
    return all(_TINY <= abs(v) <= _HUGE for v in vals)


def _step(v: float, sign: int, direction: Direction, fmt: Format) -> float:
    """Adjust a nearest result ``v`` given the sign of ``exact - v``."""
    if direction is DOWN and sign < 0:
        return next_down(v, fmt)
    if direction is UP and sign > 0:
        return next_up(v, fmt)
    return v


def _exact(v: Fraction, fmt: Format, direction: Direction) -> float:
    return round_to_format(v, fmt, direction)


def _sgn(v: float) -> int:
    return (v > 0) - (v < 0)


def add_rounded(a: float, b: float, fmt: Format, direction: Direction) -> float:
    if math.isinf(a):
        return a
    if math.isinf(b):
        return b
    if fmt.width == 64:
        s, err = _two_sum(a, b)
        if math.isfinite(s):
            return _step(s, _sgn(err), direction, fmt)
    return _exact(Fraction(a) + Fraction(b), fmt, direction)


def mul_rounded(a: float, b: float, fmt: Format, direction: Direction) -> float:
    if a == 0 or b == 0:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return INF if (a > 0) == (b > 0) else -INF
    if fmt.width == 64 and _safe(a, b):
        p, err = _two_prod(a, b)
        if _safe(p):
            return _step(p, _sgn(err), direction, fmt)
    return _exact(Fraction(a) * Fraction(b), fmt, direction)


def div_rounded(a: float, b: float, fmt: Format, direction: Direction) -> float:
    if math.isinf(b):
        return 0.0
    if math.isinf(a):
        return INF if (a > 0) == (b > 0) else -INF
    if a == 0:
        return 0.0
    if fmt.width == 64 and _safe(a, b):
        q = a / b
        if _safe(q):
            p, err = _two_prod(q, b)
            # a - q*b = (a - p) - err, with a - p exact (p is within a factor 2 of a)
            r = a - p
            res = (r > err) - (r < err)
            return _step(q, res * _sgn(b), direction, fmt)
    return _exact(Fraction(a) / Fraction(b), fmt, direction)


def sqrt_rounded(a: float, fmt: Format, direction: Direction) -> float:
    if a == 0 or a == INF:
        return a
    if fmt.width == 64 and _safe(a):
        s = math.sqrt(a)
        p, err = _two_prod(s, s)
        r = a - p
        return _step(s, (r > err) - (r < err), direction, fmt)
    return _sqrt_exact(Fraction(a), fmt, direction)


def _sqrt_exact(v: Fraction, fmt: Format, direction: Direction) -> float:
    num, den = v.numerator, v.denominator
    shift = fmt.precision + 4 + max(0, den.bit_length() - num.bit_length())
    r = math.isqrt((num * den) << (2 * shift))
    s = _exact(Fraction(r, den << shift), fmt, DOWN)
    # settle on the largest format value whose square does not exceed v
    while Fraction(s) ** 2 > v:
        s = next_down(s, fmt)
    while Fraction(next_up(s, fmt)) ** 2 <= v:
        s = next_up(s, fmt)
    if direction is UP and Fraction(s) ** 2 != v:
        s = next_up(s, fmt)
    return s


# interval operations -------------------------------------------------------

def neg(x: Interval) -> Interval:
    return -x


def add(x: Interval, y: Interval) -> Interval:
    if x.is_empty or y.is_empty:
        return empty(x.fmt)
    f = x.fmt
    return Interval(add_rounded(x.inf, y.inf, f, DOWN), add_rounded(x.sup, y.sup, f, UP), f)


def sub(x: Interval, y: Interval) -> Interval:
    return add(x, -y)


def mul(x: Interval, y: Interval) -> Interval:
    if x.is_empty or y.is_empty:
        return empty(x.fmt)
    f = x.fmt
    pairs = [(a, b) for a in (x.inf, x.sup) for b in (y.inf, y.sup)]
    lo = min(mul_rounded(a, b, f, DOWN) for a, b in pairs)
    hi = max(mul_rounded(a, b, f, UP) for a, b in pairs)
    return Interval(lo, hi, f)


def div(x: Interval, y: Interval) -> Interval:
    f = x.fmt
    if x.is_empty or y.is_empty or (y.inf == 0 and y.sup == 0):
        return empty(f)
    xl, xu, yl, yu = x.inf, x.sup, y.inf, y.sup

    def quot(a, b, c, d):
        return Interval(div_rounded(a, b, f, DOWN), div_rounded(c, d, f, UP), f)

    if yl > 0:
        if xl >= 0:
            return quot(xl, yu, xu, yl)
        if xu <= 0:
            return quot(xl, yl, xu, yu)
        return quot(xl, yl, xu, yl)
    if yu < 0:
        if xl >= 0:
            return quot(xu, yu, xl, yl)
        if xu <= 0:
            return quot(xu, yl, xl, yu)
        return quot(xu, yu, xl, yu)
    if xl <= 0 <= xu:
        return entire(f)
    if xl > 0:
        if yu == 0:
            return Interval(-INF, div_rounded(xl, yl, f, UP), f)
        if yl == 0:
            return Interval(div_rounded(xl, yu, f, DOWN), INF, f)
        return entire(f)
    if yu == 0:
        return Interval(div_rounded(xu, yl, f, DOWN), INF, f)
    if yl == 0:
        return Interval(-INF, div_rounded(xu, yu, f, UP), f)
    return entire(f)


def recip(x: Interval) -> Interval:
    return div(Interval(1.0, 1.0, x.fmt), x)


def sqr(x: Interval) -> Interval:
    if x.is_empty:
        return x
    f = x.fmt
    if x.inf >= 0:
        return Interval(mul_rounded(x.inf, x.inf, f, DOWN), mul_rounded(x.sup, x.sup, f, UP), f)
    if x.sup <= 0:
        return Interval(mul_rounded(x.sup, x.sup, f, DOWN), mul_rounded(x.inf, x.inf, f, UP), f)
    return Interval(0.0, max(mul_rounded(x.inf, x.inf, f, UP), mul_rounded(x.sup, x.sup, f, UP)), f)


def sqrt(x: Interval) -> Interval:
    if x.is_empty or x.sup < 0:
        return empty(x.fmt)
    f = x.fmt
    return Interval(sqrt_rounded(max(x.inf, 0.0), f, DOWN), sqrt_rounded(x.sup, f, UP), f)


def _xprod(a: float, b: float):
    if a == 0 or b == 0:
        return Fraction(0)
    if math.isinf(a) or math.isinf(b):
        return INF if (a > 0) == (b > 0) else -INF
    return Fraction(a) * Fraction(b)


def fma(x: Interval, y: Interval, z: Interval) -> Interval:
    """Range of ``a*b + c``; the fused endpoints are rounded once from exact values."""
    f = x.fmt
    if x.is_empty or y.is_empty or z.is_empty:
        return empty(f)
    prods = [_xprod(a, b) for a in (x.inf, x.sup) for b in (y.inf, y.sup)]
    lo, hi = min(prods), max(prods)

    def fused(p, c, direction):
        if isinstance(p, float):
            return p
        if math.isinf(c):
            return c
        return _exact(p + Fraction(c), f, direction)

    return Interval(fused(lo, z.inf, DOWN), fused(hi, z.sup, UP), f)


_BASIC = {
    "neg": neg,
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "recip": recip,
    "sqrt": sqrt,
    "sqr": sqr,
    "fma": fma,
}


def _check_args(op: str, args: Sequence[Interval]) -> None:
    info = function_info(op)
    if len(args) != info.arity:
        raise ValueError(f"{op} takes {info.arity} argument(s), got {len(args)}")
    if len({a.fmt for a in args}) != 1:
        raise ValueError("all arguments must share one format")


def basic_arith(op: str, args: Sequence[Interval]) -> Interval:
    if op not in _BASIC:
        raise ValueError(f"{op!r} is not a basic arithmetic operation")
    _check_args(op, args)
    return _BASIC[op](*args)


def elementary(f: str, x: Interval, cfg: OracleConfig = DEFAULT_CONFIG) -> Interval:
    """cbrt, exp, sin or atanh over ``x``, tightest at the format's precision."""
    if f not in ELEMENTARY_FUNCTIONS:
        raise ValueError(f"{f!r} is not an elementary function")
    return tightest_hull(f, x, cfg)


def cbrt(x: Interval) -> Interval:
    return elementary("cbrt", x)


def exp(x: Interval) -> Interval:
    return elementary("exp", x)


def sin(x: Interval) -> Interval:
    return elementary("sin", x)


def atanh(x: Interval) -> Interval:
    return elementary("atanh", x)


def evaluate(f: str, args) -> Interval:
    """Evaluate any catalogued function; ``args`` is an Interval or a tuple."""
    args = tuple(args) if isinstance(args, (tuple, list)) else (args,)
    if f in _BASIC:
        return basic_arith(f, args)
    _check_args(f, args)
    return elementary(f, args[0])
