"""Integer-backed high-precision brackets for exp, sin, cbrt and atanh.

Every routine returns a pair ``(lo, hi)`` of exact Dyadic values with
``lo <= f(x) <= hi``. Internal sums are fixed point: an integer ``n``
stands for ``n / 2**w``. Each truncating step is charged one unit, and
series tails are bounded explicitly, so the brackets are rigorous.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .dyadic import Dyadic


def _series(u: int, w: int, step, weight=None, alternate: bool = False) -> tuple[int, int]:
    """Fixed-point sum of ``sum_n (-1)^[alternate*n] t_n / weight(n)``.

    ``t_0 = 1`` and ``t_n = t_{n-1} * u / step(n)`` with ``0 <= u <= 2**w``.
    Requires ``u / step(n) <= 1/2`` once terms vanish so the tail is
    geometric. Returns ``(s, err)`` with the exact sum in ``[s-err, s+err]``.
    """
    one = 1 << w
    t = one
    s = one if weight is None else one // weight(0)
    n = 0
    err = 0 if weight is None else 1
    while t:
        n += 1
        t = (t * u) // (step(n) << w)
        term = t if weight is None else t // weight(n)
        # error in t_n is at most n units; the weight division adds one more
        err += n + (weight is not None)
        if alternate and n & 1:
            s -= term
        else:
            s += term
    # tail bounded by twice the first vanished term's true size
    err += 2 * (n + 2)
    return s, err


@lru_cache(maxsize=64)
def ln2_fixed(w: int) -> tuple[int, int]:
    """Bracket of ``ln(2) * 2**w`` as 2*atanh(1/3)."""
    s = 0
    power = (1 << w) // 3
    n = 0
    while power:
        s += power // (2 * n + 1)
        power //= 9
        n += 1
    # every term truncated downward by < 1 unit, tail < 1 unit
    return 2 * s, 2 * (s + n + 1)


@lru_cache(maxsize=64)
def _atan_inv_fixed(k: int, w: int) -> tuple[int, int]:
    s = 0
    power = (1 << w) // k
    k2 = k * k
    n = 0
    while power:
        term = power // (2 * n + 1)
        s += -term if n & 1 else term
        power //= k2
        n += 1
    return s - n - 1, s + n + 1


@lru_cache(maxsize=64)
def pi_fixed(w: int) -> tuple[int, int]:
    """Bracket of ``pi * 2**w`` from Machin's formula."""
    a_lo, a_hi = _atan_inv_fixed(5, w)
    b_lo, b_hi = _atan_inv_fixed(239, w)
    return 16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo


def _fixed_bracket(x: Dyadic, w: int) -> tuple[int, int]:
    return x.floor_fixed(w), x.ceil_fixed(w)


# exp ----------------------------------------------------------------------

def _exp_small(r: Dyadic, w: int) -> tuple[Dyadic, Dyadic]:
    """exp(r) for |r| <= 1/2 as 1 + r*E(r), E(r) = sum r^n/(n+1)! increasing."""
    if r.m == 0:
        one = Dyadic(1)
        return one, one
    lo_f, hi_f = _fixed_bracket(r, w)

    def e_bounds(fixed: int, upper: bool) -> int:
        s, err = _series(abs(fixed), w, lambda n: n + 1, alternate=fixed < 0)
        return s + err if upper else s - err

    e_lo = e_bounds(lo_f, upper=False)
    e_hi = e_bounds(hi_f, upper=True)
    one = Dyadic(1)
    a = one + r * Dyadic.from_fixed(e_lo, w)
    b = one + r * Dyadic.from_fixed(e_hi, w)
    return (a, b) if r.m > 0 else (b, a)


def exp_bracket(x: float, q: int) -> tuple[Dyadic, Dyadic]:
    if x == 0:
        one = Dyadic(1)
        return one, one
    if abs(x) > 800:
        # far outside either format's range: powers of two around x*log2(e)
        if x > 0:
            return Dyadic(1, math.floor(x) * 14426 // 10000), Dyadic(1, math.ceil(x) * 14427 // 10000 + 1)
        return Dyadic(1, math.floor(x) * 14427 // 10000 - 1), Dyadic(1, math.ceil(x) * 14426 // 10000 + 1)
    w = q + 64
    xd = Dyadic.from_float(x)
    if abs(x) <= 0.34:
        return _exp_small(xd, w)
    k = round(x / math.log(2))
    l_lo, l_hi = ln2_fixed(w)
    if k > 0:
        r_lo = xd - Dyadic.from_fixed(k * l_hi, w)
        r_hi = xd - Dyadic.from_fixed(k * l_lo, w)
    else:
        r_lo = xd - Dyadic.from_fixed(k * l_lo, w)
        r_hi = xd - Dyadic.from_fixed(k * l_hi, w)
    lo, _ = _exp_small(r_lo, w)
    _, hi = _exp_small(r_hi, w)
    return lo.scale(k), hi.scale(k)


# sin ----------------------------------------------------------------------

def _sin_small(r: Dyadic, w: int) -> tuple[Dyadic, Dyadic]:
    """sin(r) for |r| <= 1 as r*S(r^2); S decreasing in r^2."""
    if r.m == 0:
        return r, r
    u_lo, u_hi = _fixed_bracket(r * r, w)
    step = lambda n: (2 * n) * (2 * n + 1)  # noqa: E731
    s1, e1 = _series(u_hi, w, step, alternate=True)
    s2, e2 = _series(u_lo, w, step, alternate=True)
    s_lo = Dyadic.from_fixed(s1 - e1, w)
    s_hi = Dyadic.from_fixed(s2 + e2, w)
    a, b = r * s_lo, r * s_hi
    return (a, b) if r.m > 0 else (b, a)


def _cos_of_square(u: Dyadic, w: int, upper: bool) -> Dyadic:
    fixed = u.floor_fixed(w) if upper else u.ceil_fixed(w)
    s, err = _series(fixed, w, lambda n: (2 * n - 1) * (2 * n), alternate=True)
    return Dyadic.from_fixed(s + err if upper else s - err, w)


def _cos_small(r_lo: Dyadic, r_hi: Dyadic, w: int) -> tuple[Dyadic, Dyadic]:
    """Bracket of cos over [r_lo, r_hi] with |r| <= 1; cos decreases in |r|."""
    if r_lo.m >= 0:
        near, far = r_lo, r_hi
    elif r_hi.m <= 0:
        near, far = r_hi, r_lo
    else:
        near, far = Dyadic(0), max(-r_lo, r_hi)
    return _cos_of_square(far * far, w, upper=False), _cos_of_square(near * near, w, upper=True)


def two_over_pi_fixed(w: int) -> tuple[int, int]:
    """Bracket of ``(2/pi) * 2**w``."""
    p_lo, p_hi = pi_fixed(w + 4)
    top = 1 << (2 * w + 5)
    return top // p_hi, -((-top) // p_lo)


def reduction_bits(x: float, q: int, guard: int) -> int:
    """Fixed-point width for reducing ``x`` modulo pi/2 at precision ``q``."""
    _, ex = math.frexp(x)
    return q + guard + max(ex, 0) + 8


def quarter_turns(x: float, w: int) -> tuple[Dyadic, Dyadic]:
    """Bracket of ``x * 2/pi``."""
    xd = Dyadic.from_float(x)
    t_lo, t_hi = two_over_pi_fixed(w)
    a = xd * Dyadic.from_fixed(t_lo, w)
    b = xd * Dyadic.from_fixed(t_hi, w)
    return (a, b) if x >= 0 else (b, a)


def _reduce(xd: Dyadic, k: int, w: int) -> tuple[Dyadic, Dyadic]:
    """Bracket of ``x - k*pi/2``."""
    p_lo, p_hi = pi_fixed(w)
    a = xd - Dyadic.from_fixed(k * p_hi, w + 1)
    b = xd - Dyadic.from_fixed(k * p_lo, w + 1)
    return (a, b) if k >= 0 else (b, a)


def _tiny_boost(x: float) -> int:
    return 2 * max(0, -math.frexp(x)[1])


def sin_bracket(x: float, q: int, guard: int = 32) -> tuple[Dyadic, Dyadic]:
    if x == 0:
        z = Dyadic(0)
        return z, z
    xd = Dyadic.from_float(x)
    w = q + 64
    if abs(x) <= 0.78:
        # sin(x) sits about x**3/6 below x: tiny x needs ~2*|log2 x| more bits
        return _sin_small(xd, w + _tiny_boost(x))
    wr = reduction_bits(x, q, guard)
    t_lo, _ = quarter_turns(x, wr)
    # nearest quarter turn, so |r| stays close to pi/4 at most
    k = (t_lo + Dyadic(1, -1)).floor_fixed(0)
    r_lo, r_hi = _reduce(xd, k, wr)
    quadrant = k % 4
    if quadrant in (0, 2):
        lo, hi = _sin_small(r_lo, w)[0], _sin_small(r_hi, w)[1]
    else:
        lo, hi = _cos_small(r_lo, r_hi, w)
    if quadrant in (2, 3):
        lo, hi = -hi, -lo
    return lo, hi


# cbrt ---------------------------------------------------------------------

def icbrt(n: int) -> int:
    """floor(n ** (1/3)) for n >= 0."""
    if n < 2:
        return n
    y = 1 << -(-n.bit_length() // 3)
    while True:
        z = (2 * y + n // (y * y)) // 3
        if z >= y:
            break
        y = z
    while y * y * y > n:
        y -= 1
    while (y + 1) ** 3 <= n:
        y += 1
    return y


def cbrt_bracket(x: float, q: int) -> tuple[Dyadic, Dyadic]:
    if x == 0:
        z = Dyadic(0)
        return z, z
    if x < 0:
        lo, hi = cbrt_bracket(-x, q)
        return -hi, -lo
    xd = Dyadic.from_float(x)
    m, e = xd.m, xd.e
    f = max(-(-(3 * (q + 2) - e - m.bit_length()) // 3), -(-(-e) // 3))
    big = m << (e + 3 * f)
    y = icbrt(big)
    if y * y * y == big:
        d = Dyadic(y, -f)
        return d, d
    return Dyadic(y, -f), Dyadic(y + 1, -f)


# atanh --------------------------------------------------------------------

def _atanh_small(x: Dyadic, w: int) -> tuple[Dyadic, Dyadic]:
    """atanh(x) for |x| <= 1/2 as x*A(x^2), A(u) = sum u^n/(2n+1) increasing."""
    if x.m == 0:
        return x, x
    u_lo, u_hi = _fixed_bracket(x * x, w)
    one = lambda n: 1  # noqa: E731
    odd = lambda n: 2 * n + 1  # noqa: E731
    s1, e1 = _series(u_lo, w, one, weight=odd)
    s2, e2 = _series(u_hi, w, one, weight=odd)
    a = x * Dyadic.from_fixed(s1 - e1, w)
    b = x * Dyadic.from_fixed(s2 + e2, w)
    return (a, b) if x.m > 0 else (b, a)


def _log_ratio_fixed(num: int, den: int, w: int) -> tuple[int, int]:
    """Bracket of ``ln(num/den) * 2**w`` for positive integers."""
    k = num.bit_length() - den.bit_length()
    # u = num / (den * 2**k) lies in (1/2, 2); pull it into [3/4, 3/2)
    if k >= 0:
        a, b = num, den << k
    else:
        a, b = num << -k, den
    if 4 * a < 3 * b:
        k -= 1
        a <<= 1
    elif 2 * a >= 3 * b:
        k += 1
        b <<= 1
    # ln(u) = 2*atanh(s), s = (a-b)/(a+b), |s| <= 1/5
    s_num, s_den = a - b, a + b
    s_lo = Dyadic.from_fixed((s_num << w) // s_den, w)
    s_hi = Dyadic.from_fixed(-((-s_num << w) // s_den), w)
    t_lo = _atanh_small(s_lo, w)[0].floor_fixed(w)
    t_hi = _atanh_small(s_hi, w)[1].ceil_fixed(w)
    l_lo, l_hi = ln2_fixed(w)
    if k >= 0:
        return k * l_lo + 2 * t_lo, k * l_hi + 2 * t_hi
    return k * l_hi + 2 * t_lo, k * l_lo + 2 * t_hi


def atanh_bracket(x: float, q: int) -> tuple[Dyadic, Dyadic]:
    """Bracket atanh(x) for -1 < x < 1."""
    if x < 0:
        lo, hi = atanh_bracket(-x, q)
        return -hi, -lo
    xd = Dyadic.from_float(x)
    w = q + 64
    if x <= 0.5:
        return _atanh_small(xd, w + _tiny_boost(x))
    # atanh(x) = ln((1+x)/(1-x)) / 2 with x = m*2^e exactly
    scale = 1 << -xd.e
    lo, hi = _log_ratio_fixed(scale + xd.m, scale - xd.m, w)
    return Dyadic.from_fixed(lo, w + 1), Dyadic.from_fixed(hi, w + 1)
