"""Exact binary rationals ``m * 2**e`` with unbounded integer parts."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


@total_ordering
class Dyadic:
    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int = 0):
        if m == 0:
            e = 0
        else:
            tz = (m & -m).bit_length() - 1
            if tz:
                m >>= tz
                e += tz
        self.m = m
        self.e = e

    @classmethod
    def from_float(cls, x: float) -> Dyadic:
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x!r} to Dyadic")
        num, den = x.as_integer_ratio()
        return cls(num, 1 - den.bit_length())

    @classmethod
    def from_fixed(cls, n: int, w: int) -> Dyadic:
        """The value ``n / 2**w``."""
        return cls(n, -w)

    def floor_fixed(self, w: int) -> int:
        """``floor(self * 2**w)``."""
        s = self.e + w
        return self.m << s if s >= 0 else self.m >> -s

    def ceil_fixed(self, w: int) -> int:
        return -((-self).floor_fixed(w))

    def to_fraction(self) -> Fraction:
        if self.e >= 0:
            return Fraction(self.m << self.e)
        return Fraction(self.m, 1 << -self.e)

    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.m, self.e)

    def __abs__(self) -> Dyadic:
        return Dyadic(abs(self.m), self.e)

    def __add__(self, other: Dyadic) -> Dyadic:
        if isinstance(other, int):
            other = Dyadic(other)
        if self.m == 0:
            return other
        if other.m == 0:
            return self
        e = min(self.e, other.e)
        return Dyadic((self.m << (self.e - e)) + (other.m << (other.e - e)), e)

    __radd__ = __add__

    def __sub__(self, other: Dyadic) -> Dyadic:
        if isinstance(other, int):
            other = Dyadic(other)
        return self + (-other)

    def __rsub__(self, other: int) -> Dyadic:
        return Dyadic(other) - self

    def __mul__(self, other: Dyadic | int) -> Dyadic:
        if isinstance(other, int):
            return Dyadic(self.m * other, self.e)
        return Dyadic(self.m * other.m, self.e + other.e)

    __rmul__ = __mul__

    def scale(self, k: int) -> Dyadic:
        """``self * 2**k``."""
        return Dyadic(self.m, self.e + k)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float)):
            if isinstance(other, float) and not math.isfinite(other):
                return False
            other = Dyadic.from_float(float(other)) if isinstance(other, float) else Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.m == other.m and self.e == other.e

    def __lt__(self, other) -> bool:
        if isinstance(other, float):
            if math.isinf(other):
                return other > 0
            other = Dyadic.from_float(other)
        elif isinstance(other, int):
            other = Dyadic(other)
        return (self - other).m < 0

    def __hash__(self) -> int:
        return hash((self.m, self.e))

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({self.m}, {self.e})"
