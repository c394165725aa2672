"""Binary interchange formats used for interval endpoints."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass


@dataclass(frozen=True)
class Format:
    """An IEEE 754 binary interchange format.

    Endpoint values are always held as Python floats; a binary32 value is
    simply a float that happens to be exactly representable in binary32.
    """

    name: str
    precision: int
    emax: int
    width: int

    @property
    def emin(self) -> int:
        return 1 - self.emax

    @property
    def min_subnormal(self) -> float:
        return math.ldexp(1.0, self.emin - self.precision + 1)

    @property
    def min_normal(self) -> float:
        return math.ldexp(1.0, self.emin)

    @property
    def max_finite(self) -> float:
        return math.ldexp(2.0 - math.ldexp(1.0, 1 - self.precision), self.emax)

    def contains(self, x: float) -> bool:
        """True when ``x`` is a member of this format (NaN excluded)."""
        if math.isnan(x):
            return False
        if self.width == 64 or math.isinf(x):
            return True
        try:
            return struct.unpack("<f", struct.pack("<f", x))[0] == x
        except OverflowError:
            return False

    def __str__(self) -> str:
        return self.name


BINARY32 = Format("b32", precision=24, emax=127, width=32)
BINARY64 = Format("b64", precision=53, emax=1023, width=64)

FORMATS = {"b32": BINARY32, "b64": BINARY64, "binary32": BINARY32, "binary64": BINARY64}


def get_format(name: str | Format) -> Format:
    if isinstance(name, Format):
        return name
    try:
        return FORMATS[name]
    except KeyError:
        raise ValueError(f"unknown format {name!r}; expected one of b32, b64") from None
