import math
import struct
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivconform.dyadic import Dyadic
from ivconform.formats import BINARY32, BINARY64
from ivconform.interval import INF, Interval, empty, entire, make
from ivconform.rounding import (
    DOWN,
    UP,
    from_ordered_key,
    next_down,
    next_out,
    next_up,
    ordered_key,
    round_to_format,
)

finite64 = st.floats(allow_nan=False, allow_infinity=False)
finite32 = st.floats(allow_nan=False, allow_infinity=False, width=32)


def test_next_up_examples():
    assert next_up(INF) == INF
    assert next_up(0.0) == float.fromhex("0x0.0000000000001p-1022")
    assert next_up(1.0) == float.fromhex("0x1.0000000000001p+0")
    assert next_up(BINARY64.max_finite) == INF
    assert next_up(-INF) == -BINARY64.max_finite
    assert next_up(-BINARY64.min_subnormal) == 0.0


def test_next_down_examples():
    assert next_down(-INF) == -INF
    assert next_down(0.0) == -float.fromhex("0x0.0000000000001p-1022")
    assert next_down(-1.0) == -(1 + 2.0**-52)


def test_binary32_neighbours():
    assert next_up(1.0, BINARY32) == 1 + 2.0**-23
    assert next_up(0.0, BINARY32) == 2.0**-149
    assert next_up(BINARY32.max_finite, BINARY32) == INF
    with pytest.raises(ValueError):
        next_up(0.1, BINARY32)


def test_next_up_rejects_nan():
    with pytest.raises(ValueError):
        next_up(math.nan)


def test_next_out_examples():
    assert next_out(empty()) == empty()
    assert next_out(entire()) == entire()
    tiny = 4.9406564584124654e-324
    assert next_out(make(0.0, 0.0)) == make(-tiny, tiny)


@given(finite64)
def test_next_up_matches_nextafter(x):
    assert next_up(x) == math.nextafter(x, INF)


@given(finite64.filter(lambda v: v < BINARY64.max_finite))
def test_involution(x):
    assert next_down(next_up(x)) == x


@given(finite32.filter(lambda v: v < BINARY32.max_finite))
def test_involution_binary32(x):
    assert next_down(next_up(x, BINARY32), BINARY32) == x


@given(finite64, finite64)
def test_next_out_symmetry_and_widening(a, b):
    a, b = sorted((a, b))
    x = make(a, b)
    out = next_out(x)
    assert next_out(-x) == -out
    assert x.subset(out)
    assert out.inf < a and out.sup > b


@given(finite64.filter(lambda v: v > 0 and v < BINARY64.max_finite))
def test_successor_is_the_next_value(x):
    # x plus a sliver rounds down to x and up to next_up(x): nothing lies between
    eps = Fraction(1, 2**1200)
    v = Fraction(x) + eps
    assert round_to_format(v, BINARY64, DOWN) == x
    assert round_to_format(v, BINARY64, UP) == next_up(x)


@given(finite64)
def test_ordered_key_roundtrip(x):
    assert from_ordered_key(ordered_key(x)) == x


def test_ordered_key_monotone():
    vals = [-INF, -1.0, -BINARY64.min_subnormal, 0.0, BINARY64.min_subnormal, 1.0, INF]
    keys = [ordered_key(v) for v in vals]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_round_to_format_examples():
    assert round_to_format(Fraction(1, 2), BINARY64, DOWN) == 0.5
    # sqrt(2) to 200 bits
    r = math.isqrt(2 << 400)
    assert round_to_format(Dyadic(r, -200), BINARY64, UP) == float.fromhex("0x1.6a09e667f3bcdp+0")
    assert round_to_format(2**1025, BINARY64, UP) == INF
    assert round_to_format(2**1025, BINARY64, DOWN) == BINARY64.max_finite
    assert round_to_format(-(2**1025), BINARY64, UP) == -BINARY64.max_finite


def test_round_to_format_subnormals():
    tiny = Fraction(1, 2**1100)
    assert round_to_format(tiny, BINARY64, DOWN) == 0.0
    assert round_to_format(tiny, BINARY64, UP) == BINARY64.min_subnormal
    assert round_to_format(-tiny, BINARY64, DOWN) == -BINARY64.min_subnormal
    assert round_to_format(Fraction(3, 2**1075), BINARY64, DOWN) == BINARY64.min_subnormal
    assert round_to_format(Fraction(1, 2**160), BINARY32, UP) == BINARY32.min_subnormal


@given(st.fractions(), st.sampled_from([BINARY32, BINARY64]))
def test_round_brackets_value(v, fmt):
    lo = round_to_format(v, fmt, DOWN)
    hi = round_to_format(v, fmt, UP)
    assert Fraction(lo) <= v <= Fraction(hi)
    representable = Fraction(lo) == v
    assert (lo == hi) == representable
    if not representable:
        assert next_up(lo, fmt) == hi


@settings(max_examples=200)
@given(finite32.filter(lambda v: v < BINARY32.max_finite))
def test_binary32_round_matches_struct(x):
    v = Fraction(x) + Fraction(1, 2**200)
    up = round_to_format(v, BINARY32, UP)
    assert struct.unpack("<f", struct.pack("<f", up))[0] == up
    assert Fraction(up) > v
    assert Fraction(next_down(up, BINARY32)) <= v


def test_interval_is_frozen():
    x = Interval(1.0, 2.0)
    with pytest.raises(AttributeError):
        x.inf = 0.0
