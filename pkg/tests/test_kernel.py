from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from brute import brute
from ivconform import kernel
from ivconform.formats import BINARY32, BINARY64
from ivconform.interval import BASIC_FUNCTIONS, ELEMENTARY_FUNCTIONS, FUNCTIONS, INF, empty, entire, make
from ivconform.rounding import next_up

finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def intervals(draw, elements=finite):
    a, b = sorted((draw(elements), draw(elements)))
    return make(a, b)


nonzero_intervals = intervals().filter(lambda x: x.inf > 0 or x.sup < 0)


def test_sub_example():
    assert kernel.sub(make(1.0, 2.0), make(0.0, 1.0)) == make(0.0, 2.0)


def test_sqrt_cornercase():
    assert kernel.sqrt(make(-1.0, 2.0)) == make(0.0, float.fromhex("0x1.6a09e667f3bcdp+0"))
    assert kernel.sqrt(make(-2.0, -1.0)) == empty()


def test_add_tenths():
    z = kernel.add(make(0.1, 0.1), make(0.2, 0.2))
    exact = Fraction(0.1) + Fraction(0.2)
    assert Fraction(z.inf) <= exact <= Fraction(z.sup)
    assert next_up(z.inf) == z.sup


def test_empty_absorbs():
    assert kernel.mul(empty(), make(1.0, 2.0)) == empty()
    assert kernel.exp(empty()) == empty()
    for f, info in FUNCTIONS.items():
        args = (empty(),) + (make(1.0, 2.0),) * (info.arity - 1)
        assert kernel.evaluate(f, args).is_empty, f


def test_elementary_examples():
    assert kernel.sin(make(0.0, 10.0)) == make(-1.0, 1.0)
    assert kernel.atanh(make(1.0, 2.0)) == empty()
    assert kernel.atanh(make(-2.0, 2.0)) == entire()
    assert kernel.atanh(make(1.0, 1.0)) == empty()
    assert kernel.cbrt(make(-8.0, 27.0)) == make(-2.0, 3.0)
    assert kernel.exp(make(0.0, 0.0)) == make(1.0, 1.0)
    assert kernel.exp(make(-INF, 0.0)) == make(0.0, 1.0)


@pytest.mark.parametrize(
    "x, y, want",
    [
        (make(1.0, 2.0), make(0.0, 0.0), empty()),
        (make(1.0, 2.0), make(0.0, 1.0), make(1.0, INF)),
        (make(1.0, 2.0), make(-1.0, 0.0), make(-INF, -1.0)),
        (make(-2.0, -1.0), make(0.0, 1.0), make(-INF, -1.0)),
        (make(1.0, 2.0), make(-1.0, 1.0), entire()),
        (make(-1.0, 1.0), make(2.0, 4.0), make(-0.5, 0.5)),
        (make(0.0, 0.0), make(-1.0, 1.0), entire()),
    ],
)
def test_div_cases(x, y, want):
    assert kernel.div(x, y) == want


def test_recip_and_sqr():
    assert kernel.recip(make(0.0, 0.0)) == empty()
    assert kernel.recip(make(2.0, 4.0)) == make(0.25, 0.5)
    assert kernel.sqr(make(-2.0, 3.0)) == make(0.0, 9.0)
    assert kernel.sqr(make(-3.0, -2.0)) == make(4.0, 9.0)


def test_overflow_and_underflow():
    m = BINARY64.max_finite
    assert kernel.add(make(m, m), make(m, m)) == make(m, INF)
    tiny = BINARY64.min_subnormal
    assert kernel.mul(make(tiny, tiny), make(0.5, 0.5)) == make(0.0, tiny)
    assert kernel.mul(make(0.0, 0.0), entire()) == make(0.0, 0.0)


def test_binary32_is_native():
    z = kernel.add(make(1.0, 1.0, BINARY32), make(2.0**-30, 2.0**-30, BINARY32))
    assert z == make(1.0, 1 + 2.0**-23, BINARY32)


def test_arity_checked():
    with pytest.raises(ValueError):
        kernel.evaluate("add", (make(1.0, 2.0),))
    with pytest.raises(ValueError):
        kernel.evaluate("add", (make(1.0, 2.0), make(1.0, 2.0, BINARY32)))


@settings(max_examples=300)
@given(intervals(), intervals())
def test_add_sub_mul_match_brute(x, y):
    for op in ("add", "sub", "mul"):
        z = kernel.evaluate(op, (x, y))
        assert (z.inf, z.sup) == brute(op, (x, y)), op


@settings(max_examples=300)
@given(intervals(), nonzero_intervals)
def test_div_matches_brute(x, y):
    z = kernel.div(x, y)
    assert (z.inf, z.sup) == brute("div", (x, y))
    r = kernel.recip(y)
    assert (r.inf, r.sup) == brute("recip", (y,))


@settings(max_examples=300)
@given(intervals(), intervals(), intervals())
def test_sqr_fma_match_brute(x, y, w):
    z = kernel.sqr(x)
    assert (z.inf, z.sup) == brute("sqr", (x,))
    z = kernel.fma(x, y, w)
    assert (z.inf, z.sup) == brute("fma", (x, y, w))


@given(intervals(), intervals())
def test_negation_symmetry(x, y):
    assert kernel.sub(x, y) == -kernel.sub(y, x)


@settings(max_examples=60)
@given(intervals(st.floats(-1e6, 1e6)))
def test_sin_is_odd(x):
    assert kernel.sin(-x) == -kernel.sin(x)


@settings(max_examples=200)
@given(intervals(), intervals(), st.data())
def test_inclusion_monotone(x, y, data):
    # shrink each input to a nested subinterval and compare
    def inner(v):
        a = data.draw(st.floats(v.inf, v.sup))
        b = data.draw(st.floats(a, v.sup))
        return make(a, b)

    xi, yi = inner(x), inner(y)
    for op in ("add", "sub", "mul", "div"):
        assert kernel.evaluate(op, (xi, yi)).subset(kernel.evaluate(op, (x, y))), op


def _real_cbrt(v):
    return mpmath.sign(v) * mpmath.cbrt(abs(v))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ELEMENTARY_FUNCTIONS + ("sqrt", "recip", "sqr")), intervals(st.floats(-50, 50)), st.data())
def test_point_images_enclosed(f, x, data):
    t = data.draw(st.floats(x.inf, x.sup))
    if f == "atanh":
        assume(-1 < t < 1)
    if f == "sqrt":
        assume(t >= 0)
    if f == "recip":
        assume(t != 0)
    z = kernel.evaluate(f, (x,))
    with mpmath.workprec(200):
        ref = {"sin": mpmath.sin, "exp": mpmath.exp, "atanh": mpmath.atanh, "sqrt": mpmath.sqrt,
               "recip": lambda v: 1 / v, "sqr": lambda v: v * v, "cbrt": _real_cbrt}[f](mpmath.mpf(t))
        assert mpmath.mpf(z.inf) <= ref <= mpmath.mpf(z.sup)


def test_modes_declared():
    assert set(kernel.MODES) == set(BASIC_FUNCTIONS) | set(ELEMENTARY_FUNCTIONS)
    assert set(kernel.MODES.values()) == {"tightest"}
