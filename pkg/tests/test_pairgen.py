import io

import pytest

from ivconform import kernel
from ivconform.conformance import TestingPair
from ivconform.formats import BINARY32, BINARY64
from ivconform.interval import ELEMENTARY_FUNCTIONS, FUNCTIONS, INF, empty, entire, make
from ivconform.oracle import accurate_envelope, tightest_hull
from ivconform.pairgen import (
    ParseError,
    SuiteSpec,
    _pi_multiple,
    arithmetic_next_out,
    arithmetic_next_up,
    dumps_pairs,
    gen_function_suite,
    gen_nextout_suite,
    loads_pairs,
    make_pair,
    read_pairs,
    read_pairs_with_header,
    suite_inputs,
    write_pairs,
)
from ivconform.rounding import next_out, next_up, ordered_key

SIN_RECORD = "sin b64 [0x0p+0,0x1.4p+3] [-0x1p+0,0x1p+0] [-0x1.0000000000001p+0,0x1.0000000000001p+0]"


def test_record_example_parses():
    (pair,) = loads_pairs(SIN_RECORD + "\n")
    assert pair.f == "sin" and pair.x == (make(0.0, 10.0),)
    assert pair.y == make(-1.0, 1.0)
    assert pair.y_prime == make(-(1 + 2.0**-52), 1 + 2.0**-52)


def test_empty_token():
    (pair,) = loads_pairs("sin b64 [empty] [empty] [empty] # nothing in, nothing out\n")
    assert pair.x == (empty(),) and pair.y == empty() and pair.tag == "nothing in, nothing out"
    (pair,) = loads_pairs("exp b32 [entire] [0x0p+0,inf] -\n")
    assert pair.x == (entire(BINARY32),) and pair.y_prime is None


def test_roundtrip_exp_suite(tmp_path):
    pairs = gen_function_suite(SuiteSpec("exp", n_random=100, include_specials=False))
    assert len(pairs) == 100
    path = tmp_path / "exp.pairs"
    write_pairs(pairs, path, {"seed": "0"})
    back, header = read_pairs_with_header(path)
    assert back == pairs
    assert header["count"] == "100" and header["function"] == "exp" and header["version"] == "1"
    assert read_pairs(io.StringIO(path.read_text())) == pairs


def test_roundtrip_binary32_and_ternary():
    pairs = gen_function_suite(SuiteSpec("fma", BINARY32, n_random=20))
    assert loads_pairs(dumps_pairs(pairs)) == pairs


@pytest.mark.parametrize(
    "text, line, reason",
    [
        ("sin b64 [0x0p+0,0x1p+0]\n", 1, "argument"),
        ("# note\nlog b64 [0x1p+0,0x1p+0] [0x0p+0,0x0p+0] -\n", 2, "unknown function"),
        ("sin b16 [0x0p+0,0x1p+0] [0x0p+0,0x1p+0] -\n", 1, "b16"),
        ("sin b64 [0x1p+0,0x0p+0] [0x0p+0,0x1p+0] -\n", 1, ""),
        ("sin b64 [0x0p+0,zzz] [0x0p+0,0x1p+0] -\n", 1, ""),
        ("sin b32 [0x1.000001p+0,0x1.000001p+0] [0x0p+0,0x1p+0] -\n", 1, ""),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, reason):
    with pytest.raises(ParseError) as info:
        loads_pairs(text)
    assert info.value.line == line
    assert reason in str(info.value)


def test_truncated_file_rejected():
    text = dumps_pairs(gen_function_suite(SuiteSpec("exp", n_random=5, include_specials=False)))
    with pytest.raises(ParseError, match="announces 5"):
        loads_pairs("".join(text.splitlines(keepends=True)[:-1]))


def test_generation_is_deterministic():
    spec = SuiteSpec("sin", BINARY32, n_random=30, seed=7)
    assert gen_function_suite(spec) == gen_function_suite(spec)
    other = SuiteSpec("sin", BINARY32, n_random=30, seed=8)
    assert suite_inputs(spec) != suite_inputs(other)


def test_suite_contents():
    pairs = gen_function_suite(SuiteSpec("sin", n_random=100))
    tags = [p.tag for p in pairs]
    assert sum(t.startswith("random ") for t in tags) == 100
    assert any(t.startswith("extremum: ") for t in tags)
    assert sum(t.startswith("symmetry of ") for t in tags) == 10
    for p in pairs:
        assert p.y.subset(p.y_prime)
        assert p.y_prime == next_out(tightest_hull(p.f, next_out(p.x[0])))


def test_pi_half_straddle_is_narrow():
    lo, hi = _pi_multiple(1, 2, BINARY64)
    assert next_up(lo) == hi
    pairs = gen_function_suite(SuiteSpec("sin", n_random=0))
    straddles = [p for p in pairs if p.x[0].inf <= lo and hi <= p.x[0].sup]
    narrow = [p for p in straddles if ordered_key(p.x[0].sup) - ordered_key(p.x[0].inf) <= 10]
    assert narrow and all(p.y.sup == 1.0 for p in narrow)


def test_reference_pairs_present():
    pairs = gen_function_suite(SuiteSpec("exp", n_random=0))
    (p,) = [p for p in pairs if p.x == (make(-1e9, 0.0),)]
    assert p.y == make(0.0, 1.0)
    assert p.y_prime.inf < 0
    sins = gen_function_suite(SuiteSpec("sin", n_random=0))
    assert any(p.x == (make(0.0, 10.0),) for p in sins)


@pytest.mark.parametrize("f", sorted(FUNCTIONS))
def test_random_args_respect_bands(f):
    for p in gen_function_suite(SuiteSpec(f, n_random=40, include_specials=False)):
        assert len(p.x) == FUNCTIONS[f].arity
        for a in p.x:
            assert not a.is_empty and a.fmt is BINARY64
            if f == "atanh":
                assert -1 < a.inf and a.sup < 1


def test_make_pair_accepts_bare_interval():
    p = make_pair("exp", make(0.0, 0.0))
    assert p == TestingPair("exp", (make(0.0, 0.0),), make(1.0, 1.0), accurate_envelope("exp", make(0.0, 0.0)))


def test_suite_settings_validated():
    with pytest.raises(ValueError):
        SuiteSpec("log")
    with pytest.raises(ValueError):
        SuiteSpec("exp", n_random=-1)
    assert SuiteSpec("exp", "b32").fmt is BINARY32


@pytest.mark.parametrize("fmt", [BINARY32, BINARY64])
def test_nextout_suite_categories(fmt):
    cases = gen_nextout_suite(fmt, n_random=200, seed=1)
    cats = {c.category for c in cases}
    assert cats == {"special", "random", "interval", "symmetry"}
    assert sum(c.category == "random" for c in cases) == 200
    for c in cases:
        if c.category in ("special", "random"):
            assert c.expected == next_out(make(c.inf, c.sup, fmt))


@pytest.mark.parametrize("fmt", [BINARY32, BINARY64])
def test_arithmetic_next_up_independent_route(fmt):
    for x in (0.0, -fmt.min_subnormal, fmt.min_subnormal, 1.0, -1.0, fmt.max_finite, -INF, 2.0**-126):
        assert arithmetic_next_up(x, fmt) == next_up(x, fmt)
    assert arithmetic_next_out(0.0, 0.0, fmt) == make(-fmt.min_subnormal, fmt.min_subnormal, fmt)


@pytest.mark.parametrize("f", ELEMENTARY_FUNCTIONS)
def test_builtin_kernel_agrees_with_pairs(f):
    for p in gen_function_suite(SuiteSpec(f, BINARY32, n_random=30)):
        assert kernel.evaluate(f, p.x) == p.y, p.tag
