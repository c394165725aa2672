"""Testing-pair suites and the line-oriented pair file format.

A pair file is UTF-8 text. Lines starting with ``#`` are header or comment
lines; header lines have the form ``# key: value``. Every other non-blank
line is one record::

    <function> <format> <arg>... <y> <y_prime | -> [# <tag>]

with as many ``<arg>`` intervals as the function's arity and intervals in
the hex encoding of :mod:`ivconform.hexio`. When the header carries a
``count``, the reader checks it, so a file truncated at a line boundary is
still rejected.
"""

from __future__ import annotations

import io
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from . import _hp
from ._version import __version__
from .conformance import TestingPair
from .formats import BINARY64, Format, get_format
from .hexio import format_interval, parse_interval
from .interval import (
    ELEMENTARY_FUNCTIONS,
    FUNCTIONS,
    INF,
    Interval,
    InvalidInterval,
    empty,
    entire,
    function_info,
    make,
)
from .oracle import DEFAULT_CONFIG, OracleConfig, OracleStats, accurate_envelope, tightest_hull
from .rounding import DOWN, UP, from_ordered_key, next_down, next_up, ordered_key, round_to_format

FILE_VERSION = "1"


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class SuiteSpec:
    f: str
    fmt: Format = BINARY64
    n_random: int = 100
    seed: int = 0
    include_specials: bool = True
    include_extrema: bool = True
    include_symmetry: bool = True

    def __post_init__(self):
        function_info(self.f)
        if self.n_random < 0:
            raise ValueError("n_random must be >= 0")
        object.__setattr__(self, "fmt", get_format(self.fmt))


# value helpers --------------------------------------------------------------

def _rd(v, fmt: Format) -> float:
    return round_to_format(Fraction(v) if isinstance(v, float) and math.isfinite(v) else v, fmt, DOWN)


def _ru(v, fmt: Format) -> float:
    return round_to_format(Fraction(v) if isinstance(v, float) and math.isfinite(v) else v, fmt, UP)


def _steps(x: float, k: int, fmt: Format) -> float:
    for _ in range(abs(k)):
        x = next_up(x, fmt) if k > 0 else next_down(x, fmt)
    return x


def _pi_multiple(num: int, den: int, fmt: Format) -> tuple[float, float]:
    """Directed roundings of ``num*pi/den`` in ``fmt``."""
    w = 2 * fmt.precision + 64
    p_lo, p_hi = _hp.pi_fixed(w)
    a, b = (p_lo, p_hi) if num >= 0 else (p_hi, p_lo)
    lo = round_to_format(Fraction(num * a, den << w), fmt, DOWN)
    hi = round_to_format(Fraction(num * b, den << w), fmt, UP)
    return lo, hi


# specials -----------------------------------------------------------------

def _common_specials(fmt: Format) -> list[tuple[str, Interval]]:
    m, s = fmt.max_finite, fmt.min_subnormal
    return [
        ("empty", empty(fmt)),
        ("entire", entire(fmt)),
        ("zero", make(0.0, 0.0, fmt)),
        ("one", make(1.0, 1.0, fmt)),
        ("minus one", make(-1.0, -1.0, fmt)),
        ("min subnormal", make(s, s, fmt)),
        ("around zero", make(-s, s, fmt)),
        ("finite span", make(-m, m, fmt)),
        ("max to inf", make(m, INF, fmt)),
        ("-inf to -max", make(-INF, -m, fmt)),
        ("negative half-line", make(-INF, 0.0, fmt)),
        ("positive half-line", make(0.0, INF, fmt)),
    ]


def _exp_specials(fmt: Format) -> list[tuple[str, Interval]]:
    ln_max = math.log(fmt.max_finite)
    ln_sub = math.log(fmt.min_subnormal)
    ln_norm = math.log(fmt.min_normal)
    out = [("range violation", make(-1e9, 0.0, fmt)), ("unit", make(-1.0, 1.0, fmt))]
    for label, t in (("overflow threshold", ln_max), ("underflow threshold", ln_sub), ("subnormal threshold", ln_norm)):
        a, b = _rd(t, fmt), _ru(t, fmt)
        out.append((label, make(_steps(a, -3, fmt), _steps(b, 3, fmt), fmt)))
        out.append((label + " point", make(a, a, fmt)))
    out.append(("tiny positive", make(fmt.min_subnormal, fmt.min_normal, fmt)))
    out.append(("tiny negative", make(-fmt.min_normal, -fmt.min_subnormal, fmt)))
    out.append(("large", make(1e4 if fmt.width == 64 else 1e3, 1e5 if fmt.width == 64 else 1e4, fmt)))
    return out


def _sin_specials(fmt: Format) -> list[tuple[str, Interval]]:
    big = 2.0**100
    out = [
        ("range violation", make(0.0, 10.0, fmt)),
        ("symmetric ten", make(-10.0, 10.0, fmt)),
        ("2^100", make(big, big, fmt)),
        ("2^100 neighbourhood", make(big, _steps(big, 5, fmt), fmt)),
        ("max finite", make(fmt.max_finite, fmt.max_finite, fmt)),
        ("-max finite", make(-fmt.max_finite, -fmt.max_finite, fmt)),
    ]
    if fmt.width == 64:
        out.append(("1e22", make(1e22, 1e22, fmt)))
    lo, hi = _pi_multiple(1, 1, fmt)
    out.append(("pi rounded down", make(lo, lo, fmt)))
    out.append(("pi rounded up", make(hi, hi, fmt)))
    out.append(("straddles pi", make(lo, hi, fmt)))
    return out


def _extremum_intervals(fmt: Format) -> list[tuple[str, Interval]]:
    """Intervals hugging pi/2 + k*pi from both sides and straddling it."""
    out = []
    for num in (1, 3, -1, 5, 201):
        lo, hi = _pi_multiple(num, 2, fmt)
        name = f"{num}pi/2"
        out.append((f"{name} straddle", make(lo, hi, fmt)))
        out.append((f"{name} straddle wide", make(_steps(lo, -10, fmt), _steps(hi, 10, fmt), fmt)))
        out.append((f"{name} left", make(_steps(lo, -10, fmt), lo, fmt)))
        out.append((f"{name} right", make(hi, _steps(hi, 10, fmt), fmt)))
        out.append((f"{name} lower point", make(lo, lo, fmt)))
        out.append((f"{name} upper point", make(hi, hi, fmt)))
    return out


def _cbrt_specials(fmt: Format) -> list[tuple[str, Interval]]:
    return [
        ("cubes", make(-8.0, 27.0, fmt)),
        ("cube point", make(8.0, 8.0, fmt)),
        ("negative cubes", make(-27.0, -8.0, fmt)),
        ("exact fraction", make(0.125, 0.125, fmt)),
        ("unit", make(-1.0, 1.0, fmt)),
        ("two", make(2.0, 2.0, fmt)),
        ("max finite", make(fmt.max_finite, fmt.max_finite, fmt)),
        ("min normal", make(fmt.min_normal, fmt.min_normal, fmt)),
        ("sign change", make(-fmt.min_subnormal, 1.0, fmt)),
    ]


def _atanh_specials(fmt: Format) -> list[tuple[str, Interval]]:
    below_one = next_down(1.0, fmt)
    above_minus_one = next_up(-1.0, fmt)
    return [
        ("closed domain", make(-1.0, 1.0, fmt)),
        ("outside right", make(1.0, 2.0, fmt)),
        ("outside left", make(-3.0, -2.0, fmt)),
        ("wider than domain", make(-2.0, 2.0, fmt)),
        ("one", make(1.0, 1.0, fmt)),
        ("minus one", make(-1.0, -1.0, fmt)),
        ("just below one", make(below_one, 1.0, fmt)),
        ("just above minus one", make(-1.0, above_minus_one, fmt)),
        ("below one point", make(below_one, below_one, fmt)),
        ("half", make(0.5, 0.5, fmt)),
        ("symmetric half", make(-0.5, 0.5, fmt)),
        ("series switch", make(_steps(0.5, -2, fmt), _steps(0.5, 2, fmt), fmt)),
    ]


def _basic_specials(f: str, fmt: Format) -> list[tuple[str, tuple[Interval, ...]]]:
    m, s = fmt.max_finite, fmt.min_subnormal
    e, r = empty(fmt), entire(fmt)
    z = make(0.0, 0.0, fmt)
    a = make(1.0, 2.0, fmt)
    b = make(-2.0, -1.0, fmt)
    c = make(-1.0, 1.0, fmt)
    tenth = _rd(0.1, fmt)
    fifth = _rd(0.2, fmt)
    big = make(m, m, fmt)
    tiny = make(s, s, fmt)
    half = make(0.5, 0.5, fmt)
    arity = function_info(f).arity
    if arity == 1:
        cases = [e, r, z, a, b, c, big, tiny, make(-1.0, 2.0, fmt), make(2.0, 2.0, fmt),
                 make(0.0, 1.0, fmt), make(-1.0, 0.0, fmt), make(3.0, 3.0, fmt), make(-INF, -1.0, fmt)]
        return [(f"special: case {i}", (x,)) for i, x in enumerate(cases)]
    pairs = [(e, a), (a, e), (r, r), (z, r), (a, b), (a, c), (c, c), (b, z), (a, z),
             (a, make(0.0, 1.0, fmt)), (a, make(-1.0, 0.0, fmt)), (b, make(0.0, 1.0, fmt)),
             (b, make(-1.0, 0.0, fmt)), (make(tenth, tenth, fmt), make(fifth, fifth, fmt)),
             (big, big), (tiny, half), (tiny, tiny), (make(-INF, 1.0, fmt), a), (make(3.0, 3.0, fmt), a)]
    if arity == 2:
        return [(f"special: case {i}", p) for i, p in enumerate(pairs)]
    triples = [(x, y, w) for (x, y), w in zip(pairs, [a, b, c, z, r, e, big, tiny, half] * 3)]
    return [(f"special: case {i}", t) for i, t in enumerate(triples)]


# random intervals ------------------------------------------------------------

def _band(f: str, fmt: Format) -> tuple[float, float]:
    if f == "atanh":
        return next_up(-1.0, fmt), next_down(1.0, fmt)
    if f == "exp":
        t = _ru(math.log(fmt.max_finite) + 40.0, fmt)
        return -t, t
    return -fmt.max_finite, fmt.max_finite


def _random_interval(rng: random.Random, lo: float, hi: float, fmt: Format) -> Interval:
    k_lo, k_hi = ordered_key(lo, fmt), ordered_key(hi, fmt)
    a = rng.randint(k_lo, k_hi)
    shape = rng.random()
    if shape < 1 / 3:
        b = rng.randint(k_lo, k_hi)
    elif shape < 2 / 3:
        b = a + rng.randint(0, 1 << 20)
    else:
        b = a + rng.randint(0, 16)
    a, b = sorted((a, min(b, k_hi)))
    return make(from_ordered_key(a, fmt), from_ordered_key(b, fmt), fmt)


def _pair_rng(seed: int, f: str, fmt: Format, i: int) -> random.Random:
    # one stream per pair index: reproducible however the work is split
    return random.Random(f"{seed}:{f}:{fmt.name}:{i}")


def random_args(spec: SuiteSpec, i: int) -> tuple[Interval, ...]:
    rng = _pair_rng(spec.seed, spec.f, spec.fmt, i)
    lo, hi = _band(spec.f, spec.fmt)
    return tuple(_random_interval(rng, lo, hi, spec.fmt) for _ in range(function_info(spec.f).arity))


def make_pair(f: str, args, cfg: OracleConfig = DEFAULT_CONFIG, tag: str = "", stats: OracleStats | None = None) -> TestingPair:
    args = tuple(args) if isinstance(args, (tuple, list)) else (args,)
    y = tightest_hull(f, args, cfg, stats)
    y_prime = accurate_envelope(f, args, cfg, stats)
    return TestingPair(f, args, y, y_prime, tag)


def suite_inputs(spec: SuiteSpec) -> list[tuple[str, tuple[Interval, ...]]]:
    """The tagged argument tuples a suite is built from, before evaluation."""
    f, fmt = spec.f, spec.fmt
    inputs: list[tuple[str, tuple[Interval, ...]]] = []
    if spec.include_specials:
        if f in ELEMENTARY_FUNCTIONS:
            table = {"exp": _exp_specials, "sin": _sin_specials, "cbrt": _cbrt_specials, "atanh": _atanh_specials}
            for label, x in _common_specials(fmt) + table[f](fmt):
                inputs.append((f"special: {label}", (x,)))
        else:
            inputs.extend((label, args) for label, args in _basic_specials(f, fmt))
    if spec.include_extrema and f == "sin":
        inputs.extend((f"extremum: {label}", (x,)) for label, x in _extremum_intervals(fmt))
    randoms = [(f"random {i}", random_args(spec, i)) for i in range(spec.n_random)]
    inputs.extend(randoms)
    if spec.include_symmetry and FUNCTIONS[f].odd:
        for label, args in randoms[:10]:
            inputs.append((f"symmetry of {label}", tuple(-a for a in args)))
    return inputs


def gen_function_suite(spec: SuiteSpec, cfg: OracleConfig = DEFAULT_CONFIG,
                       stats: OracleStats | None = None) -> list[TestingPair]:
    """Specials, extremum neighbourhoods, seeded random and mirrored pairs."""
    return [make_pair(spec.f, args, cfg, tag, stats) for tag, args in suite_inputs(spec)]


# nextOut cases -----------------------------------------------------------

@dataclass(frozen=True)
class NextOutCase:
    category: str  # special | random | interval | symmetry
    inf: float
    sup: float
    fmt: Format
    expected: Interval | None  # None: the constructor must reject the input
    mirror: tuple[float, float] | None = None
    tag: str = ""


def _ulp_up(x: float, fmt: Format) -> Fraction:
    """Gap from x >= 0 to the next larger format value."""
    e = fmt.emin if x == 0 else max(math.frexp(x)[1] - 1, fmt.emin)
    return Fraction(2) ** (e - fmt.precision + 1)


def _ulp_down(x: float, fmt: Format) -> Fraction:
    """Gap from x > 0 to the next smaller format value."""
    mant, e = math.frexp(x)
    if mant == 0.5 and e - 1 > fmt.emin:
        return Fraction(2) ** (e - 1 - fmt.precision)
    return _ulp_up(x, fmt)


def _search_next_up(x: float, fmt: Format) -> float:
    """Least format value above finite x: try x + 2**k for growing k.

    Below one ulp no candidate is representable and at one ulp the
    candidate is the successor, so the first hit is the answer.
    """
    v = Fraction(x)
    # neither neighbour gap is below 2**(floor(log2|x|) - p), so start under it
    start = fmt.emin - fmt.precision + 1
    if x != 0:
        start = max(start, math.frexp(x)[1] - fmt.precision - 3)
    for k in range(start, fmt.emax + 1):
        c = v + Fraction(2) ** k
        f = float(c)
        if Fraction(f) == c and fmt.contains(f):
            return f
    raise AssertionError(f"no successor found for {x!r}")


def arithmetic_next_up(x: float, fmt: Format) -> float:
    """Successor without bit manipulation.

    Narrow formats use an exhaustive neighbourhood search, binary64 the ulp
    formula.
    """
    if x == INF:
        return INF
    if x == -INF:
        return -fmt.max_finite
    if x == fmt.max_finite:
        return INF
    if fmt.precision <= 24:
        return _search_next_up(x, fmt)
    if x >= 0:
        return float(Fraction(x) + _ulp_up(x, fmt))
    return -float(Fraction(-x) - _ulp_down(-x, fmt))


def arithmetic_next_out(a: float, b: float, fmt: Format) -> Interval:
    return Interval(-arithmetic_next_up(-a, fmt), arithmetic_next_up(b, fmt), fmt)


def _endpoint_specials(fmt: Format) -> list[float]:
    vals = [0.0, fmt.min_subnormal, fmt.min_normal, fmt.max_finite, 1.0, INF,
            next_down(fmt.min_normal, fmt), 2.0 * fmt.min_subnormal]
    vals += [2.0**k for k in (-fmt.precision, -20, -1, 1, 2, 10, fmt.precision, fmt.emax)]
    vals += [2.0**fmt.emin * 2.0 ** -(fmt.precision // 2)]
    vals += [-v for v in vals]
    return vals


def gen_nextout_suite(fmt: Format | str = BINARY64, n_random: int = 100, seed: int = 0) -> list[NextOutCase]:
    fmt = get_format(fmt)
    cases: list[NextOutCase] = []
    specials = _endpoint_specials(fmt)
    for a in specials:
        for b in specials:
            if a <= b and a != INF and b != -INF:
                cases.append(NextOutCase("special", a, b, fmt, arithmetic_next_out(a, b, fmt)))
    rng = random.Random(f"nextout:{seed}:{fmt.name}")
    k_max = ordered_key(fmt.max_finite, fmt)
    randoms = []
    for _ in range(n_random):
        a, b = sorted((rng.randint(-k_max, k_max), rng.randint(-k_max, k_max)))
        a, b = from_ordered_key(a, fmt), from_ordered_key(b, fmt)
        randoms.append((a, b))
        cases.append(NextOutCase("random", a, b, fmt, arithmetic_next_out(a, b, fmt)))
    cases.append(NextOutCase("interval", INF, -INF, fmt, empty(fmt), tag="empty"))
    cases.append(NextOutCase("interval", -INF, INF, fmt, entire(fmt), tag="entire"))
    for a, b in ((3.0, 2.0), (INF, INF), (-INF, -INF), (1.0, math.nan), (math.nan, 1.0), (0.0, -fmt.min_subnormal)):
        cases.append(NextOutCase("interval", a, b, fmt, None, tag="invalid"))
    for a, b in randoms[: max(10, n_random // 10)] + [(s, t) for s, t in zip(specials, specials[1:]) if s <= t]:
        if a == INF or b == -INF:
            continue
        expected = -arithmetic_next_out(a, b, fmt)
        cases.append(NextOutCase("symmetry", -b, -a, fmt, expected, mirror=(a, b)))
    return cases


def nextout_input(case: NextOutCase) -> Interval:
    """Build the case's input interval; raises InvalidInterval for invalid cases."""
    if case.tag == "empty":
        return empty(case.fmt)
    return make(case.inf, case.sup, case.fmt)


# serialization -----------------------------------------------------------

def _record(pair: TestingPair) -> str:
    parts = [pair.f, pair.fmt.name, *(format_interval(a) for a in pair.x), format_interval(pair.y),
             "-" if pair.y_prime is None else format_interval(pair.y_prime)]
    line = " ".join(parts)
    if pair.tag:
        line += f" # {pair.tag}"
    return line


def dumps_pairs(pairs: Iterable[TestingPair], header: dict | None = None) -> str:
    pairs = list(pairs)
    meta = {"version": FILE_VERSION, "generator": f"ivconform {__version__}"}
    if pairs:
        meta["function"] = ",".join(sorted({p.f for p in pairs}))
        meta["format"] = ",".join(sorted({p.fmt.name for p in pairs}))
    meta.update(header or {})
    meta["count"] = str(len(pairs))
    out = ["# ivconform testing pairs"]
    out += [f"# {k}: {v}" for k, v in meta.items()]
    out += [_record(p) for p in pairs]
    return "\n".join(out) + "\n"


def write_pairs(pairs: Iterable[TestingPair], dest, header: dict | None = None) -> None:
    """Write pairs to a path or a text stream."""
    text = dumps_pairs(pairs, header)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)


def _parse_record(line: str, lineno: int) -> TestingPair:
    body, _, tag = line.partition("#")
    tokens = body.split()
    if len(tokens) < 2:
        raise ParseError(lineno, "record needs a function and a format")
    f, fmt_name = tokens[0], tokens[1]
    if f not in FUNCTIONS:
        raise ParseError(lineno, f"unknown function {f!r}")
    try:
        fmt = get_format(fmt_name)
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    arity = FUNCTIONS[f].arity
    if len(tokens) != 2 + arity + 2:
        raise ParseError(lineno, f"{f} record needs {arity} argument(s), y and y' ({len(tokens) - 2} interval tokens found)")
    try:
        args = tuple(parse_interval(t, fmt) for t in tokens[2:2 + arity])
        y = parse_interval(tokens[2 + arity], fmt)
        yp_tok = tokens[3 + arity]
        y_prime = None if yp_tok == "-" else parse_interval(yp_tok, fmt)
    except (ValueError, InvalidInterval) as exc:
        raise ParseError(lineno, str(exc)) from None
    return TestingPair(f, args, y, y_prime, tag.strip())


def _lines(source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)) and not (isinstance(source, str) and "\n" in source):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    elif isinstance(source, str):
        yield from io.StringIO(source)
    else:
        yield from source


def read_pairs_with_header(source) -> tuple[list[TestingPair], dict[str, str]]:
    pairs: list[TestingPair] = []
    header: dict[str, str] = {}
    for lineno, raw in enumerate(_lines(source), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep and not pairs:
                header[key.strip()] = value.strip()
            continue
        pairs.append(_parse_record(line, lineno))
    if "count" in header:
        try:
            expected = int(header["count"])
        except ValueError:
            raise ParseError(0, f"bad count {header['count']!r}") from None
        if expected != len(pairs):
            raise ParseError(lineno if pairs else 0, f"header announces {expected} records, found {len(pairs)}")
    return pairs, header


def read_pairs(source) -> list[TestingPair]:
    """Read pairs from a path, a text stream, or a string holding the file."""
    return read_pairs_with_header(source)[0]


def loads_pairs(text: str) -> list[TestingPair]:
    return read_pairs(io.StringIO(text))


__all__ = [
    "NextOutCase",
    "ParseError",
    "SuiteSpec",
    "arithmetic_next_out",
    "arithmetic_next_up",
    "dumps_pairs",
    "gen_function_suite",
    "gen_nextout_suite",
    "loads_pairs",
    "make_pair",
    "nextout_input",
    "read_pairs",
    "read_pairs_with_header",
    "suite_inputs",
    "write_pairs",
]

