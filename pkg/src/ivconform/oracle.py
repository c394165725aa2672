"""Reference hulls and accurate-mode envelopes.

Elementary endpoints come from an adaptive loop: bracket the exact value
at working precision ``q``, round both bracket ends in the endpoint's
outward direction, and accept when they agree; otherwise raise ``q``.
The basic operations are evaluated exactly with rationals and rounded once.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import _hp
from .dyadic import Dyadic
from .formats import Format
from .interval import (
    BASIC_FUNCTIONS,
    INF,
    Interval,
    empty,
    entire,
    function_info,
)
from .rounding import DOWN, UP, Direction, next_out, round_to_format


class PrecisionExhausted(RuntimeError):
    """The working precision hit ``q_max`` before the bracket ends agreed."""


class DomainViolation(ValueError):
    pass


Q_MAX_ENV = "IVCONFORM_Q_MAX"


@dataclass(frozen=True)
class OracleConfig:
    q_start: int | None = None  # None: 2p + 10 for the target format
    q_growth: int = 2
    q_max: int = 4096
    pi_guard: int = 32

    def __post_init__(self):
        if self.q_growth < 2:
            raise ValueError("q_growth must be at least 2")
        if self.q_start is not None and self.q_max < self.q_start:
            raise ValueError("q_max must be >= q_start")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> OracleConfig:
        """Defaults, with the precision cap taken from ``IVCONFORM_Q_MAX`` if set."""
        environ = os.environ if environ is None else environ
        raw = environ.get(Q_MAX_ENV)
        if raw is not None and "q_max" not in overrides:
            try:
                overrides["q_max"] = int(raw)
            except ValueError:
                raise ValueError(f"{Q_MAX_ENV} must be an integer, got {raw!r}") from None
        return cls(**overrides)

    def start(self, fmt: Format) -> int:
        q = 2 * fmt.precision + 10 if self.q_start is None else self.q_start
        if q <= fmt.precision:
            raise ValueError(f"q_start={q} must exceed the precision of {fmt}")
        if q > self.q_max:
            raise ValueError(f"q_max={self.q_max} is below the starting precision {q}")
        return q


DEFAULT_CONFIG = OracleConfig()


@dataclass
class OracleStats:
    """Optional collector for how hard the adaptive loop had to work."""

    endpoints: int = 0
    retries: int = 0
    max_q: int = 0
    q_histogram: dict = field(default_factory=dict)

    def record(self, q: int, retries: int) -> None:
        self.endpoints += 1
        self.retries += retries
        self.max_q = max(self.max_q, q)
        self.q_histogram[q] = self.q_histogram.get(q, 0) + 1


class HPBound(NamedTuple):
    lo: Dyadic | float
    hi: Dyadic | float
    q: int


def _isqrt_bracket(x: Fraction, q: int) -> tuple[Dyadic | Fraction, Dyadic | Fraction]:
    num, den = x.numerator, x.denominator
    # sqrt(num/den) = sqrt(num*den) / den
    n = num * den
    shift = max(0, q + 2 - n.bit_length() // 2)
    big = n << (2 * shift)
    r = math.isqrt(big)
    if r * r == big:
        v = Fraction(r, den << shift)
        return v, v
    return Fraction(r, den << shift), Fraction(r + 1, den << shift)


def point_enclosure(f: str, x, q: int, cfg: OracleConfig = DEFAULT_CONFIG) -> HPBound:
    """Bracket the exact value of ``f`` at the exact point ``x``.

    ``x`` is a float, or a tuple of floats for the basic operations.
    """
    args = x if isinstance(x, tuple) else (x,)
    info = function_info(f)
    if len(args) != info.arity:
        raise ValueError(f"{f} takes {info.arity} argument(s)")
    if any(math.isnan(a) for a in args):
        raise DomainViolation("NaN argument")
    if f in BASIC_FUNCTIONS:
        return _basic_point(f, args, q)
    (v,) = args
    if f == "exp":
        if math.isinf(v):
            return HPBound(INF, INF, q) if v > 0 else HPBound(Dyadic(0), Dyadic(0), q)
        return HPBound(*_hp.exp_bracket(v, q), q)
    if f == "cbrt":
        if math.isinf(v):
            return HPBound(v, v, q)
        return HPBound(*_hp.cbrt_bracket(v, q), q)
    if f == "sin":
        if math.isinf(v):
            raise DomainViolation("sin is undefined at infinity")
        return HPBound(*_hp.sin_bracket(v, q, cfg.pi_guard), q)
    if f == "atanh":
        if abs(v) > 1:
            raise DomainViolation(f"atanh argument {v!r} outside [-1, 1]")
        if abs(v) == 1:
            return HPBound(v * INF, v * INF, q)
        return HPBound(*_hp.atanh_bracket(v, q), q)
    raise ValueError(f"no point evaluation for {f}")


def _basic_point(f: str, args, q: int) -> HPBound:
    if any(math.isinf(a) for a in args):
        raise DomainViolation("basic point evaluation needs finite arguments")
    xs = [Fraction(a) for a in args]
    if f == "neg":
        v = -xs[0]
    elif f == "add":
        v = xs[0] + xs[1]
    elif f == "sub":
        v = xs[0] - xs[1]
    elif f == "mul":
        v = xs[0] * xs[1]
    elif f in ("div", "recip"):
        num, den = (xs[0], xs[1]) if f == "div" else (Fraction(1), xs[0])
        if den == 0:
            raise DomainViolation("division by zero")
        v = num / den
    elif f == "sqr":
        v = xs[0] * xs[0]
    elif f == "fma":
        v = xs[0] * xs[1] + xs[2]
    elif f == "sqrt":
        if xs[0] < 0:
            raise DomainViolation("sqrt of a negative number")
        return HPBound(*_isqrt_bracket(xs[0], q), q)
    else:
        raise ValueError(f)
    return HPBound(v, v, q)


def directed_point(
    f: str,
    x,
    direction: Direction,
    fmt: Format,
    cfg: OracleConfig = DEFAULT_CONFIG,
    stats: OracleStats | None = None,
) -> float:
    """Correctly rounded ``f(x)`` in ``fmt`` toward ``direction``."""
    q = cfg.start(fmt)
    retries = 0
    while True:
        b = point_enclosure(f, x, q, cfg)
        a = round_to_format(b.lo, fmt, direction)
        c = round_to_format(b.hi, fmt, direction)
        if a == c:
            if stats is not None:
                stats.record(q, retries)
            return a
        if q >= cfg.q_max:
            raise PrecisionExhausted(f"{f}({x!r}) undecided at q={q}")
        q = min(q * cfg.q_growth, cfg.q_max)
        retries += 1


# extended-real helpers for the exact basic hulls ---------------------------

def _x(v: float):
    return v if math.isinf(v) else Fraction(v)


def _xmul(a, b):
    if a == 0 or b == 0:
        return Fraction(0)
    if isinstance(a, float) or isinstance(b, float):
        return INF if (a > 0) == (b > 0) else -INF
    return a * b


def _xdiv(a, b):
    if isinstance(b, float):
        return Fraction(0)
    if isinstance(a, float):
        return INF if (a > 0) == (b > 0) else -INF
    return a / b


def _xadd(a, b):
    if isinstance(a, float):
        return a
    if isinstance(b, float):
        return b
    return a + b


def _rnd(v, fmt: Format, direction: Direction) -> float:
    if isinstance(v, float):
        return v
    return round_to_format(v, fmt, direction)


def _div_hull(x: Interval, y: Interval) -> Interval:
    fmt = x.fmt
    xl, xu, yl, yu = _x(x.inf), _x(x.sup), _x(y.inf), _x(y.sup)

    def iv(lo, hi):
        return Interval(_rnd(lo, fmt, DOWN), _rnd(hi, fmt, UP), fmt)

    if y.inf == 0 and y.sup == 0:
        return empty(fmt)
    if y.inf > 0:
        if x.inf >= 0:
            return iv(_xdiv(xl, yu), _xdiv(xu, yl))
        if x.sup <= 0:
            return iv(_xdiv(xl, yl), _xdiv(xu, yu))
        return iv(_xdiv(xl, yl), _xdiv(xu, yl))
    if y.sup < 0:
        if x.inf >= 0:
            return iv(_xdiv(xu, yu), _xdiv(xl, yl))
        if x.sup <= 0:
            return iv(_xdiv(xu, yl), _xdiv(xl, yu))
        return iv(_xdiv(xu, yu), _xdiv(xl, yu))
    # 0 lies in y
    if x.inf <= 0 <= x.sup:
        return entire(fmt)
    if x.inf > 0:
        if y.sup == 0:
            return iv(-INF, _xdiv(xl, yl))
        if y.inf == 0:
            return iv(_xdiv(xl, yu), INF)
        return entire(fmt)
    if y.sup == 0:
        return iv(_xdiv(xu, yl), INF)
    if y.inf == 0:
        return iv(-INF, _xdiv(xu, yu))
    return entire(fmt)


def _mul_range(x: Interval, y: Interval):
    prods = [_xmul(_x(a), _x(b)) for a in (x.inf, x.sup) for b in (y.inf, y.sup)]
    return min(prods), max(prods)


def _basic_hull(f: str, args: Sequence[Interval], cfg: OracleConfig, stats) -> Interval:
    fmt = args[0].fmt
    if any(a.is_empty for a in args):
        return empty(fmt)

    def iv(lo, hi):
        return Interval(_rnd(lo, fmt, DOWN), _rnd(hi, fmt, UP), fmt)

    if f == "neg":
        return -args[0]
    if f == "add":
        x, y = args
        return iv(_xadd(_x(x.inf), _x(y.inf)), _xadd(_x(x.sup), _x(y.sup)))
    if f == "sub":
        x, y = args
        return iv(_xadd(_x(x.inf), _x(-y.sup)), _xadd(_x(x.sup), _x(-y.inf)))
    if f == "mul":
        return iv(*_mul_range(*args))
    if f == "div":
        return _div_hull(*args)
    if f == "recip":
        return _div_hull(Interval(1.0, 1.0, fmt), args[0])
    if f == "sqr":
        (x,) = args
        lo_sq, hi_sq = _xmul(_x(x.inf), _x(x.inf)), _xmul(_x(x.sup), _x(x.sup))
        if x.inf >= 0:
            return iv(lo_sq, hi_sq)
        if x.sup <= 0:
            return iv(hi_sq, lo_sq)
        return iv(Fraction(0), max(lo_sq, hi_sq))
    if f == "fma":
        x, y, z = args
        lo, hi = _mul_range(x, y)
        return iv(_xadd(lo, _x(z.inf)), _xadd(hi, _x(z.sup)))
    if f == "sqrt":
        (x,) = args
        if x.sup < 0:
            return empty(fmt)
        lo = max(x.inf, 0.0)
        a = directed_point("sqrt", lo, DOWN, fmt, cfg, stats)
        b = INF if x.sup == INF else directed_point("sqrt", x.sup, UP, fmt, cfg, stats)
        return Interval(a, b, fmt)
    raise ValueError(f)


# sine extrema ----------------------------------------------------------------

@dataclass(frozen=True)
class QuarterTurn:
    """The point ``j * pi/2``."""

    j: int

    def __repr__(self) -> str:
        return f"{self.j}*pi/2"


class Piece(NamedTuple):
    start: float | QuarterTurn
    end: float | QuarterTurn
    increasing: bool


@dataclass(frozen=True)
class SinScan:
    contains_max: bool
    contains_min: bool
    # monotone pieces; left empty when x spans a full period or more
    pieces: tuple[Piece, ...] = ()


def _quarter_floor(v: float, q: int, cfg: OracleConfig) -> int:
    w = _hp.reduction_bits(v, q, cfg.pi_guard)
    a, b = _hp.quarter_turns(v, w)
    lo, hi = a.floor_fixed(0), b.floor_fixed(0)
    if lo != hi:
        raise _Undecided
    return lo


class _Undecided(Exception):
    pass


def sin_extrema_scan(x: Interval, cfg: OracleConfig = DEFAULT_CONFIG) -> SinScan:
    """Which maxima (pi/2 + 2k pi) and minima (3pi/2 + 2k pi) lie in ``x``."""
    if x.is_empty:
        return SinScan(False, False)
    if not x.is_bounded:
        return SinScan(True, True)
    q = cfg.start(x.fmt)
    while True:
        try:
            a = _quarter_floor(x.inf, q, cfg)
            b = _quarter_floor(x.sup, q, cfg)
            break
        except _Undecided:
            if q >= cfg.q_max:
                raise PrecisionExhausted(f"cannot place {x} relative to multiples of pi/2") from None
            q = min(q * cfg.q_growth, cfg.q_max)
    # critical points j*pi/2 with odd j inside x are exactly a < j <= b
    crit = [j for j in range(a + 1, min(b, a + 5) + 1) if j % 2]
    has_max = any(j % 4 == 1 for j in crit)
    has_min = any(j % 4 == 3 for j in crit)
    if b - a >= 4:
        return SinScan(True, True)
    stops = [x.inf, *(QuarterTurn(j) for j in crit), x.sup]
    rising = a % 4 in (0, 3)
    pieces = []
    for left, right in zip(stops, stops[1:]):
        pieces.append(Piece(left, right, rising))
        rising = not rising
    return SinScan(has_max, has_min, tuple(pieces))


# hulls --------------------------------------------------------------------

def _monotone_hull(f: str, x: Interval, cfg, stats, lo_limit: float, hi_limit: float) -> Interval:
    lo = lo_limit if x.inf == -INF else directed_point(f, x.inf, DOWN, x.fmt, cfg, stats)
    hi = hi_limit if x.sup == INF else directed_point(f, x.sup, UP, x.fmt, cfg, stats)
    return Interval(lo, hi, x.fmt)


def _elementary_hull(f: str, x: Interval, cfg: OracleConfig, stats) -> Interval:
    fmt = x.fmt
    if x.is_empty:
        return x
    if f == "exp":
        return _monotone_hull(f, x, cfg, stats, 0.0, INF)
    if f == "cbrt":
        return _monotone_hull(f, x, cfg, stats, -INF, INF)
    if f == "atanh":
        if x.inf >= 1 or x.sup <= -1:
            return empty(fmt)
        lo = -INF if x.inf <= -1 else directed_point(f, x.inf, DOWN, fmt, cfg, stats)
        hi = INF if x.sup >= 1 else directed_point(f, x.sup, UP, fmt, cfg, stats)
        return Interval(lo, hi, fmt)
    if f == "sin":
        scan = sin_extrema_scan(x, cfg)
        if scan.contains_max and scan.contains_min:
            return Interval(-1.0, 1.0, fmt)
        if scan.contains_min:
            lo = -1.0
        else:
            lo = min(directed_point(f, v, DOWN, fmt, cfg, stats) for v in {x.inf, x.sup})
        if scan.contains_max:
            hi = 1.0
        else:
            hi = max(directed_point(f, v, UP, fmt, cfg, stats) for v in {x.inf, x.sup})
        return Interval(lo, hi, fmt)
    raise ValueError(f"unsupported function {f!r}")


def _as_args(f: str, x) -> tuple[Interval, ...]:
    args = tuple(x) if isinstance(x, (tuple, list)) else (x,)
    info = function_info(f)
    if len(args) != info.arity:
        raise ValueError(f"{f} takes {info.arity} interval argument(s), got {len(args)}")
    if len({a.fmt for a in args}) != 1:
        raise ValueError("all arguments must share one format")
    return args


def tightest_hull(f: str, x, cfg: OracleConfig = DEFAULT_CONFIG, stats: OracleStats | None = None) -> Interval:
    """Tightest ``fmt`` interval containing the range of ``f`` over ``x``.

    ``x`` is an Interval, or a tuple of Intervals for multi-argument
    operations. Inputs are intersected with the natural domain first.
    """
    args = _as_args(f, x)
    if f in BASIC_FUNCTIONS:
        return _basic_hull(f, args, cfg, stats)
    return _elementary_hull(f, args[0], cfg, stats)


def accurate_envelope(f: str, x, cfg: OracleConfig = DEFAULT_CONFIG, stats: OracleStats | None = None) -> Interval:
    """Largest result admissible in accurate mode: nextOut(tightest(nextOut(x)))."""
    args = _as_args(f, x)
    widened = tuple(next_out(a) for a in args)
    return next_out(tightest_hull(f, widened, cfg, stats))
