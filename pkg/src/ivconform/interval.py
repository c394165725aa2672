"""Set-based inf-sup intervals and the function catalogue."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext

from .formats import BINARY64, Format, get_format

INF = math.inf


class InvalidInterval(ValueError):
    """Raised for a malformed constructor call (b < a, NaN, [+inf, .], [., -inf])."""


@dataclass(frozen=True)
class Interval:
    """A closed interval of extended reals with endpoints in ``fmt``.

    The empty set is encoded as ``inf=+inf, sup=-inf``. Zero endpoints are
    stored as +0 so that equality is bit equality.
    """

    inf: float
    sup: float
    fmt: Format = BINARY64

    def __post_init__(self):
        if self.inf == 0.0:
            object.__setattr__(self, "inf", 0.0)
        if self.sup == 0.0:
            object.__setattr__(self, "sup", 0.0)

    @property
    def is_empty(self) -> bool:
        return self.inf > self.sup

    @property
    def is_entire(self) -> bool:
        return self.inf == -INF and self.sup == INF

    @property
    def is_bounded(self) -> bool:
        return self.is_empty or (math.isfinite(self.inf) and math.isfinite(self.sup))

    def subset(self, other: Interval) -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return other.inf <= self.inf and self.sup <= other.sup

    def contains_point(self, x: float) -> bool:
        return self.inf <= x <= self.sup

    def __neg__(self) -> Interval:
        if self.is_empty:
            return self
        return Interval(-self.sup, -self.inf, self.fmt)

    def __repr__(self) -> str:
        if self.is_empty:
            return f"Interval(empty, {self.fmt})"
        return f"Interval([{self.inf!r}, {self.sup!r}], {self.fmt})"


def empty(fmt: Format | str = BINARY64) -> Interval:
    return Interval(INF, -INF, get_format(fmt))


def entire(fmt: Format | str = BINARY64) -> Interval:
    return Interval(-INF, INF, get_format(fmt))


def make(inf: float, sup: float, fmt: Format | str = BINARY64) -> Interval:
    """Build a non-empty interval, validating the endpoints.

    Endpoints must already be members of ``fmt``; nothing is rounded here.
    """
    fmt = get_format(fmt)
    inf, sup = float(inf), float(sup)
    if math.isnan(inf) or math.isnan(sup):
        raise InvalidInterval(f"NaN endpoint in [{inf}, {sup}]")
    if inf > sup:
        raise InvalidInterval(f"lower endpoint {inf!r} exceeds upper endpoint {sup!r}")
    if inf == INF or sup == -INF:
        raise InvalidInterval(f"[{inf}, {sup}] has an infinite endpoint on the wrong side")
    if not (fmt.contains(inf) and fmt.contains(sup)):
        raise InvalidInterval(f"[{inf!r}, {sup!r}] is not representable in {fmt}")
    return Interval(inf, sup, fmt)


def point(x: float, fmt: Format | str = BINARY64) -> Interval:
    return make(x, x, fmt)


class Relation(enum.Enum):
    EQUAL = "equal"
    PROPER_SUBSET = "proper_subset"
    PROPER_SUPERSET = "proper_superset"
    OVERLAPPING = "overlapping"
    DISJOINT = "disjoint"


def relate(a: Interval, b: Interval) -> Relation:
    """Set relation of ``a`` versus ``b``."""
    if a.fmt != b.fmt:
        raise ValueError("cannot relate intervals of different formats")
    sub, sup = a.subset(b), b.subset(a)
    if sub and sup:
        return Relation.EQUAL
    if sub:
        return Relation.PROPER_SUBSET
    if sup:
        return Relation.PROPER_SUPERSET
    if a.sup < b.inf or b.sup < a.inf:
        return Relation.DISJOINT
    return Relation.OVERLAPPING


@dataclass(frozen=True)
class FunctionInfo:
    name: str
    arity: int
    domain: str
    # closure of the mathematical range, or None when it is all of R
    range: tuple[float, float] | None = None
    odd: bool = False


FUNCTIONS: dict[str, FunctionInfo] = {
    "neg": FunctionInfo("neg", 1, "R", odd=True),
    "add": FunctionInfo("add", 2, "R x R"),
    "sub": FunctionInfo("sub", 2, "R x R"),
    "mul": FunctionInfo("mul", 2, "R x R"),
    "div": FunctionInfo("div", 2, "R x (R \\ {0})"),
    "recip": FunctionInfo("recip", 1, "R \\ {0}", odd=True),
    "sqrt": FunctionInfo("sqrt", 1, "[0, +inf)", (0.0, INF)),
    "sqr": FunctionInfo("sqr", 1, "R", (0.0, INF)),
    "fma": FunctionInfo("fma", 3, "R x R x R"),
    "cbrt": FunctionInfo("cbrt", 1, "R", odd=True),
    "exp": FunctionInfo("exp", 1, "R", (0.0, INF)),
    "sin": FunctionInfo("sin", 1, "R", (-1.0, 1.0), odd=True),
    "atanh": FunctionInfo("atanh", 1, "(-1, 1)", odd=True),
}

BASIC_FUNCTIONS = ("neg", "add", "sub", "mul", "div", "recip", "sqrt", "sqr", "fma")
ELEMENTARY_FUNCTIONS = ("cbrt", "exp", "sin", "atanh")


def function_info(name: str) -> FunctionInfo:
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unsupported function {name!r}") from None


def _decimal_endpoint(x: float, digits: int, rounding: str) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        return "0e0"
    d = Decimal(x)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        d = +d
    sign, digs, _ = d.as_tuple()
    digs = digs + (0,) * (digits - len(digs))
    mantissa = f"{digs[0]}." + "".join(map(str, digs[1:digits]))
    return ("-" if sign else "") + f"{mantissa}e{d.adjusted()}"


def to_decimal(x: Interval, digits: int = 17) -> str:
    """Render ``x`` in decimal with each endpoint rounded outward.

    >>> to_decimal(make(-1.0, 1.0))
    '[-1.0000000000000000e0,1.0000000000000000e0]'
    """
    if x.is_empty:
        return "[empty]"
    lo = _decimal_endpoint(x.inf, digits, ROUND_FLOOR)
    hi = _decimal_endpoint(x.sup, digits, ROUND_CEILING)
    return f"[{lo},{hi}]"
