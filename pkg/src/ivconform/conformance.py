"""Classify observed results into the accuracy-mode lattice and aggregate."""

from __future__ import annotations

import enum
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .hexio import format_interval
from .interval import Interval, function_info


@dataclass(frozen=True)
class TestingPair:
    """Input arguments, tightest expected output, optional accurate envelope."""

    f: str
    x: tuple[Interval, ...]
    y: Interval
    y_prime: Interval | None = None
    tag: str = ""

    __test__ = False  # not a pytest class

    @property
    def fmt(self):
        return self.y.fmt


class Level(enum.IntEnum):
    """Accuracy levels, ordered by strength."""

    NONCONFORMING = 0
    VALID = 1
    ACCURATE = 2
    TIGHTEST = 3

    @classmethod
    def parse(cls, name: str | Level) -> Level:
        if isinstance(name, Level):
            return name
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown accuracy level {name!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


class SuiteAborted(RuntimeError):
    """Raised by an evaluator to stop a run instead of recording a fault."""


class MissingEnvelope(ValueError):
    """A pair without y' cannot separate accurate from valid-only results."""


@dataclass(frozen=True)
class Verdict:
    level: Level
    z: Interval | None
    note: str = ""


def is_tightest(z: Interval, pair: TestingPair) -> bool:
    return z == pair.y


def is_accurate(z: Interval, pair: TestingPair) -> bool:
    if pair.y_prime is None:
        raise MissingEnvelope(f"pair {pair.tag or pair.f} has no accurate envelope")
    return pair.y.subset(z) and z.subset(pair.y_prime)


def is_valid(z: Interval, pair: TestingPair) -> bool:
    return pair.y.subset(z)


def classify(z: Interval, pair: TestingPair) -> Verdict:
    """Strongest level whose predicate ``z`` satisfies against ``pair``."""
    if z.fmt != pair.y.fmt:
        return Verdict(Level.NONCONFORMING, z, f"result format {z.fmt} differs from {pair.y.fmt}")
    if is_tightest(z, pair):
        return Verdict(Level.TIGHTEST, z)
    if not is_valid(z, pair):
        return Verdict(Level.NONCONFORMING, z, "result does not enclose the tightest hull")
    if is_accurate(z, pair):
        return Verdict(Level.ACCURATE, z)
    return Verdict(Level.VALID, z)


@dataclass
class Outcome:
    index: int
    pair: TestingPair
    verdict: Verdict


@dataclass
class Report:
    counts: Counter = field(default_factory=Counter)  # (function, Level) -> n
    outcomes: list[Outcome] = field(default_factory=list)
    claimed_mode: Level = Level.TIGHTEST
    range_warnings: list[str] = field(default_factory=list)
    faults: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def min_level(self) -> Level | None:
        levels = [lvl for (_, lvl), n in self.counts.items() if n]
        return min(levels) if levels else None

    @property
    def claim_upheld(self) -> bool:
        return check_claim(self, self.claimed_mode)

    @property
    def failures(self) -> list[Outcome]:
        return [o for o in self.outcomes if o.verdict.level < self.claimed_mode]

    def level_counts(self, f: str | None = None) -> dict[Level, int]:
        out = {lvl: 0 for lvl in Level}
        for (fn, lvl), n in self.counts.items():
            if f is None or fn == f:
                out[lvl] += n
        return out


Evaluate = Callable[[str, tuple], Interval]


def _evaluate_one(evaluate: Evaluate, pair: TestingPair) -> Verdict:
    try:
        z = evaluate(pair.f, pair.x)
    except SuiteAborted:
        raise
    except Exception as exc:  # adapter faults are verdicts
        return Verdict(Level.NONCONFORMING, None, f"fault: {type(exc).__name__}: {exc}")
    if not isinstance(z, Interval):
        return Verdict(Level.NONCONFORMING, None, f"fault: evaluator returned {type(z).__name__}")
    try:
        return classify(z, pair)
    except MissingEnvelope:
        # enclosure is known, accuracy cannot be decided
        return Verdict(Level.VALID, z, "no accurate envelope in pair")


def run_suite(
    pairs: Sequence[TestingPair],
    evaluate: Evaluate,
    claimed: Level | str = Level.TIGHTEST,
    workers: int = 1,
    diagnostics: bool = True,
) -> Report:
    """Evaluate every pair, classify, and aggregate.

    ``workers > 1`` fans pairs out to threads; only pass it for reentrant
    evaluators. Outcomes keep the input order either way.
    """
    report = Report(claimed_mode=Level.parse(claimed))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda p: _evaluate_one(evaluate, p), pairs))
    else:
        verdicts = [_evaluate_one(evaluate, p) for p in pairs]
    for i, (pair, verdict) in enumerate(zip(pairs, verdicts)):
        report.counts[(pair.f, verdict.level)] += 1
        report.outcomes.append(Outcome(i, pair, verdict))
        if verdict.note.startswith("fault"):
            report.faults += 1
        if diagnostics:
            report.range_warnings.extend(range_sanity(pair))
    return report


def check_claim(report: Report, claimed: Level | str) -> bool:
    """True iff every verdict in ``report`` is at least ``claimed``."""
    claimed = Level.parse(claimed)
    low = report.min_level
    return low is None or low >= claimed


def range_sanity(pair: TestingPair) -> list[str]:
    """Warn when the accurate envelope leaves the function's known range."""
    info = function_info(pair.f)
    env = pair.y_prime
    if env is None or info.range is None or env.is_empty:
        return []
    lo, hi = info.range
    warnings = []
    label = f"{pair.f}{_args_text(pair.x)}"
    if env.inf < lo:
        what = "negative lower endpoint" if lo == 0 else f"lower endpoint below {lo:g}"
        warnings.append(f"{label}: accurate envelope has {what} ({env.inf!r})")
    if env.sup > hi:
        warnings.append(f"{label}: accurate envelope exceeds upper range bound {hi:g} ({env.sup!r})")
    return warnings


def _args_text(args: Iterable[Interval]) -> str:
    return "(" + ", ".join(format_interval(a) for a in args) + ")"


# rendering ---------------------------------------------------------------

def render_table(report: Report) -> str:
    functions = sorted({f for f, _ in report.counts})
    levels = list(reversed(Level))
    head = f"{'function':<10}" + "".join(f"{str(lvl):>15}" for lvl in levels) + f"{'total':>8}"
    lines = [head, "-" * len(head)]
    for f in functions:
        c = report.level_counts(f)
        lines.append(f"{f:<10}" + "".join(f"{c[lvl]:>15}" for lvl in levels) + f"{sum(c.values()):>8}")
    lines.append("-" * len(head))
    c = report.level_counts()
    lines.append(f"{'all':<10}" + "".join(f"{c[lvl]:>15}" for lvl in levels) + f"{report.total:>8}")
    verdict = "upheld" if report.claim_upheld else "NOT upheld"
    lines.append(f"claimed mode: {report.claimed_mode} -> {verdict}")
    if report.faults:
        lines.append(f"faults: {report.faults}")
    for o in report.failures[:20]:
        lines.append(f"  below claim #{o.index}: {o.pair.f}{_args_text(o.pair.x)} got {o.verdict.level}: "
                     f"{_interval_or_none(o.verdict.z)} {o.verdict.note}".rstrip())
    if report.range_warnings:
        lines.append(f"range warnings: {len(report.range_warnings)}")
    for w in report.range_warnings[:10]:
        lines.append(f"  {w}")
    if len(report.range_warnings) > 10:
        lines.append(f"  ... {len(report.range_warnings) - 10} more in the records output")
    return "\n".join(lines)


def _interval_or_none(z: Interval | None) -> str:
    return "-" if z is None else format_interval(z)


def render_records(report: Report) -> str:
    """Key/value records, one line per pair outcome, then a summary line."""
    lines = []
    for o in report.outcomes:
        p = o.pair
        fields = {
            "index": o.index,
            "function": p.f,
            "format": p.y.fmt.name,
            "x": ";".join(format_interval(a) for a in p.x),
            "y": format_interval(p.y),
            "y_prime": "-" if p.y_prime is None else format_interval(p.y_prime),
            "z": _interval_or_none(o.verdict.z),
            "level": str(o.verdict.level),
        }
        if p.tag:
            fields["tag"] = p.tag.replace(" ", "_")
        if o.verdict.note:
            fields["note"] = o.verdict.note.replace(" ", "_")
        lines.append("outcome " + " ".join(f"{k}={v}" for k, v in fields.items()))
    for w in report.range_warnings:
        lines.append("range_warning message=" + w.replace(" ", "_"))
    c = report.level_counts()
    summary = {
        "total": report.total,
        **{str(lvl): c[lvl] for lvl in Level},
        "claimed": str(report.claimed_mode),
        "claim_upheld": str(report.claim_upheld).lower(),
        "faults": report.faults,
        "range_warnings": len(report.range_warnings),
    }
    lines.append("summary " + " ".join(f"{k}={v}" for k, v in summary.items()))
    return "\n".join(lines) + "\n"
