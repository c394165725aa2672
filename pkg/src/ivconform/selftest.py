"""Checks on the checker itself.

Rounding primitives are looked up through the :mod:`ivconform.rounding`
module at call time, so a patched ``next_up`` (or a flush-to-zero stand-in)
is what gets tested.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import kernel, oracle, rounding
from .formats import BINARY32, BINARY64
from .interval import BASIC_FUNCTIONS, Interval, InvalidInterval, make, to_decimal
from .pairgen import NextOutCase, SuiteSpec, gen_nextout_suite, nextout_input, random_args

SIN_ENVELOPE = "[-1.0000000000000003e0,1.0000000000000003e0]"
EXP_ENVELOPE = "[-4.9406564584124655e-324,1.0000000000000005e0]"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok  " if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def _nextout_case_ok(case: NextOutCase) -> bool:
    try:
        x = nextout_input(case)
    except InvalidInterval:
        return case.expected is None
    if case.expected is None:
        return False
    got = rounding.next_out(x)
    if got != case.expected:
        return False
    if case.mirror is not None:
        a, b = case.mirror
        return got == -rounding.next_out(Interval(a, b, case.fmt))
    return True


def nextout_checks(n_random: int = 500, seed: int = 0) -> list[Check]:
    checks = []
    for fmt in (BINARY32, BINARY64):
        by_category: dict[str, list[NextOutCase]] = {}
        for case in gen_nextout_suite(fmt, n_random, seed):
            by_category.setdefault(case.category, []).append(case)
        for category, cases in by_category.items():
            bad = [c for c in cases if not _nextout_case_ok(c)]
            detail = f"{len(cases)} cases"
            if bad:
                c = bad[0]
                detail = f"{len(bad)} of {len(cases)} cases wrong, first [{c.inf!r}, {c.sup!r}]"
            checks.append(Check(f"nextOut {fmt.name} {category}", not bad, detail))
    return checks


def nextout_property_checks(n: int = 2000, seed: int = 0) -> list[Check]:
    """Symmetry, widening and involution on random finite values."""
    rng = random.Random(f"properties:{seed}")
    checks = []
    for fmt in (BINARY32, BINARY64):
        k_max = rounding.ordered_key(fmt.max_finite, fmt)
        failures = {"symmetry": 0, "widening": 0, "involution": 0}
        for _ in range(n):
            a, b = sorted(rounding.from_ordered_key(rng.randint(-k_max, k_max), fmt) for _ in range(2))
            x = make(a, b, fmt)
            out = rounding.next_out(x)
            failures["symmetry"] += rounding.next_out(-x) != -out
            failures["widening"] += not (x.subset(out) and out.inf < a and out.sup > b)
            failures["involution"] += rounding.next_down(rounding.next_up(a, fmt), fmt) != a
        for prop, bad in failures.items():
            checks.append(Check(f"nextOut {fmt.name} {prop} property", bad == 0, f"{bad} of {n} failed" if bad else f"{n} values"))
    return checks


def oracle_rational_checks(n: int = 40, seed: int = 0) -> list[Check]:
    """Kernel hulls against exact rational hulls, and oracle points against exact rounding."""
    checks = []
    for fmt in (BINARY32, BINARY64):
        for f in BASIC_FUNCTIONS:
            spec = SuiteSpec(f, fmt, n_random=n, seed=seed, include_specials=False)
            bad = []
            for i in range(n):
                args = random_args(spec, i)
                if kernel.evaluate(f, args) != oracle.tightest_hull(f, args):
                    bad.append(args)
                pts = tuple(a.inf for a in args)
                if f not in ("sqrt", "div", "recip") or all(p > 0 for p in pts):
                    exact = _exact_point(f, pts)
                    for d in (rounding.DOWN, rounding.UP):
                        if exact is not None and oracle.directed_point(f, pts, d, fmt) != rounding.round_to_format(exact, fmt, d):
                            bad.append(pts)
            detail = f"{n} random inputs" if not bad else f"{len(bad)} mismatches, first {bad[0]!r}"
            checks.append(Check(f"oracle vs rational {fmt.name} {f}", not bad, detail))
    return checks


def _exact_point(f: str, pts) -> Fraction | None:
    if any(p in (float("inf"), float("-inf")) for p in pts):
        return None
    xs = [Fraction(p) for p in pts]
    exact = {
        "neg": lambda: -xs[0],
        "add": lambda: xs[0] + xs[1],
        "sub": lambda: xs[0] - xs[1],
        "mul": lambda: xs[0] * xs[1],
        "div": lambda: xs[0] / xs[1],
        "recip": lambda: 1 / xs[0],
        "sqr": lambda: xs[0] * xs[0],
        "fma": lambda: xs[0] * xs[1] + xs[2],
    }
    return exact[f]() if f in exact else None


def envelope_checks() -> list[Check]:
    checks = []
    for f, x, want in (("sin", make(0.0, 10.0), SIN_ENVELOPE), ("exp", make(-1e9, 0.0), EXP_ENVELOPE)):
        try:
            got = to_decimal(oracle.accurate_envelope(f, x))
        except Exception as exc:  # report, do not crash the self-test
            got = f"error: {exc}"
        checks.append(Check(f"{f} envelope", got == want, got if got == want else f"got {got}, want {want}"))
    return checks


def run_selftest(n_random: int = 500, seed: int = 0) -> list[Check]:
    return (nextout_checks(n_random, seed) + nextout_property_checks(seed=seed)
            + oracle_rational_checks(seed=seed) + envelope_checks())
