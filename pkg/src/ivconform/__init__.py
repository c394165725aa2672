"""Interval conformance testing: reference kernel, oracle and checker."""

from ._version import __version__
from .conformance import Level, Report, TestingPair, Verdict, check_claim, classify, run_suite
from .formats import BINARY32, BINARY64, Format, get_format
from .interval import Interval, InvalidInterval, empty, entire, make, point, to_decimal
from .oracle import (
    DomainViolation,
    OracleConfig,
    PrecisionExhausted,
    accurate_envelope,
    sin_extrema_scan,
    tightest_hull,
)
from .rounding import DOWN, UP, next_down, next_out, next_up, round_to_format

__all__ = [
    "BINARY32",
    "BINARY64",
    "DOWN",
    "DomainViolation",
    "Format",
    "Interval",
    "InvalidInterval",
    "Level",
    "OracleConfig",
    "PrecisionExhausted",
    "Report",
    "TestingPair",
    "UP",
    "Verdict",
    "__version__",
    "accurate_envelope",
    "check_claim",
    "classify",
    "empty",
    "entire",
    "get_format",
    "make",
    "next_down",
    "next_out",
    "next_up",
    "point",
    "round_to_format",
    "run_suite",
    "sin_extrema_scan",
    "tightest_hull",
    "to_decimal",
]
