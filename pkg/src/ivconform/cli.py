"""Command-line front end.

Exit codes: 0 pass, 1 claim not upheld (or self-test failure), 2 usage,
I/O or parse error, 3 adapter handshake failure or fault budget exceeded,
4 oracle precision exhausted.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .adapter import IMPLEMENTATIONS, AdapterHandle, AdapterPool, serve
from .conformance import Level, SuiteAborted, render_records, render_table, run_suite
from .formats import get_format
from .interval import FUNCTIONS
from .oracle import OracleConfig, OracleStats, PrecisionExhausted
from .pairgen import ParseError, SuiteSpec, gen_function_suite, read_pairs_with_header, write_pairs
from .selftest import run_selftest

EXIT_OK = 0
EXIT_CLAIM = 1
EXIT_IO = 2
EXIT_ADAPTER = 3
EXIT_PRECISION = 4


def cmd_gen(args) -> int:
    try:
        cfg = OracleConfig.from_env()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    spec = SuiteSpec(args.fn, get_format(args.format), n_random=args.n, seed=args.seed,
                     include_specials=not args.no_specials)
    stats = OracleStats()
    try:
        pairs = gen_function_suite(spec, cfg, stats)
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ValueError as exc:  # oracle configuration
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    header = {"function": args.fn, "format": spec.fmt.name, "seed": str(args.seed), "random": str(args.n)}
    try:
        write_pairs(pairs, args.out if args.out != "-" else sys.stdout, header)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    hist = ",".join(f"{q}:{n}" for q, n in sorted(stats.q_histogram.items()))
    print(f"{len(pairs)} pairs for {args.fn} {spec.fmt.name}" + (f" -> {args.out}" if args.out != "-" else ""),
          file=sys.stderr if args.out == "-" else sys.stdout)
    print(f"oracle: endpoints={stats.endpoints} retries={stats.retries} max_q={stats.max_q} q_histogram={hist}",
          file=sys.stderr if args.out == "-" else sys.stdout)
    return EXIT_OK


def _declared_claim(modes: dict[str, str], functions) -> Level:
    levels = [Level.parse(modes.get(f, "valid")) for f in functions]
    return min(levels) if levels else Level.TIGHTEST


def cmd_check(args) -> int:
    try:
        pairs, _ = read_pairs_with_header(args.pairs)
    except ParseError as exc:
        print(f"parse error in {args.pairs}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    functions = sorted({p.f for p in pairs})
    handle = None
    try:
        if args.adapter:
            handle = AdapterHandle(args.adapter, args.timeout, args.fault_budget)
            caps = handle.start()
            workers = 1
            if caps.reentrant and args.workers > 1:
                handle.close()
                handle = AdapterPool(args.adapter, args.workers, args.timeout, args.fault_budget)
                caps = handle.start()
                workers = args.workers
            evaluate, modes = handle, caps.modes
        else:
            impl = IMPLEMENTATIONS[args.target]
            evaluate, modes, workers = impl.evaluate, impl.modes, args.workers
        claimed = Level.parse(args.claim) if args.claim else _declared_claim(modes, functions)
        report = run_suite(pairs, evaluate, claimed, workers=workers)
    except SuiteAborted as exc:
        print(f"adapter failure: {exc}", file=sys.stderr)
        return EXIT_ADAPTER
    finally:
        if handle is not None:
            handle.close()
    if not args.quiet:
        print(render_table(report))
    if args.records:
        try:
            with open(args.records, "w", encoding="utf-8") as fh:
                fh.write(render_records(report))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if report.claim_upheld else EXIT_CLAIM


def cmd_selftest(args) -> int:
    checks = run_selftest(args.n, args.seed)
    for c in checks:
        if c.passed and args.quiet:
            continue
        print(c.line())
    failed = [c for c in checks if not c.passed]
    if not any(c.name.endswith("envelope") and not c.passed for c in checks):
        print("range-violation envelopes reproduced")
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed: " + ", ".join(c.name for c in failed))
        return EXIT_CLAIM
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


def cmd_adapter(args) -> int:
    return serve(IMPLEMENTATIONS[args.implementation])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ivconform", description="Interval arithmetic conformance testing.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a testing-pair file")
    gen.add_argument("--fn", required=True, choices=sorted(FUNCTIONS))
    gen.add_argument("--format", default="b64", choices=["b32", "b64"])
    gen.add_argument("--n", type=int, default=100, help="number of random pairs (default 100)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-", help="output path, '-' for stdout")
    gen.add_argument("--no-specials", action="store_true", help="random pairs only")
    gen.set_defaults(func=cmd_gen)

    check = sub.add_parser("check", help="run a pair file against an implementation")
    check.add_argument("pairs")
    target = check.add_mutually_exclusive_group()
    target.add_argument("--target", choices=sorted(IMPLEMENTATIONS), default="builtin",
                        help="in-process implementation (default builtin)")
    target.add_argument("--adapter", metavar="CMD", help="adapter command line, spoken to over stdin/stdout")
    check.add_argument("--claim", choices=[str(lvl) for lvl in Level if lvl is not Level.NONCONFORMING],
                       help="mode to verify (default: what the implementation declares)")
    check.add_argument("--records", metavar="PATH", help="write key=value outcome records here")
    check.add_argument("--workers", type=int, default=1)
    check.add_argument("--timeout", type=float, default=10.0, help="per-request adapter timeout in seconds")
    check.add_argument("--fault-budget", type=int, default=5)
    check.add_argument("--quiet", action="store_true")
    check.set_defaults(func=cmd_check)

    st = sub.add_parser("selftest", help="check the rounding layer, oracle and reference envelopes")
    st.add_argument("--n", type=int, default=500, help="random nextOut cases per format")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--quiet", action="store_true", help="only print failures")
    st.set_defaults(func=cmd_selftest)

    ad = sub.add_parser("adapter", help="serve a built-in implementation over the adapter protocol")
    ad.add_argument("implementation", choices=sorted(IMPLEMENTATIONS))
    ad.set_defaults(func=cmd_adapter)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
