"""Line protocol between the checker and an implementation under test.

Each message is one line of UTF-8 text; intervals use the hex encoding of
:mod:`ivconform.hexio`::

    checker -> adapter             adapter -> checker
    HELLO                          IVCONFORM-ADAPTER 1
                                   FUNCS <fn>,<fn>,...
                                   FORMATS <fmt>,...
                                   MODE <fn> tightest|accurate|valid   (one per fn)
                                   REENTRANT yes|no
                                   READY
    EVAL <fn> <fmt> <interval>...  RES <interval> | ERR <message>
    BYE                            BYE

The adapter answers every EVAL with exactly one line. Anything else (a
malformed reply, a timeout, the process exiting) is a fault.
"""

from __future__ import annotations

import queue
import shlex
import struct
import subprocess
import sys
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

from . import kernel
from .conformance import SuiteAborted
from .formats import BINARY32, BINARY64, Format, get_format
from .hexio import format_interval, parse_interval
from .interval import BASIC_FUNCTIONS, ELEMENTARY_FUNCTIONS, INF, Interval
from .rounding import next_down, next_up

PROTOCOL = "IVCONFORM-ADAPTER 1"
ALL_FUNCTIONS = (*BASIC_FUNCTIONS, *ELEMENTARY_FUNCTIONS)


class AdapterFault(RuntimeError):
    """The adapter misbehaved on one request."""


class HandshakeError(SuiteAborted):
    pass


class FaultBudgetExceeded(SuiteAborted):
    pass


# built-in implementations ---------------------------------------------------

def _to_b32(v: float, outward: int) -> float:
    """Nearest binary32 value, then one more step in direction ``outward``."""
    if v in (INF, -INF):
        return v
    try:
        near = struct.unpack("<f", struct.pack("<f", v))[0]
    except OverflowError:
        near = (BINARY32.max_finite if v > 0 else -BINARY32.max_finite)
    return next_up(near, BINARY32) if outward > 0 else next_down(near, BINARY32)


def naive32_evaluate(f: str, args: Sequence[Interval]) -> Interval:
    """A deliberately loose binary32 library.

    cbrt and atanh are computed in binary64 and narrowed to binary32 by
    rounding to nearest and then widening one ulp, which always encloses the
    true hull but usually misses it by one step. Everything else is the
    reference kernel.
    """
    args = tuple(args)
    if f in ("cbrt", "atanh") and args[0].fmt == BINARY32:
        x = args[0]
        wide = kernel.evaluate(f, (Interval(x.inf, x.sup, BINARY64),))
        if wide.is_empty:
            return Interval(INF, -INF, BINARY32)
        return Interval(_to_b32(wide.inf, -1), _to_b32(wide.sup, +1), BINARY32)
    return kernel.evaluate(f, args)


@dataclass(frozen=True)
class Implementation:
    name: str
    evaluate: Callable[[str, Sequence[Interval]], Interval]
    modes: dict[str, str]
    formats: tuple[Format, ...] = (BINARY32, BINARY64)
    reentrant: bool = True


BUILTIN = Implementation("builtin", kernel.evaluate, dict(kernel.MODES))
# naive32 claims tightest everywhere; the checker is there to catch it
NAIVE32 = Implementation("naive32", naive32_evaluate, {f: "tightest" for f in ALL_FUNCTIONS})
IMPLEMENTATIONS = {impl.name: impl for impl in (BUILTIN, NAIVE32)}


# server side -----------------------------------------------------------------

def handle_line(impl: Implementation, line: str) -> list[str]:
    """Reply lines for one request line."""
    parts = line.split()
    if not parts:
        return ["ERR empty request"]
    cmd = parts[0]
    if cmd == "HELLO":
        out = [PROTOCOL, "FUNCS " + ",".join(impl.modes), "FORMATS " + ",".join(f.name for f in impl.formats)]
        out += [f"MODE {f} {m}" for f, m in impl.modes.items()]
        out += ["REENTRANT " + ("yes" if impl.reentrant else "no"), "READY"]
        return out
    if cmd == "BYE":
        return ["BYE"]
    if cmd != "EVAL":
        return [f"ERR unknown command {cmd}"]
    if len(parts) < 3:
        return ["ERR EVAL needs a function and a format"]
    try:
        fmt = get_format(parts[2])
        args = tuple(parse_interval(t, fmt) for t in parts[3:])
        z = impl.evaluate(parts[1], args)
    except Exception as exc:
        return [f"ERR {type(exc).__name__}: {exc}".replace("\n", " ")]
    return ["RES " + format_interval(z)]


def serve(impl: Implementation, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    for line in stdin:
        replies = handle_line(impl, line)
        stdout.write("\n".join(replies) + "\n")
        stdout.flush()
        if replies == ["BYE"]:
            break
    return 0


# client side ---------------------------------------------------------------

@dataclass
class Capabilities:
    functions: tuple[str, ...] = ()
    formats: tuple[str, ...] = ()
    modes: dict[str, str] = field(default_factory=dict)
    reentrant: bool = False


class AdapterHandle:
    """Drive an adapter subprocess; usable as ``evaluate(f, args)``.

    Each fault (timeout, malformed reply, ERR, exit) is raised as
    :class:`AdapterFault` and counted; once more than ``fault_budget`` faults
    have happened the next call raises :class:`FaultBudgetExceeded`. A
    timed-out or dead process is restarted before the next request.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 10.0, fault_budget: int = 5):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.fault_budget = fault_budget
        self.faults: list[str] = []
        self.capabilities = Capabilities()
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()

    # process management
    def start(self) -> Capabilities:
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, bufsize=1,
            )
        except OSError as exc:
            raise HandshakeError(f"cannot start adapter {self.command!r}: {exc}") from None
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc.stdout, self._lines), daemon=True).start()
        self.capabilities = self._handshake()
        return self.capabilities

    @staticmethod
    def _pump(stream, sink: queue.Queue) -> None:
        for line in stream:
            sink.put(line.rstrip("\n"))
        sink.put(None)

    def _send(self, line: str) -> None:
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError):
            raise AdapterFault("adapter closed its input") from None

    def _recv(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise AdapterFault(f"no reply within {self.timeout:g} s") from None
        if line is None:
            raise AdapterFault("adapter exited")
        return line

    def _handshake(self) -> Capabilities:
        caps = Capabilities()
        try:
            self._send("HELLO")
            first = self._recv()
            if first != PROTOCOL:
                raise HandshakeError(f"unexpected greeting {first!r}")
            while True:
                line = self._recv()
                key, _, rest = line.partition(" ")
                if key == "READY":
                    break
                if key == "FUNCS":
                    caps.functions = tuple(rest.split(","))
                elif key == "FORMATS":
                    caps.formats = tuple(rest.split(","))
                elif key == "MODE":
                    fn, _, mode = rest.partition(" ")
                    caps.modes[fn] = mode
                elif key == "REENTRANT":
                    caps.reentrant = rest == "yes"
                else:
                    raise HandshakeError(f"unexpected capability line {line!r}")
        except AdapterFault as exc:
            self.kill()
            raise HandshakeError(f"handshake failed: {exc}") from None
        except HandshakeError:
            self.kill()
            raise
        return caps

    def kill(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()

    def close(self) -> None:
        if self._proc is None:
            return
        if self._proc.poll() is None:
            try:
                self._send("BYE")
                self._proc.wait(timeout=self.timeout)
            except (AdapterFault, subprocess.TimeoutExpired):
                self.kill()
        self._proc = None

    def __enter__(self) -> AdapterHandle:
        if self._proc is None:
            self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # requests
    def _fault(self, reason: str) -> AdapterFault:
        self.faults.append(reason)
        return AdapterFault(reason)

    def __call__(self, f: str, args: Sequence[Interval]) -> Interval:
        if len(self.faults) > self.fault_budget:
            raise FaultBudgetExceeded(f"{len(self.faults)} adapter faults, budget is {self.fault_budget}")
        if self._proc is None or self._proc.poll() is not None:
            self.start()
        fmt = args[0].fmt
        try:
            self._send(f"EVAL {f} {fmt.name} " + " ".join(format_interval(a) for a in args))
            reply = self._recv()
        except AdapterFault as exc:
            self.kill()  # state unknown: restart on the next request
            raise self._fault(str(exc)) from None
        kind, _, body = reply.partition(" ")
        if kind == "ERR":
            raise self._fault(f"adapter error: {body}")
        if kind != "RES":
            raise self._fault(f"malformed reply {reply!r}")
        try:
            return parse_interval(body, fmt)
        except ValueError as exc:
            raise self._fault(f"malformed RES {body!r}: {exc}") from None

    evaluate = __call__


class AdapterPool:
    """Several handles on the same command, one pending request each.

    Only meaningful for adapters that declare themselves reentrant; faults
    are pooled against a single budget.
    """

    def __init__(self, command: str | Sequence[str], size: int, timeout: float = 10.0, fault_budget: int = 5):
        self.fault_budget = fault_budget
        self.handles = [AdapterHandle(command, timeout, fault_budget) for _ in range(max(1, size))]
        self._idle: queue.Queue = queue.Queue()

    @property
    def faults(self) -> list[str]:
        return [f for h in self.handles for f in h.faults]

    @property
    def capabilities(self) -> Capabilities:
        return self.handles[0].capabilities

    def start(self) -> Capabilities:
        for h in self.handles:
            h.start()
            self._idle.put(h)
        return self.capabilities

    def close(self) -> None:
        for h in self.handles:
            h.close()

    def __enter__(self) -> AdapterPool:
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __call__(self, f: str, args: Sequence[Interval]) -> Interval:
        if len(self.faults) > self.fault_budget:
            raise FaultBudgetExceeded(f"{len(self.faults)} adapter faults, budget is {self.fault_budget}")
        h = self._idle.get()
        try:
            return h(f, args)
        finally:
            self._idle.put(h)
