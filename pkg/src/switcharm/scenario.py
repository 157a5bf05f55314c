"""Scenario scripts: parsing, formatting, and checking assertions against traces.

Line-oriented grammar, ``#`` starts a comment::

    dt <seconds>
    duration <seconds>
    param <name> <value>
    at <t> press <SWITCH>            SWITCH: ELBOW_UP | ELBOW_DOWN | GRIP
    at <t> release <SWITCH>
    at <t> set-payload <kg>
    at <t> place-object <size_m> <stiffness_N_per_m>
    expect <t> <field> <min> <max>   inclusive range
    expect <t> <field> = <TOKEN>

Without a ``duration`` line the scenario lasts 1 s; without ``dt`` the run
uses the configured tick.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .config import CONFIG_KEYS, parse_number, value_kind
from .controller import ElbowState, GripState
from .trace import Trace, TraceSample

DEFAULT_DURATION = 1.0  # s
TIME_EPS = 1e-9  # fraction of a tick

SWITCHES = ("ELBOW_UP", "ELBOW_DOWN", "GRIP")
NUMERIC_FIELDS = ("theta", "omega", "aperture", "grip_current", "adc_code", "comparator")
ENUM_FIELDS = {
    "elbow_state": tuple(s.value for s in ElbowState),
    "grip_state": tuple(s.value for s in GripState),
    "comparator": ("0", "1", "TRUE", "FALSE"),
}
FIELDS = NUMERIC_FIELDS + ("elbow_state", "grip_state")
SCENARIO_PARAM_KEYS = CONFIG_KEYS - {"dt"}


class EventKind(enum.Enum):
    PRESS = "press"
    RELEASE = "release"
    SET_PAYLOAD = "set-payload"
    PLACE_OBJECT = "place-object"


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    args: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assertion:
    time: float
    field: str
    min: Optional[float] = None
    max: Optional[float] = None
    token: Optional[str] = None
    line: int = field(default=0, compare=False)

    @property
    def is_enum(self) -> bool:
        return self.token is not None


@dataclass(frozen=True)
class Scenario:
    duration: float = DEFAULT_DURATION
    dt: Optional[float] = None
    params: dict = field(default_factory=dict)
    events: tuple[Event, ...] = ()
    assertions: tuple[Assertion, ...] = ()


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class ScenarioError(ValueError):
    """Raised with every diagnostic found in a script."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


_TOKEN = re.compile(r"\S+")


class _Parser:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []
        self.dt: Optional[float] = None
        self.duration: Optional[float] = None
        self.duration_line = 0
        self.params: dict[str, object] = {}
        self.events: list[Event] = []
        self.assertions: list[Assertion] = []
        self.time_cols: dict[int, int] = {}

    def error(self, line: int, col: int, msg: str) -> None:
        self.diags.append(Diagnostic(line, col, msg))

    def number(self, lineno: int, tok: tuple[int, str], what: str, *, positive=False,
               nonneg=False) -> Optional[float]:
        col, text = tok
        try:
            value = float(text)
        except ValueError:
            self.error(lineno, col, f"malformed number {text!r} for {what}")
            return None
        if not math.isfinite(value):
            self.error(lineno, col, f"{what} must be finite, got {text!r}")
            return None
        if positive and value <= 0:
            self.error(lineno, col, f"{what} must be > 0, got {text}")
            return None
        if nonneg and value < 0:
            self.error(lineno, col, f"{what} must be >= 0, got {text}")
            return None
        return value

    def arity(self, lineno: int, toks: list, n: int, usage: str) -> bool:
        if len(toks) != n:
            col = toks[n][0] if len(toks) > n else toks[-1][0] + len(toks[-1][1])
            self.error(lineno, col, f"expected '{usage}'")
            return False
        return True

    def parse_line(self, lineno: int, toks: list[tuple[int, str]]) -> None:
        head = toks[0][1]
        if head in ("dt", "duration"):
            if not self.arity(lineno, toks, 2, f"{head} <seconds>"):
                return
            if (self.dt if head == "dt" else self.duration) is not None:
                self.error(lineno, toks[0][0], f"duplicate {head} directive")
                return
            value = self.number(lineno, toks[1], head, positive=True)
            if value is None:
                return
            if head == "dt":
                self.dt = value
            else:
                self.duration, self.duration_line = value, lineno
        elif head == "param":
            self.parse_param(lineno, toks)
        elif head == "at":
            self.parse_event(lineno, toks)
        elif head == "expect":
            self.parse_expect(lineno, toks)
        else:
            self.error(lineno, toks[0][0], f"unknown directive {head!r}")

    def parse_param(self, lineno: int, toks: list) -> None:
        if not self.arity(lineno, toks, 3, "param <name> <value>"):
            return
        (kcol, key), (vcol, text) = toks[1], toks[2]
        if key not in SCENARIO_PARAM_KEYS:
            self.error(lineno, kcol, f"unknown parameter {key!r}")
            return
        if key in self.params:
            self.error(lineno, kcol, f"duplicate parameter {key!r}")
            return
        kind = "float" if "." in key else value_kind(key)
        if kind == "motor":
            self.params[key] = text
            return
        try:
            self.params[key] = parse_number(text, kind)
        except ValueError:
            self.error(lineno, vcol, f"malformed value {text!r} for parameter {key}")

    def parse_event(self, lineno: int, toks: list) -> None:
        if len(toks) < 3:
            self.error(lineno, toks[-1][0] + len(toks[-1][1]), "expected 'at <t> <action> ...'")
            return
        t = self.number(lineno, toks[1], "event time", nonneg=True)
        acol, action = toks[2]
        try:
            kind = EventKind(action)
        except ValueError:
            self.error(lineno, acol, f"unknown action {action!r}")
            return
        if kind in (EventKind.PRESS, EventKind.RELEASE):
            if not self.arity(lineno, toks, 4, f"at <t> {action} <SWITCH>"):
                return
            scol, switch = toks[3]
            if switch not in SWITCHES:
                self.error(lineno, scol, f"unknown switch {switch}")
                return
            args: tuple = (switch,)
        elif kind is EventKind.SET_PAYLOAD:
            if not self.arity(lineno, toks, 4, "at <t> set-payload <kg>"):
                return
            mass = self.number(lineno, toks[3], "payload mass", nonneg=True)
            if mass is None:
                return
            args = (mass,)
        else:
            if not self.arity(lineno, toks, 5, "at <t> place-object <size_m> <stiffness_N_per_m>"):
                return
            size = self.number(lineno, toks[3], "object size", nonneg=True)
            stiffness = self.number(lineno, toks[4], "object stiffness", positive=True)
            if size is None or stiffness is None:
                return
            args = (size, stiffness)
        if t is not None:
            self.add(self.events, Event(t, kind, args, line=lineno), toks[1][0])

    def parse_expect(self, lineno: int, toks: list) -> None:
        if len(toks) < 4:
            self.error(lineno, toks[-1][0] + len(toks[-1][1]),
                       "expected 'expect <t> <field> <min> <max>' or 'expect <t> <field> = <TOKEN>'")
            return
        t = self.number(lineno, toks[1], "assertion time", nonneg=True)
        fcol, name = toks[2]
        if name not in FIELDS:
            self.error(lineno, fcol, f"unknown field {name!r}")
            return
        if toks[3][1] == "=":
            if not self.arity(lineno, toks, 5, f"expect <t> {name} = <TOKEN>"):
                return
            tcol, token = toks[4]
            allowed = ENUM_FIELDS.get(name)
            if allowed is None:
                self.error(lineno, toks[3][0], f"field {name} takes a '<min> <max>' range")
                return
            if token not in allowed:
                self.error(lineno, tcol, f"invalid token {token!r} for {name}; expected one of {', '.join(allowed)}")
                return
            if t is not None:
                self.add(self.assertions, Assertion(t, name, token=token, line=lineno), toks[1][0])
            return
        if not self.arity(lineno, toks, 5, f"expect <t> {name} <min> <max>"):
            return
        if name not in NUMERIC_FIELDS:
            self.error(lineno, toks[3][0], f"field {name} takes '= <TOKEN>'")
            return
        lo = self.number(lineno, toks[3], "range minimum")
        hi = self.number(lineno, toks[4], "range maximum")
        if lo is not None and hi is not None and lo > hi:
            self.error(lineno, toks[3][0], f"empty range: min {lo} > max {hi}")
            return
        if t is not None and lo is not None and hi is not None:
            self.add(self.assertions, Assertion(t, name, min=lo, max=hi, line=lineno), toks[1][0])

    def add(self, items: list, item, time_col: int) -> None:
        items.append(item)
        self.time_cols[id(item)] = time_col

    def finish(self) -> Scenario:
        duration = self.duration if self.duration is not None else DEFAULT_DURATION
        for item in (*self.events, *self.assertions):
            if item.time > duration:
                self.error(item.line, self.time_cols[id(item)],
                           f"time {item.time:g} is beyond the scenario duration {duration:g}")
        if self.diags:
            self.diags.sort(key=lambda d: (d.line, d.column))
            raise ScenarioError(self.diags)
        return Scenario(
            duration=duration,
            dt=self.dt,
            params=dict(self.params),
            events=tuple(sorted(self.events, key=lambda e: e.time)),
            assertions=tuple(sorted(self.assertions, key=lambda a: a.time)),
        )


def parse_scenario(text: str) -> Scenario:
    """Parse a script, raising ``ScenarioError`` with every diagnostic found.

    Events and assertions are stably sorted by time.
    """
    parser = _Parser()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]
        if toks:
            parser.parse_line(lineno, toks)
    return parser.finish()


def format_scenario(scenario: Scenario) -> str:
    """Render a scenario back to script text that parses to an equal value."""
    lines = []
    if scenario.dt is not None:
        lines.append(f"dt {scenario.dt!r}")
    lines.append(f"duration {scenario.duration!r}")
    for key, value in scenario.params.items():
        text = "none" if value is None else value if isinstance(value, str) else repr(value)
        lines.append(f"param {key} {text}")
    for ev in scenario.events:
        args = " ".join(a if isinstance(a, str) else repr(a) for a in ev.args)
        lines.append(f"at {ev.time!r} {ev.kind.value} {args}")
    for a in scenario.assertions:
        if a.is_enum:
            lines.append(f"expect {a.time!r} {a.field} = {a.token}")
        else:
            lines.append(f"expect {a.time!r} {a.field} {a.min!r} {a.max!r}")
    return "\n".join(lines) + "\n"


def time_to_tick(t: float, dt: float) -> int:
    """First tick index whose time k*dt is at or after ``t``."""
    return max(0, math.ceil(t / dt - TIME_EPS))


@dataclass(frozen=True)
class AssertionResult:
    assertion: Assertion
    passed: bool
    observed: object  # None when there is no sample
    message: str = ""

    @property
    def line(self) -> int:
        return self.assertion.line


@dataclass(frozen=True)
class AssertionReport:
    results: tuple[AssertionResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def format(self) -> str:
        out = []
        for r in self.results:
            a = r.assertion
            want = f"= {a.token}" if a.is_enum else f"in [{a.min:g}, {a.max:g}]"
            status = "PASS" if r.passed else "FAIL"
            seen = r.message if r.observed is None else f"observed {r.observed}"
            out.append(f"line {a.line}: {status} t={a.time:g} {a.field} {want} ({seen})")
        out.append(f"{sum(r.passed for r in self.results)}/{len(self.results)} assertions passed")
        return "\n".join(out)


def observe(sample: TraceSample, name: str):
    if name == "elbow_state":
        return sample.elbow_fsm.value
    if name == "grip_state":
        return sample.grip_fsm.value
    if name == "comparator":
        return int(sample.comparator)
    return getattr(sample, name)


def _check(a: Assertion, sample: TraceSample) -> AssertionResult:
    value = observe(sample, a.field)
    if a.is_enum:
        token = a.token
        if a.field == "comparator":
            token = "1" if token in ("1", "TRUE") else "0"
            ok = str(value) == token
        else:
            ok = value == token
    else:
        ok = a.min <= value <= a.max
    return AssertionResult(a, ok, value)


def evaluate_assertions(trace: Trace, scenario: Scenario) -> AssertionReport:
    """Check each assertion against the first sample at or after its time."""
    results = []
    for a in scenario.assertions:
        tick = time_to_tick(a.time, trace.dt)
        index = -(-tick // trace.stride)
        if index >= len(trace.samples):
            results.append(AssertionResult(a, False, None, "no sample"))
        else:
            results.append(_check(a, trace.samples[index]))
    return AssertionReport(tuple(results))
