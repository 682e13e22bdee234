"""Event-stream files, signal normalization, synthetic scenarios and time shifts.

Stream file layout (UTF-8, one event per line, trailing newline)::

    time,kind,antigen_type,danger,safe
    0.25,antigen,nmap,,
    1.0,signal,,15.0,21.8

Numbers are written in plain positional notation using the shortest
digits that round-trip, so ``parse_stream(write_stream(s)) == s``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

from ddca.core import SIGNAL_MAX, AntigenEvent, Event, SignalInstance

logger = logging.getLogger(__name__)

STREAM_HEADER = "time,kind,antigen_type,danger,safe"
RESULTS_HEADER = "antigen_type,presented,mature,mcav,k_alpha,mcav_class,k_class"
STATS_HEADER = (
    "num_cells,lifespan_limit,i_s,i_bar,mean_incarnations,t_k,mcav_threshold,wall_time_ms"
)
NA = "NA"
_FORBIDDEN_LABEL_CHARS = frozenset(",\r\n")


class StreamFormatError(ValueError):
    """Raised for unreadable or out-of-order stream input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class EventStream:
    events: list[Event] = field(default_factory=list)
    source: str = field(default="", compare=False)
    seed: int | None = field(default=None, compare=False)
    bounds: tuple[float, float] = field(default=(0.0, SIGNAL_MAX), compare=False)
    clamp_warnings: int = field(default=0, compare=False)
    dropped_signals: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def signals(self) -> list[SignalInstance]:
        return [e for e in self.events if isinstance(e, SignalInstance)]

    @property
    def antigens(self) -> list[AntigenEvent]:
        return [e for e in self.events if isinstance(e, AntigenEvent)]


def format_number(x: float) -> str:
    """Shortest round-trip decimal, never in exponent notation."""
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0:
        return "0.0"
    text = format(Decimal(repr(x)), "f")
    if "." not in text:
        text += ".0"
    return text


def clamp_signal(value: float, hi: float = SIGNAL_MAX) -> tuple[float, bool]:
    """Saturate into ``[0, hi]``; the flag reports whether clamping happened."""
    if value < 0.0:
        return 0.0, True
    if value > hi:
        return hi, True
    return value + 0.0, False


def _order_key(event: Event) -> tuple[float, int]:
    return (event.time, 0 if isinstance(event, AntigenEvent) else 1)


def sort_events(events: Sequence[Event]) -> list[Event]:
    """Stable time sort with antigen ahead of signals at equal timestamps."""
    return sorted(events, key=_order_key)


def validate_events(events: Sequence[Event]) -> None:
    prev = None
    for i, ev in enumerate(events):
        if not isinstance(ev, (AntigenEvent, SignalInstance)):
            raise TypeError(f"event {i} has unknown kind {type(ev).__name__}")
        if ev.time < 0:
            raise ValueError(f"event {i} has negative time {ev.time}")
        if prev is not None and _order_key(ev) < _order_key(prev):
            raise ValueError(f"event {i} breaks stream order at time {ev.time}")
        prev = ev


def _parse_float(text: str, what: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise StreamFormatError(f"bad {what} value {text!r}", lineno) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise StreamFormatError(f"non-finite {what} value {text!r}", lineno)
    return value


def parse_stream(text: str, source: str = "", max_signal: float = SIGNAL_MAX) -> EventStream:
    """Parse stream text; out-of-range signal values are clamped and counted.

    Equal-timestamp events are reordered so antigen comes first; a strictly
    decreasing timestamp is an error.
    """
    lines = text.splitlines()
    if not lines:
        return EventStream(source=source)
    if lines[0].strip() != STREAM_HEADER:
        raise StreamFormatError(f"expected header {STREAM_HEADER!r}", 1)

    events: list[Event] = []
    warnings = 0
    last_time = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise StreamFormatError(f"expected 5 fields, got {len(fields)}", lineno)
        t_text, kind, label, d_text, s_text = fields
        t = _parse_float(t_text, "time", lineno)
        if t < 0:
            raise StreamFormatError(f"negative time {t_text}", lineno)
        if last_time is not None and t < last_time:
            raise StreamFormatError(f"time {t_text} decreases (previous {last_time})", lineno)
        last_time = t
        if kind == "antigen":
            if not label or d_text or s_text:
                raise StreamFormatError("antigen rows need a label and no signal values", lineno)
            events.append(AntigenEvent(t, label))
        elif kind == "signal":
            if label:
                raise StreamFormatError("signal rows must leave antigen_type empty", lineno)
            danger, d_clamped = clamp_signal(_parse_float(d_text, "danger", lineno), max_signal)
            safe, s_clamped = clamp_signal(_parse_float(s_text, "safe", lineno), max_signal)
            if d_clamped or s_clamped:
                warnings += d_clamped + s_clamped
                logger.warning("line %d: signal clamped into [0, %s]", lineno, max_signal)
            events.append(SignalInstance(t, danger, safe))
        else:
            raise StreamFormatError(f"unknown event kind {kind!r}", lineno)

    return EventStream(
        events=sort_events(events),
        source=source,
        bounds=(0.0, max_signal),
        clamp_warnings=warnings,
    )


def read_stream(path, max_signal: float = SIGNAL_MAX) -> EventStream:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_stream(fh.read(), source=str(path), max_signal=max_signal)


def write_stream(stream: EventStream | Sequence[Event]) -> str:
    events = stream.events if isinstance(stream, EventStream) else stream
    out = [STREAM_HEADER]
    for ev in events:
        if isinstance(ev, AntigenEvent):
            if _FORBIDDEN_LABEL_CHARS.intersection(ev.antigen_type):
                raise ValueError(f"antigen label {ev.antigen_type!r} cannot be written")
            out.append(f"{format_number(ev.time)},antigen,{ev.antigen_type},,")
        else:
            out.append(
                f"{format_number(ev.time)},signal,,"
                f"{format_number(ev.danger)},{format_number(ev.safe)}"
            )
    return "\n".join(out) + "\n"


def _fmt_opt(x) -> str:
    return NA if x is None else format_number(x)


def write_results(reports) -> str:
    """Results table, one row per antigen type. Absent scores become ``NA``."""
    out = [RESULTS_HEADER]
    for r in reports:
        out.append(
            ",".join(
                [
                    r.antigen_type,
                    str(r.presented_total),
                    str(r.mature_count),
                    _fmt_opt(r.mcav),
                    _fmt_opt(r.k_alpha),
                    r.mcav_class or NA,
                    r.k_class or NA,
                ]
            )
        )
    return "\n".join(out) + "\n"


def write_run_stats(config, thresholds, mean_incarnations, wall_time_ms) -> str:
    row = [
        str(config.num_cells),
        format_number(config.lifespan_limit),
        str(thresholds.i_s),
        _fmt_opt(thresholds.i_bar),
        _fmt_opt(mean_incarnations),
        _fmt_opt(thresholds.t_k),
        _fmt_opt(thresholds.mcav_threshold),
        _fmt_opt(wall_time_ms),
    ]
    return STATS_HEADER + "\n" + ",".join(row) + "\n"


def parse_results(text: str) -> list[dict]:
    """Read a results table back into plain dicts (``NA`` becomes None)."""
    lines = text.splitlines()
    if not lines or lines[0] != RESULTS_HEADER:
        raise StreamFormatError(f"expected header {RESULTS_HEADER!r}", 1)
    keys = RESULTS_HEADER.split(",")
    rows = []
    for line in lines[1:]:
        vals = line.split(",")
        row = dict(zip(keys, vals))
        for key in ("presented", "mature"):
            row[key] = int(row[key])
        for key in ("mcav", "k_alpha"):
            row[key] = None if row[key] == NA else float(row[key])
        for key in ("mcav_class", "k_class"):
            row[key] = None if row[key] == NA else row[key]
        rows.append(row)
    return rows


def shift_signals(stream: EventStream, offset: float) -> EventStream:
    """Move every signal instance by ``offset`` seconds, leaving antigen in place.

    Signals that land before time zero are dropped and counted in
    ``dropped_signals``.
    """
    shifted: list[Event] = []
    dropped = 0
    for ev in stream.events:
        if isinstance(ev, SignalInstance):
            t = ev.time + offset
            if t < 0:
                dropped += 1
                continue
            shifted.append(SignalInstance(t, ev.danger, ev.safe))
        else:
            shifted.append(ev)
    return EventStream(
        events=sort_events(shifted),
        source=stream.source,
        seed=stream.seed,
        bounds=stream.bounds,
        dropped_signals=stream.dropped_signals + dropped,
    )
