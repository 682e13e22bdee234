"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

import numbers

from ddca.core import SIGNAL_MAX, AntigenEvent, SignalInstance
from ddca.data import EventStream, clamp_signal, validate_events


def _as_event(row, max_signal: float):
    if isinstance(row, (AntigenEvent, SignalInstance)):
        return row, 0
    try:
        t, kind, label, danger, safe = row
    except (TypeError, ValueError):
        raise ValueError(
            f"cannot interpret {row!r} as an event; expected an event object or "
            "a (time, kind, antigen_type, danger, safe) row"
        ) from None
    if kind == "antigen":
        return AntigenEvent(float(t), str(label)), 0
    if kind == "signal":
        d, dc = clamp_signal(float(danger), max_signal)
        s, sc = clamp_signal(float(safe), max_signal)
        return SignalInstance(float(t), d, s), dc + sc
    raise ValueError(f"unknown event kind {kind!r}")


def check_event_stream(X, max_signal: float = SIGNAL_MAX) -> EventStream:
    """Coerce ``X`` into a validated :class:`EventStream`.

    Accepts an ``EventStream``, a sequence of event objects, or a sequence of
    ``(time, kind, antigen_type, danger, safe)`` rows. Row signals are
    clamped into ``[0, max_signal]``; event objects are taken as-is.
    """
    if isinstance(X, EventStream):
        validate_events(X.events)
        return X
    if isinstance(X, (str, bytes)):
        raise TypeError("expected events, got a string; use ddca.data.parse_stream for text")
    events = []
    clamped = 0
    for row in X:
        ev, n = _as_event(row, max_signal)
        events.append(ev)
        clamped += n
    validate_events(events)
    return EventStream(events=events, clamp_warnings=clamped, bounds=(0.0, max_signal))


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_positive_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be a positive number, got {value!r}")
    return float(value)
