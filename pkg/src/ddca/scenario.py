"""Seeded synthetic port-scan scenarios.

Randomness comes from a 64-bit linear congruential generator with fixed
constants (Knuth's MMIX multiplier and increment)::

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64
    uniform = (state >> 11) / 2**53

The generator is seeded with ``state = seed mod 2**64`` and is stepped
once before the first draw. Draw order is fixed: all signal jitter first
(danger then safe, per instance), then antigen for each process in the
order listed, second by second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ddca.core import SIGNAL_MAX, AntigenEvent, SignalInstance
from ddca.data import EventStream, clamp_signal, sort_events

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1

NORMAL_ROLE = "normal"
ANOMALOUS_ROLE = "anomalous"


class LCG:
    def __init__(self, seed: int):
        self.state = seed & _MASK
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (_MULT * self.state + _INC) & _MASK
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class ProcessSpec:
    """One antigen source: ``rate`` antigens per second inside each active window."""

    label: str
    rate: float
    windows: tuple[tuple[float, float], ...]
    role: str = NORMAL_ROLE
    background: bool = False


@dataclass(frozen=True)
class ScenarioSpec:
    duration: float = 38.0
    signal_period: float = 1.0
    processes: tuple[ProcessSpec, ...] = ()
    scan_window: tuple[float, float] = (12.0, 28.0)
    seed: int = 1
    max_signal: float = SIGNAL_MAX
    # mean (danger, safe) outside and inside the scan window
    quiet_levels: tuple[float, float] = (4.1, 31.8)
    scan_levels: tuple[float, float] = (30.0, 8.0)
    jitter: float = 3.0

    def validate(self) -> None:
        if not self.duration > 0:
            raise ValueError("scenario duration must be positive")
        if not self.signal_period > 0:
            raise ValueError("signal_period must be positive")
        if not self.processes:
            raise ValueError("scenario needs at least one process")
        roles = {p.role for p in self.processes}
        if not {NORMAL_ROLE, ANOMALOUS_ROLE} <= roles:
            raise ValueError("scenario needs at least one normal and one anomalous process")
        lo, hi = self.scan_window
        if not 0 <= lo <= hi <= self.duration:
            raise ValueError(f"scan window {self.scan_window} outside [0, {self.duration}]")
        for p in self.processes:
            if p.rate < 0:
                raise ValueError(f"process {p.label!r} has negative rate")
            if p.role not in (NORMAL_ROLE, ANOMALOUS_ROLE):
                raise ValueError(f"process {p.label!r} has unknown role {p.role!r}")


BACKGROUND_PROCESSES = 40
BACKGROUND_RATE = 15.0


def portscan_default(seed: int = 1) -> ScenarioSpec:
    """38 s session, 1 s signals, scan from 12 s to 28 s.

    nmap and its parent pts are active mainly around the scan; sshd and
    bash run for the whole session. Forty quiet background daemons bring
    the total to roughly 25,000 antigens so that large populations still
    receive antigen in every cell.
    """
    full = ((0.0, 38.0),)
    interest = (
        ProcessSpec("nmap", 40.0, ((12.0, 28.0),), ANOMALOUS_ROLE),
        ProcessSpec("pts", 15.0, ((10.0, 28.0),), ANOMALOUS_ROLE),
        ProcessSpec("bash", 10.0, full, NORMAL_ROLE),
        ProcessSpec("sshd", 10.0, full, NORMAL_ROLE),
    )
    background = tuple(
        ProcessSpec(f"bg{i:02d}", BACKGROUND_RATE, full, NORMAL_ROLE, background=True)
        for i in range(BACKGROUND_PROCESSES)
    )
    return ScenarioSpec(
        duration=38.0,
        signal_period=1.0,
        scan_window=(12.0, 28.0),
        seed=seed,
        processes=interest + background,
    )


def processes_of_interest(spec: ScenarioSpec) -> dict[str, str]:
    """Label -> role for the non-background processes."""
    return {p.label: p.role for p in spec.processes if not p.background}


SCENARIOS = {"portscan-default": portscan_default}


def _in_windows(t: float, windows) -> bool:
    return any(lo <= t < hi for lo, hi in windows)


def generate_signals(spec: ScenarioSpec, rng: LCG) -> list[SignalInstance]:
    n = int(math.floor(spec.duration / spec.signal_period + 1e-9))
    lo, hi = spec.scan_window
    signals = []
    for i in range(1, n + 1):
        t = i * spec.signal_period
        # the instance at t summarizes the period ending at t
        d_mean, s_mean = spec.scan_levels if lo < t <= hi else spec.quiet_levels
        d = d_mean + spec.jitter * (2.0 * rng.uniform() - 1.0)
        s = s_mean + spec.jitter * (2.0 * rng.uniform() - 1.0)
        d, _ = clamp_signal(round(d, 1), spec.max_signal)
        s, _ = clamp_signal(round(s, 1), spec.max_signal)
        signals.append(SignalInstance(float(t), d, s))
    return signals


def generate_antigens(spec: ScenarioSpec, rng: LCG) -> list[AntigenEvent]:
    """Per process and per whole second, ``floor(rate + u)`` antigens at
    millisecond-resolution offsets inside that second."""
    antigens = []
    seconds = int(math.ceil(spec.duration))
    for proc in spec.processes:
        for sec in range(seconds):
            if not _in_windows(float(sec), proc.windows):
                continue
            count = int(math.floor(proc.rate + rng.uniform()))
            for _ in range(count):
                ms = int(rng.uniform() * 1000)
                antigens.append(AntigenEvent((sec * 1000 + ms) / 1000, proc.label))
    return antigens


def generate_scenario(spec: ScenarioSpec) -> EventStream:
    spec.validate()
    rng = LCG(spec.seed)
    signals = generate_signals(spec, rng)
    antigens = generate_antigens(spec, rng)
    # sort_events is stable; generation order breaks remaining ties
    events = sort_events(antigens + signals)
    return EventStream(
        events=events,
        source="synthetic",
        seed=spec.seed,
        bounds=(0.0, spec.max_signal),
    )
