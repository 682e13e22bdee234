"""Deterministic dendritic cell population and its event loop.

A fixed population of cells receives antigen round-robin and every cell
sees every signal instance. Each cell spends its lifespan budget on the
costimulation value of each instance; once the budget is exhausted the
cell presents (logs its accumulated context and antigen profile) and
resets to its initial state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

SIGNAL_MAX = 50.0


@dataclass(frozen=True, slots=True)
class AntigenEvent:
    time: float
    antigen_type: str

    def __post_init__(self):
        if not self.antigen_type:
            raise ValueError("antigen_type must be a non-empty label")


@dataclass(frozen=True, slots=True)
class SignalInstance:
    time: float
    danger: float
    safe: float


Event = Union[AntigenEvent, SignalInstance]


@dataclass(frozen=True, slots=True)
class ProcessedSignal:
    csm: float
    k: float


@dataclass
class DendriticCell:
    index: int
    initial_lifespan: float
    lifespan: float
    k_sum: float = 0.0
    profile: dict[str, int] = field(default_factory=dict)
    iterations: int = 0
    incarnations: int = 0

    def reset(self) -> None:
        self.lifespan = self.initial_lifespan
        self.k_sum = 0.0
        self.profile = {}
        self.iterations = 0


@dataclass(frozen=True)
class PresentationRecord:
    cell_index: int
    k_value: float
    profile: dict[str, int]
    iterations: int
    presented_at: float


@dataclass(frozen=True)
class EngineConfig:
    num_cells: int = 100
    lifespan_limit: float = 100.0
    flush_at_end: bool = False

    def __post_init__(self):
        if isinstance(self.num_cells, bool) or not isinstance(self.num_cells, int):
            raise TypeError(f"num_cells must be an int, got {self.num_cells!r}")
        if self.num_cells < 1:
            raise ValueError(f"num_cells must be >= 1, got {self.num_cells}")
        if not self.lifespan_limit > 0:
            raise ValueError(f"lifespan_limit must be > 0, got {self.lifespan_limit}")


@dataclass
class RunLog:
    records: list[PresentationRecord] = field(default_factory=list)
    antigen_counter: int = 0
    signal_counter: int = 0
    total_incarnations: int = 0
    unpresented_profile: dict[str, int] = field(default_factory=dict)

    def presented_profile(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for rec in self.records:
            for label, count in rec.profile.items():
                totals[label] = totals.get(label, 0) + count
        return totals

    def is_conserved(self) -> bool:
        presented = sum(self.presented_profile().values())
        return presented + sum(self.unpresented_profile.values()) == self.antigen_counter


def init_population(config: EngineConfig) -> list[DendriticCell]:
    """Build ``num_cells`` cells with lifespans spread evenly over (0, limit]."""
    n = config.num_cells
    cells = []
    for i in range(n):
        lifespan = config.lifespan_limit * (i + 1) / n
        cells.append(DendriticCell(index=i, initial_lifespan=lifespan, lifespan=lifespan))
    return cells


def process_signal(safe: float, danger: float) -> ProcessedSignal:
    """Costimulation ``safe + danger`` and context ``danger - 2 * safe``."""
    return ProcessedSignal(csm=safe + danger, k=danger - 2.0 * safe)


def cell_statistics(log: RunLog, config: EngineConfig) -> tuple[float | None, float | None]:
    """Mean iterations per incarnation and mean incarnations per cell.

    Both are ``None`` when nothing was presented.
    """
    if not log.records:
        return None, None
    n_rec = len(log.records)
    mean_iterations = sum(r.iterations for r in log.records) / n_rec
    return mean_iterations, n_rec / config.num_cells


class DCAEngine:
    """Stateful runner for one pass over an event stream.

    An instance owns its population and log; use one instance per run.

    >>> eng = DCAEngine(EngineConfig(num_cells=2, lifespan_limit=10))
    >>> eng.ingest_antigen(AntigenEvent(0.0, "a1"))
    1
    >>> [c.initial_lifespan for c in eng.cells]
    [5.0, 10.0]
    """

    def __init__(self, config: EngineConfig | None = None):
        self.config = config if config is not None else EngineConfig()
        self.cells = init_population(self.config)
        self.log = RunLog()
        self._last_time: float | None = None

    def _check_time(self, t: float) -> None:
        if self._last_time is not None and t < self._last_time:
            raise ValueError(
                f"event stream is not time-ordered: {t} follows {self._last_time}"
            )
        self._last_time = t

    def ingest_antigen(self, event: AntigenEvent) -> int:
        """Assign one antigen; returns the index of the receiving cell."""
        self._check_time(event.time)
        self.log.antigen_counter += 1
        idx = self.log.antigen_counter % self.config.num_cells
        profile = self.cells[idx].profile
        profile[event.antigen_type] = profile.get(event.antigen_type, 0) + 1
        return idx

    def ingest_signal(self, instance: SignalInstance) -> ProcessedSignal:
        self._check_time(instance.time)
        sig = process_signal(instance.safe, instance.danger)
        csm, k = sig.csm, sig.k
        records = self.log.records
        for cell in self.cells:
            cell.lifespan -= csm
            cell.k_sum += k
            cell.iterations += 1
            if cell.lifespan <= 0:
                records.append(
                    PresentationRecord(
                        cell_index=cell.index,
                        k_value=cell.k_sum,
                        profile=cell.profile,
                        iterations=cell.iterations,
                        presented_at=instance.time,
                    )
                )
                cell.incarnations += 1
                self.log.total_incarnations += 1
                cell.reset()
        self.log.signal_counter += 1
        return sig

    def ingest(self, event: Event) -> None:
        if isinstance(event, AntigenEvent):
            self.ingest_antigen(event)
        elif isinstance(event, SignalInstance):
            self.ingest_signal(event)
        else:
            raise TypeError(f"unknown event kind: {type(event).__name__}")

    def finish(self) -> RunLog:
        """Close the run: optionally flush live cells, tally stranded antigen."""
        if self.config.flush_at_end:
            t = self._last_time if self._last_time is not None else 0.0
            for cell in self.cells:
                if cell.profile:
                    self.log.records.append(
                        PresentationRecord(
                            cell_index=cell.index,
                            k_value=cell.k_sum,
                            profile=cell.profile,
                            iterations=cell.iterations,
                            presented_at=t,
                        )
                    )
                    cell.incarnations += 1
                    self.log.total_incarnations += 1
                    cell.reset()
        stranded: dict[str, int] = {}
        for cell in self.cells:
            for label, count in cell.profile.items():
                stranded[label] = stranded.get(label, 0) + count
        self.log.unpresented_profile = dict(sorted(stranded.items()))
        return self.log


def run_stream(config: EngineConfig, events: Iterable[Event]) -> RunLog:
    """Feed a time-ordered stream through a fresh engine and return its log."""
    engine = DCAEngine(config)
    for event in events:
        engine.ingest(event)
    return engine.finish()
