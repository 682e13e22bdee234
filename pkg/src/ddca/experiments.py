"""Cell-number and signal time-shift sweeps over a fixed event stream."""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ddca.core import (
    AntigenEvent,
    EngineConfig,
    RunLog,
    SignalInstance,
    cell_statistics,
    run_stream,
)
from ddca.data import EventStream, format_number, shift_signals, write_results, write_run_stats
from ddca.metrics import AntigenTypeReport, ThresholdSet, build_reports, compute_thresholds
from ddca.oracle import oracle_run

DEFAULT_CELL_COUNTS = (1, 5, 10, 50, 100, 500, 1000, 5000)
DEFAULT_SHIFT_OFFSETS = tuple(range(-20, 21, 2))


@dataclass
class RunResult:
    config: EngineConfig
    log: RunLog
    thresholds: ThresholdSet
    reports: list[AntigenTypeReport]
    mean_iterations: float | None
    mean_incarnations: float | None
    wall_time_ms: float

    def report_map(self) -> dict[str, AntigenTypeReport]:
        return {r.antigen_type: r for r in self.reports}

    def results_text(self) -> str:
        return write_results(self.reports)

    def stats_text(self) -> str:
        return write_run_stats(
            self.config, self.thresholds, self.mean_incarnations, self.wall_time_ms
        )


def run_pipeline(
    stream: EventStream,
    config: EngineConfig | None = None,
    k_alpha_mode: str = "literal",
    mcav_threshold: float | None = None,
) -> RunResult:
    """Engine run plus thresholds and per-type reports.

    Wall time covers the engine loop only.
    """
    config = config or EngineConfig()
    events = stream.events if isinstance(stream, EventStream) else list(stream)
    t0 = time.perf_counter()
    log = run_stream(config, events)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    signals = [e for e in events if isinstance(e, SignalInstance)]
    thresholds = compute_thresholds(log, config, signals, manual_mcav_threshold=mcav_threshold)
    mean_it, mean_inc = cell_statistics(log, config)
    return RunResult(
        config=config,
        log=log,
        thresholds=thresholds,
        reports=build_reports(log, thresholds, k_alpha_mode),
        mean_iterations=mean_it,
        mean_incarnations=mean_inc,
        wall_time_ms=wall_ms,
    )


@dataclass
class SweepRow:
    value: float
    result: RunResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SweepResult:
    parameter: str
    rows: list[SweepRow] = field(default_factory=list)

    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    def row(self, value) -> SweepRow:
        for r in self.rows:
            if r.value == value:
                return r
        raise KeyError(value)

    def series(self, attr: str, antigen_type: str) -> list[float | None]:
        """Per-row ``mcav`` or ``k_alpha`` of one antigen type (None if absent)."""
        out = []
        for r in self.rows:
            rep = r.result.report_map().get(antigen_type) if r.ok else None
            out.append(getattr(rep, attr) if rep is not None else None)
        return out


def _run_rows(values, job, max_workers: int | None) -> list[SweepRow]:
    def guarded(v):
        try:
            return SweepRow(value=v, result=job(v))
        except Exception as exc:  # one bad row must not sink the sweep
            return SweepRow(value=v, error=f"{type(exc).__name__}: {exc}")

    ordered = sorted(values)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(guarded, ordered))
    return [guarded(v) for v in ordered]


def sweep_cell_numbers(
    stream: EventStream,
    cell_counts: Sequence[int] = DEFAULT_CELL_COUNTS,
    lifespan_limit: float = 100.0,
    k_alpha_mode: str = "literal",
    flush_at_end: bool = False,
    max_workers: int | None = None,
) -> SweepResult:
    def job(n):
        cfg = EngineConfig(num_cells=n, lifespan_limit=lifespan_limit, flush_at_end=flush_at_end)
        return run_pipeline(stream, cfg, k_alpha_mode)

    return SweepResult("num_cells", _run_rows(cell_counts, job, max_workers))


def sweep_time_shifts(
    stream: EventStream,
    offsets: Sequence[float] = DEFAULT_SHIFT_OFFSETS,
    config: EngineConfig | None = None,
    k_alpha_mode: str = "literal",
    max_workers: int | None = None,
) -> SweepResult:
    config = config or EngineConfig()

    def job(offset):
        return run_pipeline(shift_signals(stream, offset), config, k_alpha_mode)

    return SweepResult("offset", _run_rows(offsets, job, max_workers))


def _fmt(x) -> str:
    return "NA" if x is None else format_number(x)


def write_summary(sweep: SweepResult) -> str:
    """Plot-ready table: one line per swept value, per-type columns appended."""
    labels: set[str] = set()
    for r in sweep.rows:
        if r.ok:
            labels.update(r.result.report_map())
    labels_sorted = sorted(labels)
    header = [
        sweep.parameter,
        "t_k",
        "mcav_threshold",
        "mean_iterations",
        "mean_incarnations",
        "wall_time_ms",
        "error",
    ]
    header += [f"mcav:{lab}" for lab in labels_sorted]
    header += [f"k_alpha:{lab}" for lab in labels_sorted]
    lines = [",".join(header)]
    for r in sweep.rows:
        value = str(r.value) if isinstance(r.value, int) else format_number(r.value)
        if not r.ok:
            blanks = ["NA"] * (5 + 2 * len(labels_sorted))
            err = r.error.replace(",", ";").replace("\n", " ")
            lines.append(",".join([value] + blanks[:5] + [err] + blanks[5:]))
            continue
        res = r.result
        reps = res.report_map()
        row = [
            value,
            _fmt(res.thresholds.t_k),
            _fmt(res.thresholds.mcav_threshold),
            _fmt(res.mean_iterations),
            _fmt(res.mean_incarnations),
            _fmt(res.wall_time_ms),
            "",
        ]
        row += [_fmt(reps[lab].mcav) if lab in reps else "NA" for lab in labels_sorted]
        row += [_fmt(reps[lab].k_alpha) if lab in reps else "NA" for lab in labels_sorted]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def random_small_stream(
    rng: random.Random, max_events: int = 20, labels: Sequence[str] = ("a", "b", "c")
) -> list:
    """A short mixed stream on a coarse grid, so exact zero-lifespan hits happen."""
    events = []
    t = 0.0
    for _ in range(rng.randint(0, max_events)):
        t += rng.choice((0.0, 0.0, 0.5, 1.0, 2.0))
        if rng.random() < 0.5:
            events.append(AntigenEvent(t, rng.choice(labels)))
        else:
            danger = rng.choice((0.0, 0.5, 1.0, 2.5, 5.0, 10.0, 50.0, round(rng.uniform(0, 50), 2)))
            safe = rng.choice((0.0, 0.5, 1.0, 2.5, 5.0, 10.0, 50.0, round(rng.uniform(0, 50), 2)))
            events.append(SignalInstance(t, danger, safe))
    return events


@dataclass
class OracleCheck:
    trials: int
    mismatches: list[int] = field(default_factory=list)
    conservation_failures: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.conservation_failures


def oracle_campaign(
    trials: int = 500,
    seed: int = 0,
    max_events: int = 20,
    max_cells: int = 4,
    max_limit: float = 20.0,
) -> OracleCheck:
    """Engine vs oracle on ``trials`` seeded random small streams."""
    rng = random.Random(seed)
    check = OracleCheck(trials=trials)
    for trial in range(trials):
        events = random_small_stream(rng, max_events)
        config = EngineConfig(
            num_cells=rng.randint(1, max_cells),
            lifespan_limit=rng.choice((1.0, 2.5, 5.0, 10.0, max_limit, rng.uniform(0.1, max_limit))),
            flush_at_end=rng.random() < 0.5,
        )
        engine_log = run_stream(config, events)
        if engine_log != oracle_run(config, events):
            check.mismatches.append(trial)
        if not engine_log.is_conserved():
            check.conservation_failures.append(trial)
    return check
