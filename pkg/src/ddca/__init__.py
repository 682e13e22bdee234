"""Deterministic dendritic cell algorithm for antigen/signal anomaly scoring."""

from ddca.core import (
    AntigenEvent,
    DCAEngine,
    DendriticCell,
    EngineConfig,
    PresentationRecord,
    ProcessedSignal,
    RunLog,
    SignalInstance,
    cell_statistics,
    init_population,
    process_signal,
    run_stream,
)
from ddca.data import EventStream, parse_stream, shift_signals, write_results, write_stream
from ddca.estimator import DeterministicDCA
from ddca.experiments import run_pipeline, sweep_cell_numbers, sweep_time_shifts
from ddca.metrics import (
    AntigenTypeReport,
    ThresholdSet,
    classify,
    k_alpha,
    mcav,
    mcav_threshold,
    t_k_threshold,
)
from ddca.oracle import oracle_run
from ddca.scenario import ScenarioSpec, generate_scenario, portscan_default

__version__ = "0.1.0"

__all__ = [
    "AntigenEvent",
    "AntigenTypeReport",
    "DCAEngine",
    "DendriticCell",
    "DeterministicDCA",
    "EngineConfig",
    "EventStream",
    "PresentationRecord",
    "ProcessedSignal",
    "RunLog",
    "ScenarioSpec",
    "SignalInstance",
    "ThresholdSet",
    "cell_statistics",
    "classify",
    "generate_scenario",
    "init_population",
    "k_alpha",
    "mcav",
    "mcav_threshold",
    "oracle_run",
    "parse_stream",
    "portscan_default",
    "process_signal",
    "run_pipeline",
    "run_stream",
    "shift_signals",
    "sweep_cell_numbers",
    "sweep_time_shifts",
    "t_k_threshold",
    "write_results",
    "write_stream",
]
