import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddca.core import (
    AntigenEvent,
    DCAEngine,
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

signal_value = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


@st.composite
def streams(draw, max_events=30):
    n = draw(st.integers(0, max_events))
    t = 0.0
    events = []
    for _ in range(n):
        t += draw(st.sampled_from([0.0, 0.5, 1.0]))
        if draw(st.booleans()):
            events.append(AntigenEvent(t, draw(st.sampled_from("abcd"))))
        else:
            events.append(SignalInstance(t, draw(signal_value), draw(signal_value)))
    return events


configs = st.builds(
    EngineConfig,
    num_cells=st.integers(1, 6),
    lifespan_limit=st.sampled_from([1.0, 5.0, 10.0, 20.0, 100.0]),
    flush_at_end=st.booleans(),
)


# -- population -------------------------------------------------------------

def test_default_population_has_unit_lifespan_steps():
    cells = init_population(EngineConfig())
    assert [c.initial_lifespan for c in cells] == [float(i) for i in range(1, 101)]


def test_single_cell_gets_full_limit():
    (cell,) = init_population(EngineConfig(num_cells=1, lifespan_limit=100))
    assert cell.initial_lifespan == 100


def test_four_cells_quarter_steps():
    cells = init_population(EngineConfig(num_cells=4, lifespan_limit=100))
    assert [c.initial_lifespan for c in cells] == [25, 50, 75, 100]
    assert all(c.lifespan == c.initial_lifespan and c.k_sum == 0 and not c.profile for c in cells)


@pytest.mark.parametrize("kwargs", [{"num_cells": 0}, {"lifespan_limit": 0}, {"lifespan_limit": -1.0}])
def test_invalid_config_rejected(kwargs):
    with pytest.raises(ValueError):
        EngineConfig(**kwargs)


# -- signal processing ------------------------------------------------------

def test_process_signal_mean_values():
    sig = process_signal(safe=21.8, danger=15.0)
    assert sig.csm == pytest.approx(36.8)
    assert sig.k == pytest.approx(-28.6)


def test_process_signal_zero_and_boundary():
    assert process_signal(0.0, 0.0) == ProcessedSignal(0.0, 0.0)
    sig = process_signal(safe=10.0, danger=20.0)
    assert (sig.csm, sig.k) == (30.0, 0.0)


@given(signal_value, signal_value)
def test_process_signal_identities(s, d):
    sig = process_signal(s, d)
    assert sig.csm == s + d
    assert sig.k == d - 2 * s
    assert sig.csm >= 0


# -- antigen ingestion ------------------------------------------------------

def test_round_robin_three_cells():
    eng = DCAEngine(EngineConfig(num_cells=3))
    got = [eng.ingest_antigen(AntigenEvent(float(i), "x")) for i in range(4)]
    assert got == [1, 2, 0, 1]
    assert eng.log.antigen_counter == 4


def test_single_cell_absorbs_everything():
    eng = DCAEngine(EngineConfig(num_cells=1))
    for i in range(5):
        assert eng.ingest_antigen(AntigenEvent(float(i), f"t{i % 2}")) == 0
    assert eng.cells[0].profile == {"t0": 3, "t1": 2}


def test_same_type_twice_counts_two():
    eng = DCAEngine(EngineConfig(num_cells=1))
    eng.ingest_antigen(AntigenEvent(0.0, "a"))
    eng.ingest_antigen(AntigenEvent(0.0, "a"))
    assert eng.cells[0].profile == {"a": 2}


def test_empty_antigen_label_rejected():
    with pytest.raises(ValueError):
        AntigenEvent(0.0, "")


# -- signal ingestion -------------------------------------------------------

def test_signal_spends_lifespan_without_presenting():
    eng = DCAEngine(EngineConfig(num_cells=1, lifespan_limit=40))
    eng.ingest_signal(SignalInstance(1.0, danger=15.0, safe=21.8))
    cell = eng.cells[0]
    assert cell.lifespan == pytest.approx(3.2)
    assert cell.k_sum == pytest.approx(-28.6)
    assert eng.log.records == []


def test_second_instance_triggers_presentation_and_reset():
    eng = DCAEngine(EngineConfig(num_cells=1, lifespan_limit=30))
    cell = eng.cells[0]
    cell.k_sum = -28.6
    cell.iterations = 1
    cell.profile["p"] = 1
    eng.ingest_signal(SignalInstance(2.0, danger=15.0, safe=21.8))
    (rec,) = eng.log.records
    assert rec.k_value == pytest.approx(-57.2)
    assert rec.iterations == 2
    assert rec.profile == {"p": 1}
    assert rec.presented_at == 2.0
    assert (cell.lifespan, cell.k_sum, cell.profile, cell.iterations) == (30, 0.0, {}, 0)
    assert cell.incarnations == 1


def test_zero_signal_still_counts_iteration():
    eng = DCAEngine(EngineConfig(num_cells=3, lifespan_limit=10))
    eng.ingest_signal(SignalInstance(0.0, 0.0, 0.0))
    assert [c.iterations for c in eng.cells] == [1, 1, 1]
    assert [c.lifespan for c in eng.cells] == [c.initial_lifespan for c in eng.cells]
    assert eng.log.records == []
    assert eng.log.signal_counter == 1


def test_exact_zero_lifespan_presents():
    eng = DCAEngine(EngineConfig(num_cells=1, lifespan_limit=10))
    eng.ingest_signal(SignalInstance(0.0, danger=10.0, safe=0.0))
    assert len(eng.log.records) == 1


def test_reset_cell_does_not_rereceive_same_instance():
    eng = DCAEngine(EngineConfig(num_cells=1, lifespan_limit=1))
    eng.ingest_signal(SignalInstance(0.0, danger=5.0, safe=0.0))
    assert eng.cells[0].k_sum == 0.0 and eng.cells[0].iterations == 0


# -- whole streams ----------------------------------------------------------

def test_empty_stream():
    log = run_stream(EngineConfig(), [])
    assert log == RunLog()


def test_antigen_without_signals_never_presents():
    events = [AntigenEvent(float(i), "a" if i % 2 else "b") for i in range(10)]
    log = run_stream(EngineConfig(num_cells=3), events)
    assert log.records == []
    assert log.unpresented_profile == {"a": 5, "b": 5}
    assert log.is_conserved()


TWO_CELL_STREAM = [
    AntigenEvent(0.0, "a1"),
    SignalInstance(1.0, danger=6.0, safe=0.0),
    AntigenEvent(2.0, "a1"),
    SignalInstance(3.0, danger=6.0, safe=0.0),
]

# Hand trace: lifespans 5 and 10; antigen 1 -> cell 1, antigen 2 -> cell 0.
TWO_CELL_LOG = RunLog(
    records=[
        PresentationRecord(0, 6.0, {}, 1, 1.0),
        PresentationRecord(0, 6.0, {"a1": 1}, 1, 3.0),
        PresentationRecord(1, 12.0, {"a1": 1}, 2, 3.0),
    ],
    antigen_counter=2,
    signal_counter=2,
    total_incarnations=3,
    unpresented_profile={},
)


def test_two_cell_hand_trace():
    assert run_stream(EngineConfig(num_cells=2, lifespan_limit=10), TWO_CELL_STREAM) == TWO_CELL_LOG


def test_unsorted_stream_rejected():
    with pytest.raises(ValueError, match="time-ordered"):
        run_stream(EngineConfig(), [AntigenEvent(2.0, "a"), AntigenEvent(1.0, "a")])


def test_flush_presents_live_antigen():
    events = [AntigenEvent(0.0, "a"), AntigenEvent(0.5, "b")]
    log = run_stream(EngineConfig(num_cells=2, flush_at_end=True), events)
    assert log.unpresented_profile == {}
    assert sorted(r.cell_index for r in log.records) == [0, 1]
    assert all(r.iterations == 0 and r.presented_at == 0.5 for r in log.records)


# -- statistics -------------------------------------------------------------

def _rec(iterations, k=0.0):
    return PresentationRecord(0, k, {}, iterations, 0.0)


def test_cell_statistics_examples():
    log = RunLog(records=[_rec(2), _rec(2), _rec(2)])
    assert cell_statistics(log, EngineConfig(num_cells=1)) == (2.0, 3.0)
    log = RunLog(records=[_rec(1), _rec(3)])
    assert cell_statistics(log, EngineConfig(num_cells=2)) == (2.0, 1.0)
    assert cell_statistics(RunLog(), EngineConfig()) == (None, None)


# -- properties -------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(configs, streams())
def test_conservation_and_determinism(config, events):
    a = run_stream(config, events)
    b = run_stream(config, events)
    assert a == b
    assert a.is_conserved()
    if config.flush_at_end:
        assert a.unpresented_profile == {}


@settings(max_examples=100, deadline=None)
@given(configs, streams())
def test_signals_reach_every_cell_uniformly(config, events):
    eng = DCAEngine(config)
    for ev in events:
        if isinstance(ev, AntigenEvent):
            eng.ingest_antigen(ev)
            continue
        before = [(c.lifespan, c.k_sum, c.incarnations) for c in eng.cells]
        n_rec = len(eng.log.records)
        sig = eng.ingest_signal(ev)
        presented = {r.cell_index for r in eng.log.records[n_rec:]}
        for cell, (life, k, inc) in zip(eng.cells, before):
            if cell.index in presented:
                assert cell.incarnations == inc + 1
                assert cell.lifespan == cell.initial_lifespan and cell.k_sum == 0.0
                assert cell.profile == {} and cell.iterations == 0
            else:
                assert cell.lifespan == life - sig.csm
                assert cell.k_sum == k + sig.k
                assert cell.lifespan <= life


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 40))
def test_round_robin_property(n, count):
    eng = DCAEngine(EngineConfig(num_cells=n))
    for i in range(1, count + 1):
        assert eng.ingest_antigen(AntigenEvent(0.0, "x")) == i % n
