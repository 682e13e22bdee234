"""Slow, literal re-statement of the deterministic DCA loop.

Kept deliberately naive and free of any helper from ``ddca.core`` so it can
serve as an independent reference for the engine. Only the result
containers are shared.
"""

from __future__ import annotations

from ddca.core import AntigenEvent, EngineConfig, PresentationRecord, RunLog, SignalInstance


def oracle_run(config: EngineConfig, events) -> RunLog:
    n = config.num_cells
    limit = config.lifespan_limit
    if n < 1 or not limit > 0:
        raise ValueError("invalid configuration")

    cells = []
    for i in range(n):
        cells.append({"start": limit * (i + 1) / n})
    for c in cells:
        c["life"] = c["start"]
        c["k"] = 0.0
        c["antigen"] = {}
        c["iters"] = 0

    antigen_counter = 0
    signal_counter = 0
    resets = 0
    logged = []
    previous_time = None

    for ev in events:
        if previous_time is not None and ev.time < previous_time:
            raise ValueError("stream goes back in time")
        previous_time = ev.time

        if isinstance(ev, AntigenEvent):
            antigen_counter = antigen_counter + 1
            index = antigen_counter % n
            store = cells[index]["antigen"]
            if ev.antigen_type in store:
                store[ev.antigen_type] = store[ev.antigen_type] + 1
            else:
                store[ev.antigen_type] = 1

        elif isinstance(ev, SignalInstance):
            csm = ev.safe + ev.danger
            k = ev.danger - 2.0 * ev.safe
            for i in range(n):
                cell = cells[i]
                cell["life"] = cell["life"] - csm
                cell["k"] = cell["k"] + k
                cell["iters"] = cell["iters"] + 1
                if cell["life"] <= 0:
                    logged.append((i, cell["k"], dict(cell["antigen"]), cell["iters"], ev.time))
                    resets = resets + 1
                    cell["life"] = cell["start"]
                    cell["k"] = 0.0
                    cell["antigen"] = {}
                    cell["iters"] = 0
            signal_counter = signal_counter + 1

        else:
            raise TypeError("unknown event")

    if config.flush_at_end:
        when = previous_time if previous_time is not None else 0.0
        for i in range(n):
            cell = cells[i]
            if len(cell["antigen"]) > 0:
                logged.append((i, cell["k"], dict(cell["antigen"]), cell["iters"], when))
                resets = resets + 1
                cell["antigen"] = {}

    leftover = {}
    for cell in cells:
        for label in cell["antigen"]:
            leftover[label] = leftover.get(label, 0) + cell["antigen"][label]

    return RunLog(
        records=[
            PresentationRecord(
                cell_index=i, k_value=k, profile=prof, iterations=it, presented_at=t
            )
            for (i, k, prof, it, t) in logged
        ],
        antigen_counter=antigen_counter,
        signal_counter=signal_counter,
        total_incarnations=resets,
        unpresented_profile=dict(sorted(leftover.items())),
    )
