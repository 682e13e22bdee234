"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

from ddca.core import EngineConfig, run_stream
from ddca.data import StreamFormatError, read_stream, write_stream
from ddca.experiments import (
    DEFAULT_CELL_COUNTS,
    DEFAULT_SHIFT_OFFSETS,
    oracle_campaign,
    run_pipeline,
    sweep_cell_numbers,
    sweep_time_shifts,
    write_summary,
)
from ddca.metrics import K_ALPHA_MODES
from ddca.oracle import oracle_run
from ddca.scenario import SCENARIOS, generate_scenario

logger = logging.getLogger("ddca")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _offset_list(text: str) -> list[float]:
    """``-20,-10,0`` or a ``start:stop:step`` range with inclusive stop."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            out, v = [], start
            while v <= stop + 1e-9:
                out.append(round(v, 9))
                v += step
            return out
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad offsets {text!r}")


def _offset_name(value: float) -> str:
    v = int(value) if float(value).is_integer() else value
    return f"shift_{v:+}"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ddca", description="Deterministic dendritic cell algorithm")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a synthetic scenario stream")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--spec", choices=sorted(SCENARIOS), default="portscan-default")
    g.add_argument("-o", "--output", required=True, type=Path)

    def engine_flags(sp, cells=True):
        if cells:
            sp.add_argument("--cells", type=int, default=100)
        sp.add_argument("--limit", type=float, default=100.0)
        sp.add_argument("--mode", choices=K_ALPHA_MODES, default="literal")
        sp.add_argument("--flush", action="store_true")

    r = sub.add_parser("run", help="run the engine and score antigen types")
    r.add_argument("-i", "--input", required=True, type=Path)
    r.add_argument("-o", "--output", required=True, type=Path)
    engine_flags(r)
    r.add_argument("--mcav-threshold", type=float, default=None)

    sc = sub.add_parser("sweep-cells", help="vary the population size")
    sc.add_argument("-i", "--input", required=True, type=Path)
    sc.add_argument("-o", "--output", required=True, type=Path)
    sc.add_argument("--counts", type=_int_list, default=list(DEFAULT_CELL_COUNTS))
    sc.add_argument("--workers", type=int, default=1)
    engine_flags(sc, cells=False)

    ss = sub.add_parser("sweep-shift", help="shift signals against antigen")
    ss.add_argument("-i", "--input", required=True, type=Path)
    ss.add_argument("-o", "--output", required=True, type=Path)
    ss.add_argument("--offsets", type=_offset_list, default=list(DEFAULT_SHIFT_OFFSETS))
    ss.add_argument("--workers", type=int, default=1)
    engine_flags(ss)

    oc = sub.add_parser("oracle-check", help="compare engine and reference oracle")
    oc.add_argument("-i", "--input", type=Path, default=None,
                    help="also compare on this stream file")
    oc.add_argument("--trials", type=int, default=500)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--cells", type=int, default=4)
    oc.add_argument("--limit", type=float, default=20.0)
    oc.add_argument("--max-events", type=int, default=20)
    oc.add_argument("--flush", action="store_true")
    return p


def _commit_file(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _commit_dir(directory: Path, files: dict[str, str]) -> None:
    """Write every file to a staging dir first, then move them in."""
    directory.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(dir=directory.parent, prefix=f".{directory.name}."))
    try:
        for name, text in files.items():
            with open(staging / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        directory.mkdir(exist_ok=True)
        for name in files:
            os.replace(staging / name, directory / name)
    finally:
        for leftover in staging.iterdir():
            leftover.unlink()
        staging.rmdir()


def _config(args) -> EngineConfig:
    try:
        return EngineConfig(num_cells=args.cells, lifespan_limit=args.limit,
                            flush_at_end=args.flush)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def cmd_gen(args) -> int:
    stream = generate_scenario(SCENARIOS[args.spec](args.seed))
    _commit_file(args.output, write_stream(stream))
    print(f"wrote {len(stream)} events to {args.output}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    stream = read_stream(args.input)
    result = run_pipeline(stream, config, args.mode, args.mcav_threshold)
    if not result.log.is_conserved():
        raise InvariantError("antigen conservation violated")
    if config.flush_at_end and result.log.unpresented_profile:
        raise InvariantError("antigen left unpresented after flush")
    _commit_dir(args.output, {
        "results.csv": result.results_text(),
        "run_stats.csv": result.stats_text(),
    })
    th = result.thresholds
    print(f"{len(result.reports)} antigen types, {len(result.log.records)} presentations, "
          f"t_k={th.t_k}, mcav_threshold={th.mcav_threshold}")
    return EXIT_OK


def _sweep_files(sweep, name_of) -> dict[str, str]:
    files = {"summary.csv": write_summary(sweep)}
    for row in sweep.rows:
        if row.ok:
            files[f"{name_of(row.value)}_results.csv"] = row.result.results_text()
            files[f"{name_of(row.value)}_stats.csv"] = row.result.stats_text()
    return files


def cmd_sweep_cells(args) -> int:
    if not args.counts:
        raise UsageError("--counts is empty")
    stream = read_stream(args.input)
    sweep = sweep_cell_numbers(stream, args.counts, args.limit, args.mode, args.flush,
                               max_workers=args.workers)
    _commit_dir(args.output, _sweep_files(sweep, lambda v: f"cells_{v}"))
    for row in sweep.rows:
        if not row.ok:
            logger.error("row %s failed: %s", row.value, row.error)
    print(f"{len(sweep.rows)} rows written to {args.output / 'summary.csv'}")
    return EXIT_OK


def cmd_sweep_shift(args) -> int:
    if not args.offsets:
        raise UsageError("--offsets is empty")
    config = _config(args)
    stream = read_stream(args.input)
    sweep = sweep_time_shifts(stream, args.offsets, config, args.mode, max_workers=args.workers)
    _commit_dir(args.output, _sweep_files(sweep, _offset_name))
    for row in sweep.rows:
        if not row.ok:
            logger.error("row %s failed: %s", row.value, row.error)
    print(f"{len(sweep.rows)} rows written to {args.output / 'summary.csv'}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.cells < 1 or not args.limit > 0 or args.trials < 0 or args.max_events < 0:
        raise UsageError("--cells, --limit, --trials and --max-events must be positive")
    check = oracle_campaign(args.trials, args.seed, args.max_events, args.cells, args.limit)
    print(f"random streams: {check.trials - len(check.mismatches)}/{check.trials} identical")
    failed = not check.ok
    if args.input is not None:
        config = EngineConfig(num_cells=args.cells, lifespan_limit=args.limit,
                              flush_at_end=args.flush)
        events = read_stream(args.input).events
        same = run_stream(config, events) == oracle_run(config, events)
        print(f"{args.input}: {'identical' if same else 'MISMATCH'}")
        failed = failed or not same
    if failed:
        raise InvariantError(
            f"engine and oracle disagree on trials {check.mismatches[:10]}"
            if check.mismatches else "engine and oracle disagree"
        )
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "run": cmd_run,
    "sweep-cells": cmd_sweep_cells,
    "sweep-shift": cmd_sweep_shift,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ddca: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StreamFormatError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"ddca: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"ddca: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"ddca: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # surfaced as an internal failure, never a traceback
        print(f"ddca: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
