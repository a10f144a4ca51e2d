"""Command-line entry point: ``run``, ``batch`` and ``analyze`` subcommands.

Exit codes: 0 success, 2 invalid configuration or schema, 3 scenario
generation budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import aggregate
from .scenario import ScenarioGenerationError, ScenarioParams, load_scenario
from .simulator import ExperimentRecord, run, run_batch, write_trace

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GENERATION = 3


class InvalidInput(Exception):
    """Bad configuration, arguments or input schema."""


def _dump(record: ExperimentRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True)


def write_records(path: str | Path, records) -> None:
    with open(path, "w") as f:
        for r in records:
            f.write(_dump(r) + "\n")


def read_records(path: str | Path) -> list[ExperimentRecord]:
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                records.append(ExperimentRecord.from_dict(json.loads(line)))
            except (ValueError, TypeError, KeyError) as exc:
                raise InvalidInput(f"{path}:{lineno}: {exc}") from exc
    return records


def cmd_run(args) -> int:
    try:
        scenario, params = load_scenario(args.scenario)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise InvalidInput(f"cannot load scenario {args.scenario}: {exc}") from exc
    result = run(scenario, params, trace=args.trace is not None)
    Path(args.out).write_text(_dump(result.record) + "\n")
    if args.trace is not None:
        trace_dir = Path(args.trace)
        trace_dir.mkdir(parents=True, exist_ok=True)
        write_trace(trace_dir / "trace.csv", result.trace)
    return EXIT_OK


def cmd_batch(args) -> int:
    try:
        params = ScenarioParams(
            hav_count=args.havs,
            seed=args.seed,
            dt=args.dt,
            max_steps=args.max_steps,
            max_trailer_count=args.max_trailers,
        )
    except (ValueError, TypeError) as exc:
        raise InvalidInput(str(exc)) from exc
    if args.seed < 0 or args.experiments < 1 or args.workers < 1:
        raise InvalidInput("seed must be non-negative; experiments and workers at least 1")
    records = run_batch(params, args.experiments, workers=args.workers, first_index=args.first_index)
    write_records(args.out, records)
    return EXIT_OK


def cmd_analyze(args) -> int:
    records = read_records(args.in_path)
    if not records:
        raise InvalidInput(f"{args.in_path}: no records")
    report = aggregate(records, max_steps=args.max_steps)
    report.write(args.report, args.hist)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="havswarm", description="Heavy articulated vehicle swarm simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replay one scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace", default=None, help="directory for a per-step trace.csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run randomised experiments")
    p.add_argument("--experiments", type=int, required=True)
    p.add_argument("--havs", type=int, choices=(1, 2), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dt", type=float, default=0.2)
    p.add_argument("--max-steps", type=int, default=20_000)
    p.add_argument("--max-trailers", type=int, default=10)
    p.add_argument("--first-index", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("analyze", help="aggregate records into a report and histograms")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--hist", default=None)
    p.add_argument("--max-steps", type=int, default=20_000, help="upper edge of the time-step histogram")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioGenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
