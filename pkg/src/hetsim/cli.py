"""Command-line interface: gen-workload, simulate, bench.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 scheduler
contract violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchPlan, run_bench, write_outputs
from .engine import SchedulingContractError, run_simulation
from .metrics import ReportError, compute_report, write_report
from .model import SCHEDULING_METHODS, ConfigError, canonical_method, default_config, parse_config
from .workload import (
    SCENARIOS,
    WorkloadError,
    generate_workload,
    read_workload_csv,
    scenario_by_name,
    write_workload_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONTRACT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _load_config(path: str | None):
    if path is None:
        return default_config()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_seeds(text: str) -> tuple[int, ...]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise _UsageError(f"bad seed list {text!r} (use e.g. 0..9 or 1,2,3)") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hetsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-workload", help="generate a scenario workload CSV")
    gen.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--config", help="config file (default: built-in park)")

    sim = sub.add_parser("simulate", help="run one simulation on a workload CSV")
    sim.add_argument("--config", help="config file (default: built-in park)")
    sim.add_argument("--workload", required=True, help="workload CSV path")
    sim.add_argument("--scheduler", help="override the config's scheduling method")
    sim.add_argument("--out", help="report path (default: print to stdout)")
    sim.add_argument("--format", choices=("json", "csv"), default="json")
    sim.add_argument("--label", help="scenario label in the report (default: workload stem)")
    sim.add_argument("--seed", type=int, default=0, help="seed recorded in the report row")
    sim.add_argument("--backend", choices=("auto", "compiled", "pure"), default="auto")
    sim.add_argument("--trace", help="write an event-trace dump (forces pure backend)")

    ben = sub.add_parser("bench", help="run the scenario x scheduler x seed grid")
    ben.add_argument("--config", help="config file (default: built-in park)")
    ben.add_argument("--scenarios", default="low,medium,high", help="comma-separated subset")
    ben.add_argument("--schedulers", default=",".join(SCHEDULING_METHODS), help="comma-separated subset")
    ben.add_argument("--seeds", default="0..9", help="e.g. 0..9 or 1,2,3")
    ben.add_argument("--out", required=True, help="output directory")
    ben.add_argument("--jobs", type=int, default=1, help="parallel grid cells")
    ben.add_argument("--backend", choices=("auto", "compiled", "pure"), default="auto")

    return parser


def cmd_gen_workload(args) -> int:
    config = _load_config(args.config)
    scenario = scenario_by_name(args.scenario)
    tasks = generate_workload(scenario, config.task_types, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(write_workload_csv(tasks, config.task_types))
    for tt in config.task_types:
        count = sum(1 for t in tasks if t.task_type == tt.id)
        print(f"{tt.name}: {count}")
    print(f"wrote {len(tasks)} tasks to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    workload_path = Path(args.workload)
    try:
        text = workload_path.read_text()
    except OSError as exc:
        raise WorkloadError(f"cannot read workload {args.workload}: {exc}") from exc
    try:
        tasks = read_workload_csv(text, config.task_types)
    except WorkloadError as exc:
        raise WorkloadError(f"{args.workload}: {exc}") from None
    tasks.sort(key=lambda t: (t.arrival_time, t.seq))

    scheduler = canonical_method(args.scheduler) if args.scheduler else config.scheduling_method
    if args.trace:
        with open(args.trace, "w") as trace_file:
            trace = run_simulation(
                config, tasks, scheduler, backend=args.backend,
                trace_hook=lambda line: print(line, file=trace_file),
            )
    else:
        trace = run_simulation(config, tasks, scheduler, backend=args.backend)

    label = args.label if args.label else workload_path.stem
    report = compute_report(trace, config, label, scheduler, args.seed)
    rendered = write_report(report, args.format)
    if args.format == "csv":
        rendered = report.csv_header() + "\n" + rendered
    if args.out:
        Path(args.out).write_text(rendered)
        print(f"{report.scheduler}: {report.completed}/{report.total_tasks} completed "
              f"({report.completion_pct}%), report written to {args.out}")
    else:
        print(rendered, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    try:
        plan = BenchPlan(
            scenarios=tuple(s.strip() for s in args.scenarios.split(",") if s.strip()),
            schedulers=tuple(s.strip() for s in args.schedulers.split(",") if s.strip()),
            seeds=_parse_seeds(args.seeds),
            config=config,
            jobs=args.jobs,
            backend=args.backend,
        )
    except (ConfigError, WorkloadError, ValueError) as exc:
        raise _UsageError(str(exc)) from None
    reports, failures = run_bench(plan)
    for (scenario, scheduler, seed), exc in failures:
        print(f"FAILED {scenario}/{scheduler}/seed={seed}: {exc}", file=sys.stderr)
    if reports:
        written = write_outputs(plan, reports, Path(args.out))
        for path in written:
            print(f"wrote {path}")
    if failures:
        if any(isinstance(exc, SchedulingContractError) for _, exc in failures):
            return EXIT_CONTRACT
        return EXIT_DATA
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen-workload":
            return cmd_gen_workload(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_bench(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, WorkloadError, ReportError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SchedulingContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
