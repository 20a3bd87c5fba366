"""Benchmark harness: the scenario x scheduler x seed grid.

Grid cells are independent simulations; they may run in parallel, but every
output file is written only after results are sorted by plan order, so
concurrent and sequential execution produce byte-identical files. Summary
and plot values are means of the report rows exactly as serialized.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .engine import run_simulation
from .metrics import SimReport, compute_report
from .model import SimConfig, canonical_method
from .workload import generate_workload, scenario_by_name

PLOT_METRICS = (
    ("completion_pct", "completion_pct", 2),
    ("total_energy", "total_energy_mJ", 3),
    ("wasted_energy", "wasted_energy_mJ", 3),
    ("energy_per_completion", "energy_per_completion_mJ", 3),
)


@dataclass(frozen=True)
class BenchPlan:
    scenarios: tuple[str, ...]
    schedulers: tuple[str, ...]
    seeds: tuple[int, ...]
    config: SimConfig
    jobs: int = 1
    backend: str = "auto"

    def __post_init__(self):
        if not self.scenarios or not self.schedulers or not self.seeds:
            raise ValueError("bench plan needs at least one scenario, scheduler, and seed")
        object.__setattr__(self, "scenarios", tuple(scenario_by_name(s).name for s in self.scenarios))
        object.__setattr__(self, "schedulers", tuple(canonical_method(s) for s in self.schedulers))
        if len(set(self.scenarios)) != len(self.scenarios):
            raise ValueError("duplicate scenarios in bench plan")
        if len(set(self.schedulers)) != len(self.schedulers):
            raise ValueError("duplicate schedulers in bench plan")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("duplicate seeds in bench plan")

    def cells(self):
        for scenario in self.scenarios:
            for scheduler in self.schedulers:
                for seed in self.seeds:
                    yield scenario, scheduler, seed


def run_cell(config: SimConfig, scenario: str, scheduler: str, seed: int, backend: str = "auto") -> SimReport:
    """One grid cell: generate the workload, simulate, report (ledger-verified)."""
    spec = scenario_by_name(scenario)
    workload = generate_workload(spec, config.task_types, seed)
    trace = run_simulation(config, workload, scheduler, backend=backend)
    return compute_report(trace, config, scenario, scheduler, seed)


def _cell_worker(args):
    config, scenario, scheduler, seed, backend = args
    try:
        return (scenario, scheduler, seed), run_cell(config, scenario, scheduler, seed, backend), None
    except Exception as exc:  # reported per-cell by the caller
        return (scenario, scheduler, seed), None, exc


def run_bench(plan: BenchPlan):
    """Run every cell; returns (reports sorted in plan order, failures)."""
    args = [(plan.config, sc, sd, seed, plan.backend) for sc, sd, seed in plan.cells()]
    if plan.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            raw = list(pool.map(_cell_worker, args))
    else:
        raw = [_cell_worker(a) for a in args]

    order = {
        (sc, sd, seed): (plan.scenarios.index(sc), plan.schedulers.index(sd), plan.seeds.index(seed))
        for sc, sd, seed in plan.cells()
    }
    raw.sort(key=lambda item: order[item[0]])
    reports = [rep for _, rep, exc in raw if exc is None]
    failures = [(key, exc) for key, rep, exc in raw if exc is not None]
    return reports, failures


def _mean(cells: list[str], decimals: int) -> str:
    values = [Decimal(c) for c in cells if c != ""]
    if not values:
        return ""
    mean = sum(values) / len(values)
    return str(mean.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP))


def render_outputs(plan: BenchPlan, reports: list[SimReport]) -> dict[str, str]:
    """Render reports.csv, summary.csv, and the four plot CSVs as text."""
    header = reports[0].csv_header()
    columns = header.split(",")
    rows = [r.csv_row().split(",") for r in reports]
    by_cell: dict[tuple[str, str], list[list[str]]] = {}
    for row in rows:
        by_cell.setdefault((row[0], row[1]), []).append(row)

    out = {"reports.csv": header + "\n" + "".join(",".join(r) + "\n" for r in rows)}

    count_columns = [
        "total_tasks",
        "completed",
        "rejected_at_arrival",
        "dropped_in_queue",
        "cancelled_running",
    ] + [c for c in columns if c.startswith("assigned_")]
    summary_cols = (
        ["completion_pct"]
        + [c for c in columns if c.endswith("_mJ")]
        + count_columns
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scenario", "scheduler", "runs"] + summary_cols)
    for scenario in plan.scenarios:
        for scheduler in plan.schedulers:
            cell_rows = by_cell.get((scenario, scheduler), [])
            record = [scenario, scheduler, str(len(cell_rows))]
            for col in summary_cols:
                i = columns.index(col)
                decimals = 3 if col.endswith("_mJ") else 2
                record.append(_mean([r[i] for r in cell_rows], decimals))
            writer.writerow(record)
    out["summary.csv"] = buf.getvalue()

    for fname, col, decimals in PLOT_METRICS:
        i = columns.index(col)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scenario"] + list(plan.schedulers))
        for scenario in plan.scenarios:
            record = [scenario]
            for scheduler in plan.schedulers:
                record.append(_mean([r[i] for r in by_cell.get((scenario, scheduler), [])], decimals))
            writer.writerow(record)
        out[f"{fname}.csv"] = buf.getvalue()
    return out


def write_outputs(plan: BenchPlan, reports: list[SimReport], out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in render_outputs(plan, reports).items():
        path = out_dir / name
        path.write_text(text)
        written.append(path)
    return written
