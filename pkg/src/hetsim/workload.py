"""Synthetic workload generation and the workload CSV format.

Arrival times are drawn per task type from a named distribution over a fixed
window, clamped into the window (clamping keeps the draw count per type
deterministic). Each task type consumes its own Philox substream keyed by the
type id, so adding a type never perturbs another type's draws.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

import numpy as np

from .model import US_PER_MS, TaskTypeSpec

WINDOW_START_US = 0
WINDOW_END_US = 1_000_000

WORKLOAD_COLUMNS = ("task_type", "data_size", "arrival_time", "deadline")


class WorkloadError(ValueError):
    """Raised for malformed workload files or invalid generation requests."""


@dataclass(frozen=True)
class TaskInstance:
    """One workload row. Times in microseconds; deadline = arrival + slack."""

    task_type: int
    data_size: float
    arrival_time: int
    deadline: int
    seq: int


@dataclass(frozen=True)
class ScenarioSpec:
    """A workload scenario: per-type task count and arrival distribution."""

    name: str
    count_per_type: int
    window_start: int = WINDOW_START_US
    window_end: int = WINDOW_END_US
    # task-type id -> "normal" | "exponential" | "uniform"
    arrival_dists: tuple[tuple[int, str], ...] = ((1, "normal"), (2, "exponential"), (3, "uniform"))

    def dist_for(self, type_id: int) -> str:
        for tid, dist in self.arrival_dists:
            if tid == type_id:
                return dist
        raise WorkloadError(f"scenario {self.name!r} has no arrival distribution for task type id {type_id}")


SCENARIOS = {
    "low": ScenarioSpec("low", 700),
    "medium": ScenarioSpec("medium", 1000),
    "high": ScenarioSpec("high", 1400),
}


def scenario_by_name(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name.lower()]
    except KeyError:
        raise WorkloadError(
            f"unknown scenario {name!r} (expected one of {', '.join(SCENARIOS)})"
        ) from None


def _type_rng(seed: int, type_id: int) -> np.random.Generator:
    # Philox keyed by (seed, type id): one independent substream per task type.
    entropy = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy, spawn_key=(type_id,))))


def sample_arrival(dist: str, window: tuple[int, int], rng: np.random.Generator) -> int:
    """Draw one arrival time in whole microseconds, clamped into the window.

    normal: N(midpoint, span/6) so +-3 sigma fills the window.
    exponential: window start + Exp(mean = span/3), front-loaded arrivals.
    uniform: U(start, end).
    """
    start, end = window
    if end <= start:
        raise WorkloadError(f"empty arrival window [{start}, {end}]")
    span = end - start
    if dist == "normal":
        x = rng.normal(start + span / 2, span / 6)
    elif dist == "exponential":
        x = start + rng.exponential(span / 3)
    elif dist == "uniform":
        x = rng.uniform(start, end)
    else:
        raise WorkloadError(f"unknown arrival distribution {dist!r}")
    return int(round(min(max(x, start), end)))


def sample_data_size(mean_kb: float, rng: np.random.Generator) -> float:
    """Draw a data size: N(mean, 0.15*mean) floored at 0.1*mean, 3-decimal KB."""
    x = rng.normal(mean_kb, 0.15 * mean_kb)
    return round(max(x, 0.1 * mean_kb), 3)


def generate_workload(
    scenario: ScenarioSpec, task_types: tuple[TaskTypeSpec, ...], seed: int
) -> list[TaskInstance]:
    """Generate count_per_type tasks of each type, sorted by arrival.

    Sort key is (arrival_time, type id, draw order); seq is assigned 0..M-1
    after sorting. Identical (scenario, task_types, seed) inputs reproduce
    the identical list.
    """
    window = (scenario.window_start, scenario.window_end)
    draws = []
    for tt in task_types:
        dist = scenario.dist_for(tt.id)
        rng = _type_rng(seed, tt.id)
        for k in range(scenario.count_per_type):
            arrival = sample_arrival(dist, window, rng)
            size = sample_data_size(tt.mean_data_size_kb, rng)
            draws.append((arrival, tt.id, k, size, tt.slack_us))
    draws.sort(key=lambda d: (d[0], d[1], d[2]))
    return [
        TaskInstance(
            task_type=tid,
            data_size=size,
            arrival_time=arrival,
            deadline=arrival + slack,
            seq=seq,
        )
        for seq, (arrival, tid, _k, size, slack) in enumerate(draws)
    ]


def _ms(us: int) -> str:
    """Microseconds as a milliseconds string with exactly 3 decimals."""
    sign = "-" if us < 0 else ""
    us = abs(us)
    return f"{sign}{us // US_PER_MS}.{us % US_PER_MS:03d}"


def _parse_ms(text: str, row: int, column: str) -> int:
    try:
        us = Decimal(text) * US_PER_MS
    except InvalidOperation:
        raise WorkloadError(f"row {row}: bad {column} value {text!r}") from None
    if us != int(us):
        raise WorkloadError(f"row {row}: {column} {text!r} is not a whole microsecond count")
    return int(us)


def write_workload_csv(tasks: list[TaskInstance], task_types: tuple[TaskTypeSpec, ...]) -> str:
    """Serialize tasks; times as milliseconds with 3 decimals."""
    names = {tt.id: tt.name for tt in task_types}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(WORKLOAD_COLUMNS)
    for t in tasks:
        writer.writerow([names[t.task_type], f"{t.data_size:.3f}", _ms(t.arrival_time), _ms(t.deadline)])
    return out.getvalue()


def read_workload_csv(text: str, task_types: tuple[TaskTypeSpec, ...]) -> list[TaskInstance]:
    """Parse a workload CSV; seq is assigned in file order.

    External files are authoritative: a deadline differing from
    arrival + slack is kept as-is (with a warning).
    """
    ids = {tt.name: tt.id for tt in task_types}
    slack = {tt.id: tt.slack_us for tt in task_types}
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise WorkloadError("empty workload file") from None
    if tuple(h.strip() for h in header) != WORKLOAD_COLUMNS:
        raise WorkloadError(f"bad header {header!r}, expected {','.join(WORKLOAD_COLUMNS)}")
    tasks = []
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise WorkloadError(f"row {row_no}: expected 4 columns, got {len(row)}")
        name, size_text, arrival_text, deadline_text = (c.strip() for c in row)
        if name not in ids:
            raise WorkloadError(f"row {row_no}: unknown task type {name!r}")
        try:
            size = float(size_text)
        except ValueError:
            raise WorkloadError(f"row {row_no}: bad data_size value {size_text!r}") from None
        arrival = _parse_ms(arrival_text, row_no, "arrival_time")
        deadline = _parse_ms(deadline_text, row_no, "deadline")
        if arrival < 0:
            raise WorkloadError(f"row {row_no}: negative arrival_time")
        if deadline <= arrival:
            raise WorkloadError(f"row {row_no}: deadline must be after arrival_time")
        tid = ids[name]
        if deadline != arrival + slack[tid]:
            warnings.warn(
                f"row {row_no}: deadline {deadline_text} ms differs from arrival + slack; keeping file value",
                stacklevel=2,
            )
        tasks.append(
            TaskInstance(
                task_type=tid,
                data_size=size,
                arrival_time=arrival,
                deadline=deadline,
                seq=len(tasks),
            )
        )
    return tasks
