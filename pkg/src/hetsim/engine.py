"""Deterministic discrete-event simulation core.

Event order is the strict total order (time, class, insertion counter) with
classes Completion=0 < DeadlineCheck=1 < Arrival=2. Completion before
DeadlineCheck at the same timestamp makes completion deadline-inclusive
(finishing exactly at the deadline succeeds); both before Arrival means
machines free up before new work is placed.

Rules the reference (brute-force) simulator must reproduce:
  - every task gets a DeadlineCheck at its deadline, scheduled while its
    Arrival is processed, whatever the arrival decision was;
  - a task still running at its deadline is cancelled there, freeing the
    machine and leaving a partial (not-completed) busy interval;
  - a task may only start while now < deadline; a queued task popped at its
    deadline is dropped, and the next queue entry is considered;
  - same-timestamp completions are processed in dispatch order (the
    insertion counter of a completion event is taken at dispatch time).

The accounting horizon is max(1_000_000 us, time of the last processed
event); stale completion events of cancelled tasks are skipped and do not
count as processed.
"""

from __future__ import annotations

import enum
import heapq
import json
from dataclasses import dataclass, field
from typing import Callable

from .model import SimConfig
from .schedulers import ASSIGN, HOLD_CENTRAL, MachineView, Scheduler, StateView, make_scheduler
from .workload import TaskInstance

MIN_HORIZON_US = 1_000_000

EVENT_COMPLETION = 0
EVENT_DEADLINE = 1
EVENT_ARRIVAL = 2

_EVENT_NAMES = {EVENT_COMPLETION: "completion", EVENT_DEADLINE: "deadline", EVENT_ARRIVAL: "arrival"}

TraceHook = Callable[[str], None]


class SchedulingContractError(RuntimeError):
    """A scheduler violated its contract with the engine."""


class TaskStatus(enum.Enum):
    COMPLETED = "completed"
    REJECTED_AT_ARRIVAL = "rejected_at_arrival"
    DROPPED_IN_QUEUE = "dropped_in_queue"
    CANCELLED_RUNNING = "cancelled_running"


@dataclass(frozen=True)
class TaskRecord:
    """Final outcome of one task.

    finish_or_cancel is the completion time, the deadline for cancelled or
    dropped tasks, and None for tasks rejected at arrival.
    """

    task: TaskInstance
    status: TaskStatus
    machine: int | None = None
    start: int | None = None
    finish_or_cancel: int | None = None


@dataclass(frozen=True)
class BusyInterval:
    start: int
    end: int
    task_seq: int
    completed: bool


@dataclass
class MachineState:
    index: int
    type_name: str
    busy_until: int = 0
    current: tuple[TaskInstance, int] | None = None  # (task, start)
    busy_intervals: list[BusyInterval] = field(default_factory=list)


@dataclass
class SimTrace:
    records: list[TaskRecord]
    machines: list[MachineState]
    horizon: int

    def status_counts(self) -> dict[TaskStatus, int]:
        counts = {status: 0 for status in TaskStatus}
        for rec in self.records:
            counts[rec.status] += 1
        return counts

    def to_json(self) -> str:
        """Stable serialization, used for byte-level determinism checks."""
        doc = {
            "horizon": self.horizon,
            "records": [
                {
                    "seq": r.task.seq,
                    "task_type": r.task.task_type,
                    "arrival": r.task.arrival_time,
                    "deadline": r.task.deadline,
                    "status": r.status.value,
                    "machine": r.machine,
                    "start": r.start,
                    "finish_or_cancel": r.finish_or_cancel,
                }
                for r in self.records
            ],
            "machines": [
                {
                    "index": m.index,
                    "type": m.type_name,
                    "intervals": [[iv.start, iv.end, iv.task_seq, iv.completed] for iv in m.busy_intervals],
                }
                for m in self.machines
            ],
        }
        return json.dumps(doc, separators=(",", ":"))


def run_simulation(
    config: SimConfig,
    workload: list[TaskInstance],
    scheduler: Scheduler | str,
    *,
    backend: str = "auto",
    trace_hook: TraceHook | None = None,
) -> SimTrace:
    """Simulate a workload on the configured park under one policy.

    `scheduler` is a policy name or a Scheduler instance (instances always
    run on the pure backend). backend: "auto" picks the compiled kernel when
    available, "compiled" requires it, "pure" forces the Python engine.
    """
    for task in workload:
        if task.deadline <= task.arrival_time:
            raise ValueError(f"task {task.seq}: deadline must be after arrival")
    for prev, cur in zip(workload, workload[1:]):
        if (cur.arrival_time, cur.seq) < (prev.arrival_time, prev.seq):
            raise ValueError("workload must be sorted by (arrival_time, seq)")
    if len({task.seq for task in workload}) != len(workload):
        raise ValueError("workload task seq values must be unique")
    if backend not in ("auto", "compiled", "pure"):
        raise ValueError(f"unknown backend {backend!r}")

    if isinstance(scheduler, str) and trace_hook is None and backend != "pure":
        from . import _backend

        if _backend.HAVE_KERNEL:
            return _backend.run_kernel(config, workload, scheduler)
        if backend == "compiled":
            raise RuntimeError("compiled kernel requested but not built")
    elif backend == "compiled":
        raise RuntimeError("compiled backend supports built-in policies only, without trace hooks")

    if isinstance(scheduler, str):
        scheduler = make_scheduler(scheduler, config)
    return _run_pure(config, workload, scheduler, trace_hook)


# engine-side task marker; queue contents live in the scheduler. Unresolved
# tasks map to _HELD or to the index of the machine running them.
_HELD = -2


def _run_pure(
    config: SimConfig,
    workload: list[TaskInstance],
    scheduler: Scheduler,
    trace_hook: TraceHook | None,
) -> SimTrace:
    machines = [MachineState(m.index, m.type_name) for m in config.machines]
    records: dict[int, TaskRecord] = {}
    state: dict[int, int] = {}  # seq -> _HELD or machine index while unresolved

    heap: list[tuple[int, int, int, object]] = []
    counter = 0
    for task in workload:
        heap.append((task.arrival_time, EVENT_ARRIVAL, counter, task))
        counter += 1
    heapq.heapify(heap)

    last_event_time = 0
    emit = trace_hook

    def log(now: int, cls: int, task_seq: int, machine_index: int, action: str) -> None:
        emit(f"{now},{_EVENT_NAMES[cls]},{task_seq},{machine_index},{action}")

    def view_at(now: int) -> StateView:
        return StateView(
            now=now,
            machines=tuple(
                MachineView(ms.index, ms.type_name, max(now, ms.busy_until)) for ms in machines
            ),
            central_queue_len=scheduler.central_queue_len,
        )

    def resolve(task: TaskInstance, status: TaskStatus, machine=None, start=None, finish=None) -> None:
        records[task.seq] = TaskRecord(task, status, machine, start, finish)
        state.pop(task.seq, None)

    def dispatch(task: TaskInstance, machine_index: int, now: int) -> None:
        nonlocal counter
        ms = machines[machine_index]
        if ms.current is not None:
            raise SchedulingContractError(
                f"{scheduler.name}: machine {machine_index} already busy at t={now}"
            )
        assert now < task.deadline
        eet = config.eet_us(task.task_type, machine_index)
        ms.current = (task, now)
        ms.busy_until = now + eet
        state[task.seq] = machine_index
        heapq.heappush(heap, (ms.busy_until, EVENT_COMPLETION, counter, (machine_index, task.seq)))
        counter += 1

    def free_machine(ms: MachineState, now: int, completed: bool) -> TaskInstance:
        task, start = ms.current
        ms.busy_intervals.append(BusyInterval(start, now, task.seq, completed))
        ms.current = None
        ms.busy_until = now
        return task

    def pull_next(machine_index: int, now: int) -> None:
        # Feed the freed machine; queue heads already at/past deadline are dropped.
        while True:
            nxt = scheduler.on_machine_idle(view_at(now), machine_index)
            if nxt is None:
                return
            if nxt.deadline <= now:
                resolve(nxt, TaskStatus.DROPPED_IN_QUEUE, finish=nxt.deadline)
                continue
            dispatch(nxt, machine_index, now)
            return

    while heap:
        now, cls, _, payload = heapq.heappop(heap)

        if cls == EVENT_COMPLETION:
            machine_index, task_seq = payload
            ms = machines[machine_index]
            if ms.current is None or ms.current[0].seq != task_seq:
                continue  # stale event of a cancelled task; not a processed event
            last_event_time = now
            task = free_machine(ms, now, completed=True)
            start = ms.busy_intervals[-1].start
            assert now <= task.deadline
            resolve(task, TaskStatus.COMPLETED, machine_index, start, now)
            if emit:
                log(now, cls, task_seq, machine_index, "complete")
            pull_next(machine_index, now)

        elif cls == EVENT_DEADLINE:
            last_event_time = now
            task = payload
            if task.seq not in state:
                if emit:
                    log(now, cls, task.seq, -1, "noop")
                continue
            where = state[task.seq]
            if where == _HELD:
                scheduler.on_task_expired(task)
                resolve(task, TaskStatus.DROPPED_IN_QUEUE, finish=now)
                if emit:
                    log(now, cls, task.seq, -1, "drop_queued")
            else:
                machine_index = where
                ms = machines[machine_index]
                free_machine(ms, now, completed=False)
                start = ms.busy_intervals[-1].start
                resolve(task, TaskStatus.CANCELLED_RUNNING, machine_index, start, now)
                if emit:
                    log(now, cls, task.seq, machine_index, "cancel_running")
                pull_next(machine_index, now)

        else:  # EVENT_ARRIVAL
            last_event_time = now
            task = payload
            heapq.heappush(heap, (task.deadline, EVENT_DEADLINE, counter, task))
            counter += 1
            decision = scheduler.on_arrival(view_at(now), task)
            if decision.kind == ASSIGN:
                if not 0 <= decision.machine < len(machines):
                    raise SchedulingContractError(
                        f"{scheduler.name}: assigned task {task.seq} to unknown machine "
                        f"{decision.machine}"
                    )
                ms = machines[decision.machine]
                if ms.current is None:
                    dispatch(task, decision.machine, now)
                    if emit:
                        log(now, cls, task.seq, decision.machine, "assign")
                elif scheduler.pending_queues:
                    state[task.seq] = _HELD
                    if emit:
                        log(now, cls, task.seq, decision.machine, "enqueue_pending")
                else:
                    raise SchedulingContractError(
                        f"{scheduler.name}: assigned task {task.seq} to busy machine "
                        f"{decision.machine} at t={now}"
                    )
            elif decision.kind == HOLD_CENTRAL:
                state[task.seq] = _HELD
                if emit:
                    log(now, cls, task.seq, -1, "hold_central")
            else:
                resolve(task, TaskStatus.REJECTED_AT_ARRIVAL)
                if emit:
                    log(now, cls, task.seq, -1, "reject")

    assert len(records) == len(workload), "every task must resolve to exactly one status"
    ordered = [records[task.seq] for task in sorted(workload, key=lambda t: t.seq)]
    return SimTrace(
        records=ordered,
        machines=machines,
        horizon=max(MIN_HORIZON_US, last_event_time),
    )
