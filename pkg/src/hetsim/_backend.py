"""Bridge to the compiled event-loop kernel, with import-time detection.

The kernel covers the four built-in policies; anything else (custom
Scheduler instances, trace hooks) runs on the pure-Python engine. Both
backends produce identical traces; tests enforce it.
"""

from __future__ import annotations

import numpy as np

try:
    from . import _kernel
except ImportError:  # pragma: no cover - source tree without built extension
    _kernel = None

HAVE_KERNEL = _kernel is not None

_POLICY_CODES = {"FCFS": 0, "FCFS-NQ": 1, "MECT": 2, "MEET": 3}

_STATUS_CODES = None  # filled lazily to avoid an import cycle


def run_kernel(config, workload, scheduler_name):
    from .engine import BusyInterval, MachineState, SimTrace, TaskRecord, TaskStatus
    from .model import canonical_method

    global _STATUS_CODES
    if _STATUS_CODES is None:
        _STATUS_CODES = {
            0: TaskStatus.COMPLETED,
            1: TaskStatus.REJECTED_AT_ARRIVAL,
            2: TaskStatus.DROPPED_IN_QUEUE,
            3: TaskStatus.CANCELLED_RUNNING,
        }

    policy = _POLICY_CODES[canonical_method(scheduler_name)]
    n_machines = config.n_machines
    type_pos = {tt.id: i for i, tt in enumerate(config.task_types)}
    n_types = len(config.task_types)

    eet = np.empty(n_types * n_machines, dtype=np.int64)
    meet_mask = np.zeros(n_types * n_machines, dtype=np.int8)
    for tt in config.task_types:
        row = type_pos[tt.id] * n_machines
        for m in range(n_machines):
            eet[row + m] = config.eet_us(tt.id, m)
        best = min(eet[row : row + n_machines])
        for m in range(n_machines):
            if eet[row + m] == best:
                meet_mask[row + m] = 1

    task_type = np.fromiter((type_pos[t.task_type] for t in workload), dtype=np.int64, count=len(workload))
    arrival = np.fromiter((t.arrival_time for t in workload), dtype=np.int64, count=len(workload))
    deadline = np.fromiter((t.deadline for t in workload), dtype=np.int64, count=len(workload))

    (
        status,
        machine,
        start,
        finish,
        iv_machine,
        iv_start,
        iv_end,
        iv_pos,
        iv_done,
        horizon,
        busy_until,
    ) = _kernel.simulate(task_type, arrival, deadline, eet, meet_mask, n_machines, policy)

    by_seq = {}
    for pos, task in enumerate(workload):
        m = int(machine[pos])
        s = int(start[pos])
        f = int(finish[pos])
        by_seq[task.seq] = TaskRecord(
            task=task,
            status=_STATUS_CODES[int(status[pos])],
            machine=m if m >= 0 else None,
            start=s if s >= 0 else None,
            finish_or_cancel=f if f >= 0 else None,
        )
    records = [by_seq[seq] for seq in sorted(by_seq)]

    machines = [MachineState(m.index, m.type_name, busy_until=int(busy_until[m.index])) for m in config.machines]
    for k in range(len(iv_machine)):
        machines[int(iv_machine[k])].busy_intervals.append(
            BusyInterval(
                start=int(iv_start[k]),
                end=int(iv_end[k]),
                task_seq=workload[int(iv_pos[k])].seq,
                completed=bool(iv_done[k]),
            )
        )

    return SimTrace(records=records, machines=machines, horizon=int(horizon))
