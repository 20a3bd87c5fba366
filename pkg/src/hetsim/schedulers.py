"""The four mapping policies behind one scheduler contract.

The engine calls `on_arrival` for every task, `on_machine_idle` whenever a
machine frees up, and `on_task_expired` when a held task's deadline passes.
Schedulers own their queue state; the engine owns task status bookkeeping.

Tie-breaks are fixed throughout: (metric, ready time where applicable,
canonical machine index). Decision time is deadline-unaware by design; a
hopeless assignment is made anyway and dies in the queue or on the machine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import SimConfig, canonical_method
from .workload import TaskInstance


@dataclass(frozen=True)
class MachineView:
    """Engine-observable machine state at one instant."""

    index: int
    type_name: str
    ready_time: int  # max(now, busy_until); excludes any pending backlog

    def idle(self, now: int) -> bool:
        return self.ready_time == now


@dataclass(frozen=True)
class StateView:
    now: int
    machines: tuple[MachineView, ...]
    central_queue_len: int


ASSIGN = "assign"
HOLD_CENTRAL = "hold_central"
REJECT = "reject"


@dataclass(frozen=True)
class Decision:
    kind: str
    machine: int = -1

    @staticmethod
    def assign(machine: int) -> "Decision":
        return Decision(ASSIGN, machine)

    @staticmethod
    def hold() -> "Decision":
        return Decision(HOLD_CENTRAL)

    @staticmethod
    def reject() -> "Decision":
        return Decision(REJECT)


class Scheduler:
    """Base contract. An instance is owned by exactly one simulation run."""

    name: str = "?"
    # True when Assign(m) to a busy machine is legal and means "append to
    # machine m's pending FIFO" (the scheduler has already enqueued it).
    pending_queues = False

    def __init__(self, config: SimConfig):
        self.config = config

    @property
    def central_queue_len(self) -> int:
        return 0

    def on_arrival(self, view: StateView, task: TaskInstance) -> Decision:
        raise NotImplementedError

    def on_machine_idle(self, view: StateView, machine_index: int) -> TaskInstance | None:
        return None

    def on_task_expired(self, task: TaskInstance) -> None:
        raise AssertionError(f"{self.name} never holds tasks")


def _lowest_idle(view: StateView) -> int:
    for m in view.machines:
        if m.idle(view.now):
            return m.index
    return -1


class FcfsScheduler(Scheduler):
    """First idle machine in canonical order; waiters hold in a central FIFO."""

    name = "FCFS"

    def __init__(self, config: SimConfig):
        super().__init__(config)
        self._queue: deque[TaskInstance] = deque()

    @property
    def central_queue_len(self) -> int:
        return len(self._queue)

    def on_arrival(self, view: StateView, task: TaskInstance) -> Decision:
        idle = _lowest_idle(view)
        if idle >= 0:
            return Decision.assign(idle)
        self._queue.append(task)
        return Decision.hold()

    def on_machine_idle(self, view: StateView, machine_index: int) -> TaskInstance | None:
        if self._queue:
            return self._queue.popleft()
        return None

    def on_task_expired(self, task: TaskInstance) -> None:
        self._queue.remove(task)


class FcfsNqScheduler(Scheduler):
    """FCFS without queuing: reject on arrival when no machine is idle."""

    name = "FCFS-NQ"

    def on_arrival(self, view: StateView, task: TaskInstance) -> Decision:
        idle = _lowest_idle(view)
        if idle >= 0:
            return Decision.assign(idle)
        return Decision.reject()


class _PendingQueueScheduler(Scheduler):
    """Shared machinery for policies that map at arrival onto per-machine FIFOs."""

    pending_queues = True

    def __init__(self, config: SimConfig):
        super().__init__(config)
        n = config.n_machines
        self._pending: list[deque[TaskInstance]] = [deque() for _ in range(n)]
        self._pending_work = [0] * n  # summed EET of queued tasks, microseconds
        self._held_on: dict[int, int] = {}  # task seq -> machine index

    def _backlog_ready(self, view: StateView, machine: MachineView) -> int:
        """Machine ready time including all queued (pending) work."""
        return machine.ready_time + self._pending_work[machine.index]

    def _choose(self, view: StateView, task: TaskInstance) -> int:
        raise NotImplementedError

    def on_arrival(self, view: StateView, task: TaskInstance) -> Decision:
        m = self._choose(view, task)
        if not view.machines[m].idle(view.now):
            self._pending[m].append(task)
            self._pending_work[m] += self.config.eet_us(task.task_type, m)
            self._held_on[task.seq] = m
        return Decision.assign(m)

    def on_machine_idle(self, view: StateView, machine_index: int) -> TaskInstance | None:
        queue = self._pending[machine_index]
        if not queue:
            return None
        task = queue.popleft()
        self._pending_work[machine_index] -= self.config.eet_us(task.task_type, machine_index)
        del self._held_on[task.seq]
        return task

    def on_task_expired(self, task: TaskInstance) -> None:
        m = self._held_on.pop(task.seq)
        self._pending[m].remove(task)
        self._pending_work[m] -= self.config.eet_us(task.task_type, m)


class MectScheduler(_PendingQueueScheduler):
    """Minimum expected completion time: argmin over backlog-ready + EET."""

    name = "MECT"

    def _choose(self, view: StateView, task: TaskInstance) -> int:
        best = -1
        best_completion = 0
        for m in view.machines:
            completion = self._backlog_ready(view, m) + self.config.eet_us(task.task_type, m.index)
            if best < 0 or completion < best_completion:
                best, best_completion = m.index, completion
        return best


class MeetScheduler(_PendingQueueScheduler):
    """Minimum expected execution time: a machine of the globally fastest
    type for the task, least backlog-ready first."""

    name = "MEET"

    def __init__(self, config: SimConfig):
        super().__init__(config)
        self._candidates: dict[int, tuple[int, ...]] = {}
        for tt in config.task_types:
            best_eet = min(config.eet_us(tt.id, m.index) for m in config.machines)
            self._candidates[tt.id] = tuple(
                m.index for m in config.machines if config.eet_us(tt.id, m.index) == best_eet
            )

    def _choose(self, view: StateView, task: TaskInstance) -> int:
        best = -1
        best_ready = 0
        for idx in self._candidates[task.task_type]:
            ready = self._backlog_ready(view, view.machines[idx])
            if best < 0 or ready < best_ready:
                best, best_ready = idx, ready
        return best


_POLICIES = {
    "FCFS": FcfsScheduler,
    "FCFS-NQ": FcfsNqScheduler,
    "MECT": MectScheduler,
    "MEET": MeetScheduler,
}


def make_scheduler(name: str, config: SimConfig) -> Scheduler:
    """Build a fresh scheduler by canonical name (case-insensitive input)."""
    return _POLICIES[canonical_method(name)](config)
