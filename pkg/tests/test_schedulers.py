import json

import pytest

from conftest import random_workload
from hetsim import ConfigError, TaskInstance, TaskStatus, make_scheduler, parse_config, run_simulation
from hetsim.schedulers import (
    ASSIGN,
    Decision,
    FcfsNqScheduler,
    FcfsScheduler,
    MachineView,
    MectScheduler,
    MeetScheduler,
    StateView,
)


def task(tid, arrival, slack, seq):
    return TaskInstance(tid, 1.0, arrival, arrival + slack, seq)


def view(config, now, ready):
    machines = tuple(
        MachineView(m.index, m.type_name, max(now, ready.get(m.index, now)))
        for m in config.machines
    )
    return StateView(now=now, machines=machines, central_queue_len=0)


class TestFcfs:
    def test_all_idle_takes_lowest_index(self, config):
        sched = FcfsScheduler(config)
        decision = sched.on_arrival(view(config, 0, {}), task(2, 0, 1500, 0))
        assert decision == Decision.assign(0)  # CPU#0

    def test_all_busy_holds_central(self, config):
        sched = FcfsScheduler(config)
        busy = {m.index: 10_000 for m in config.machines}
        decision = sched.on_arrival(view(config, 0, busy), task(1, 0, 2000, 0))
        assert decision == Decision.hold()
        assert sched.central_queue_len == 1

    def test_machine_idle_pops_fifo(self, config):
        sched = FcfsScheduler(config)
        busy = {m.index: 10_000 for m in config.machines}
        a, b = task(1, 0, 2000, 0), task(2, 0, 1500, 1)
        sched.on_arrival(view(config, 0, busy), a)
        sched.on_arrival(view(config, 0, busy), b)
        assert sched.on_machine_idle(view(config, 500, busy), 5) is a
        assert sched.central_queue_len == 1
        assert sched.on_machine_idle(view(config, 500, busy), 5) is b
        assert sched.on_machine_idle(view(config, 500, busy), 5) is None

    def test_expired_task_leaves_queue(self, config):
        sched = FcfsScheduler(config)
        busy = {m.index: 10_000 for m in config.machines}
        a, b = task(1, 0, 2000, 0), task(2, 0, 1500, 1)
        sched.on_arrival(view(config, 0, busy), a)
        sched.on_arrival(view(config, 0, busy), b)
        sched.on_task_expired(a)
        assert sched.on_machine_idle(view(config, 500, busy), 5) is b


class TestFcfsNq:
    def test_single_idle_machine_chosen(self, config):
        sched = FcfsNqScheduler(config)
        busy = {m.index: 10_000 for m in config.machines if m.index != 7}
        decision = sched.on_arrival(view(config, 0, busy), task(3, 0, 1000, 0))
        assert decision == Decision.assign(7)  # ASIC#1, the only idle machine

    def test_rejects_when_saturated(self, config):
        sched = FcfsNqScheduler(config)
        busy = {m.index: 10_000 for m in config.machines}
        assert sched.on_arrival(view(config, 0, busy), task(1, 0, 2000, 0)) == Decision.reject()

    def test_run_never_queues(self, config):
        workload = random_workload(config, 60, seed=3, window_us=2000)
        trace = run_simulation(config, workload, "FCFS-NQ", backend="pure")
        counts = trace.status_counts()
        assert counts[TaskStatus.DROPPED_IN_QUEUE] == 0
        assert counts[TaskStatus.REJECTED_AT_ARRIVAL] > 0


class TestMect:
    def test_all_idle_prefers_fastest_machine(self, config):
        sched = MectScheduler(config)
        decision = sched.on_arrival(view(config, 0, {}), task(1, 0, 2000, 0))
        assert decision == Decision.assign(6)  # ASIC#0: completion 1 ms

    def test_three_simultaneous_arrivals(self, config):
        # hand argmin: ASIC#0, then ASIC#1, then GPU#0 on the 2 ms tie
        workload = [task(1, 0, 2000, seq) for seq in range(3)]
        trace = run_simulation(config, workload, "MECT", backend="pure")
        assert [r.machine for r in trace.records] == [6, 7, 2]
        assert all(r.status is TaskStatus.COMPLETED for r in trace.records)

    def test_greedy_optimality_of_every_dispatch(self, config):
        # every choice minimizes backlog-ready + EET over all machines at that instant
        chosen = []

        class Spy(MectScheduler):
            def _choose(self, v, t):
                best = super()._choose(v, t)
                estimates = [
                    self._backlog_ready(v, m) + self.config.eet_us(t.task_type, m.index)
                    for m in v.machines
                ]
                chosen.append((best, estimates))
                return best

        workload = random_workload(config, 120, seed=9, window_us=30_000)
        run_simulation(config, workload, Spy(config), backend="pure")
        assert chosen
        for best, estimates in chosen:
            assert estimates[best] == min(estimates)
            assert best == min(i for i, e in enumerate(estimates) if e == min(estimates))


class TestMeet:
    def test_funnels_to_fastest_type_regardless_of_load(self, config):
        sched = MeetScheduler(config)
        busy = {6: 50_000, 7: 60_000}  # both ASICs deeply backlogged
        decision = sched.on_arrival(view(config, 0, busy), task(3, 0, 1000, 0))
        assert decision.kind == ASSIGN
        assert decision.machine == 6

    def test_least_ready_replica_wins(self, config):
        sched = MeetScheduler(config)
        decision = sched.on_arrival(view(config, 0, {6: 5000, 7: 3000}), task(1, 0, 2000, 0))
        assert decision == Decision.assign(7)

    def test_hundred_tasks_all_on_asic(self, config):
        workload = [task(1 + seq % 3, seq * 10, (2000, 1500, 1000)[seq % 3], seq) for seq in range(100)]
        trace = run_simulation(config, workload, "MEET", backend="pure")
        asic_indexes = {6, 7}
        for record in trace.records:
            if record.machine is not None:
                assert record.machine in asic_indexes
        dispatched = sum(len(m.busy_intervals) for m in trace.machines)
        assert dispatched == sum(len(trace.machines[i].busy_intervals) for i in asic_indexes)


class TestContract:
    def test_make_scheduler_case_insensitive(self, config):
        assert make_scheduler("fcfs", config).name == "FCFS"
        assert make_scheduler("Fcfs-Nq", config).name == "FCFS-NQ"
        assert make_scheduler("MECT", config).name == "MECT"

    def test_make_scheduler_unknown(self, config):
        with pytest.raises(ConfigError, match="unknown scheduling method"):
            make_scheduler("SJF", config)

    def test_fcfs_order_preserved_among_held_tasks(self, config):
        popped = []

        class Spy(FcfsScheduler):
            def on_machine_idle(self, v, machine_index):
                t = super().on_machine_idle(v, machine_index)
                if t is not None:
                    popped.append(t.seq)
                return t

        workload = random_workload(config, 150, seed=21, window_us=20_000)
        run_simulation(config, workload, Spy(config), backend="pure")
        assert popped == sorted(popped)

    def test_pending_backlog_accounting_balances(self, config):
        sched = MectScheduler(config)
        workload = random_workload(config, 200, seed=5, window_us=20_000)
        run_simulation(config, workload, sched, backend="pure")
        assert all(len(q) == 0 for q in sched._pending)
        assert sched._pending_work == [0] * config.n_machines


def single_machine_config(method="FCFS"):
    return parse_config(json.dumps({
        "machine_types": [
            {"name": "X", "power": 40, "idle_power": 4, "replicas": 1,
             "eet": {"T1": 0.9, "T2": 1.4, "T3": 0.6}},
        ],
        "task_types": [
            {"name": "T1", "mean_data_size_kb": 10, "slack_ms": 2},
            {"name": "T2", "mean_data_size_kb": 20, "slack_ms": 1.5},
            {"name": "T3", "mean_data_size_kb": 30, "slack_ms": 1},
        ],
        "scheduling_method": method,
    }))


@pytest.mark.parametrize("seed", range(50))
def test_degenerate_single_machine_equivalence(seed):
    # one machine type, one replica: FCFS, MECT, and MEET collapse to one FIFO
    cfg = single_machine_config()
    workload = random_workload(cfg, 15, seed, window_us=6000)
    completions = []
    for method in ("FCFS", "MECT", "MEET"):
        trace = run_simulation(cfg, workload, method, backend="pure")
        completions.append(
            {r.task.seq for r in trace.records if r.status is TaskStatus.COMPLETED}
        )
    assert completions[0] == completions[1] == completions[2]
