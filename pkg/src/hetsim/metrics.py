"""Energy ledger and per-run report computation over a simulation trace.

Energy is integer microjoules throughout (watts x microseconds), so the
ledger identities are integer equalities:

    total == active + idle
    active == energy of completed intervals + wasted

Values are rendered as millijoules with exactly 3 decimals, percentages
half-up to 2 decimals, and only at serialization time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .engine import SimTrace, TaskStatus
from .model import SimConfig


class ReportError(ValueError):
    """Raised for malformed report documents."""


def mj_str(uj: int) -> str:
    """Microjoules as a millijoule string with exactly 3 decimals (exact)."""
    sign = "-" if uj < 0 else ""
    uj = abs(uj)
    return f"{sign}{uj // 1000}.{uj % 1000:03d}"


def mj_to_uj(text: str) -> int:
    value = Decimal(text) * 1000
    if value != int(value):
        raise ReportError(f"energy value {text!r} is not a whole microjoule count")
    return int(value)


def pct_str(numerator: int, denominator: int) -> str:
    """100 * numerator / denominator, rounded half-up to 2 decimals."""
    if denominator == 0:
        return "0.00"
    pct = Decimal(100 * numerator) / Decimal(denominator)
    return str(pct.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class MachineEnergy:
    machine_index: int
    type_name: str
    busy_us: int
    completed_busy_us: int
    active_uj: int
    idle_uj: int
    wasted_uj: int

    @property
    def total_uj(self) -> int:
        return self.active_uj + self.idle_uj


@dataclass(frozen=True)
class EnergyLedger:
    horizon_us: int
    machines: tuple[MachineEnergy, ...]

    @property
    def active_uj(self) -> int:
        return sum(m.active_uj for m in self.machines)

    @property
    def idle_uj(self) -> int:
        return sum(m.idle_uj for m in self.machines)

    @property
    def wasted_uj(self) -> int:
        return sum(m.wasted_uj for m in self.machines)

    @property
    def total_uj(self) -> int:
        return self.active_uj + self.idle_uj

    def verify(self, trace: SimTrace, config: SimConfig) -> None:
        """Re-derive every identity from the raw busy intervals; raises on drift."""
        for entry, state, machine in zip(self.machines, trace.machines, config.machines):
            power = machine.type_spec.power
            idle_power = machine.type_spec.idle_power
            busy = sum(iv.end - iv.start for iv in state.busy_intervals)
            completed = sum(iv.end - iv.start for iv in state.busy_intervals if iv.completed)
            if busy > self.horizon_us:
                raise AssertionError(f"machine {entry.machine_index}: busy time exceeds horizon")
            if entry.busy_us != busy or entry.completed_busy_us != completed:
                raise AssertionError(f"machine {entry.machine_index}: busy-time mismatch")
            if entry.active_uj != power * busy:
                raise AssertionError(f"machine {entry.machine_index}: active energy mismatch")
            if entry.wasted_uj != power * (busy - completed):
                raise AssertionError(f"machine {entry.machine_index}: wasted energy mismatch")
            if entry.active_uj != power * completed + entry.wasted_uj:
                raise AssertionError(f"machine {entry.machine_index}: active != completed + wasted")
            if entry.idle_uj != idle_power * (self.horizon_us - busy):
                raise AssertionError(f"machine {entry.machine_index}: idle energy mismatch")
            if entry.wasted_uj > entry.active_uj:
                raise AssertionError(f"machine {entry.machine_index}: wasted exceeds active")
            if entry.total_uj != entry.active_uj + entry.idle_uj:
                raise AssertionError(f"machine {entry.machine_index}: total != active + idle")
        if self.total_uj != self.active_uj + self.idle_uj:
            raise AssertionError("aggregate total != active + idle")


def build_ledger(trace: SimTrace, config: SimConfig) -> EnergyLedger:
    machines = []
    for state, machine in zip(trace.machines, config.machines):
        power = machine.type_spec.power
        idle_power = machine.type_spec.idle_power
        busy = 0
        completed = 0
        for iv in state.busy_intervals:
            busy += iv.end - iv.start
            if iv.completed:
                completed += iv.end - iv.start
        machines.append(
            MachineEnergy(
                machine_index=machine.index,
                type_name=machine.type_name,
                busy_us=busy,
                completed_busy_us=completed,
                active_uj=power * busy,
                idle_uj=idle_power * (trace.horizon - busy),
                wasted_uj=power * (busy - completed),
            )
        )
    return EnergyLedger(horizon_us=trace.horizon, machines=tuple(machines))


@dataclass(frozen=True)
class SimReport:
    """Per-run metric bundle; exact internals, formatting at serialization."""

    scenario: str
    scheduler: str
    seed: int
    total_tasks: int
    completed: int
    rejected_at_arrival: int
    dropped_in_queue: int
    cancelled_running: int
    active_uj: int
    idle_uj: int
    wasted_uj: int
    # dispatched-task counts (completed + cancelled) per machine type, in
    # machine-type declaration order
    assignments: tuple[tuple[str, int], ...]

    @property
    def total_uj(self) -> int:
        return self.active_uj + self.idle_uj

    @property
    def completion_pct(self) -> str:
        return pct_str(self.completed, self.total_tasks)

    @property
    def energy_per_completion_mj(self) -> str | None:
        if self.completed == 0:
            return None
        value = Decimal(self.total_uj) / Decimal(1000 * self.completed)
        return str(value.quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))

    def csv_header(self) -> str:
        fixed = (
            "scenario,scheduler,seed,total_tasks,completed,rejected_at_arrival,"
            "dropped_in_queue,cancelled_running,completion_pct,total_energy_mJ,"
            "active_energy_mJ,idle_energy_mJ,wasted_energy_mJ,energy_per_completion_mJ"
        )
        return fixed + "".join(f",assigned_{name}" for name, _ in self.assignments)

    def csv_row(self) -> str:
        epc = self.energy_per_completion_mj
        cells = [
            self.scenario,
            self.scheduler,
            str(self.seed),
            str(self.total_tasks),
            str(self.completed),
            str(self.rejected_at_arrival),
            str(self.dropped_in_queue),
            str(self.cancelled_running),
            self.completion_pct,
            mj_str(self.total_uj),
            mj_str(self.active_uj),
            mj_str(self.idle_uj),
            mj_str(self.wasted_uj),
            "" if epc is None else epc,
        ]
        cells.extend(str(count) for _, count in self.assignments)
        return ",".join(cells)

    def to_json(self) -> str:
        doc = {
            "scenario": self.scenario,
            "scheduler": self.scheduler,
            "seed": self.seed,
            "total_tasks": self.total_tasks,
            "completed": self.completed,
            "rejected_at_arrival": self.rejected_at_arrival,
            "dropped_in_queue": self.dropped_in_queue,
            "cancelled_running": self.cancelled_running,
            "completion_pct": self.completion_pct,
            "total_energy_mJ": mj_str(self.total_uj),
            "active_energy_mJ": mj_str(self.active_uj),
            "idle_energy_mJ": mj_str(self.idle_uj),
            "wasted_energy_mJ": mj_str(self.wasted_uj),
            "energy_per_completion_mJ": self.energy_per_completion_mj,
            "assignments_per_machine_type": dict(self.assignments),
        }
        return json.dumps(doc, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "SimReport":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ReportError(f"malformed report document: {exc}") from exc
        try:
            return SimReport(
                scenario=doc["scenario"],
                scheduler=doc["scheduler"],
                seed=int(doc["seed"]),
                total_tasks=int(doc["total_tasks"]),
                completed=int(doc["completed"]),
                rejected_at_arrival=int(doc["rejected_at_arrival"]),
                dropped_in_queue=int(doc["dropped_in_queue"]),
                cancelled_running=int(doc["cancelled_running"]),
                active_uj=mj_to_uj(doc["active_energy_mJ"]),
                idle_uj=mj_to_uj(doc["idle_energy_mJ"]),
                wasted_uj=mj_to_uj(doc["wasted_energy_mJ"]),
                assignments=tuple(
                    (name, int(count)) for name, count in doc["assignments_per_machine_type"].items()
                ),
            )
        except KeyError as exc:
            raise ReportError(f"report document missing field {exc}") from exc


def compute_report(
    trace: SimTrace, config: SimConfig, scenario: str, scheduler: str, seed: int
) -> SimReport:
    """Aggregate a trace into a report; ledger identities are re-verified."""
    ledger = build_ledger(trace, config)
    ledger.verify(trace, config)

    counts = trace.status_counts()
    per_type = {mt.name: 0 for mt in config.machine_types}
    for state, machine in zip(trace.machines, config.machines):
        per_type[machine.type_name] += len(state.busy_intervals)

    return SimReport(
        scenario=scenario,
        scheduler=scheduler,
        seed=seed,
        total_tasks=len(trace.records),
        completed=counts[TaskStatus.COMPLETED],
        rejected_at_arrival=counts[TaskStatus.REJECTED_AT_ARRIVAL],
        dropped_in_queue=counts[TaskStatus.DROPPED_IN_QUEUE],
        cancelled_running=counts[TaskStatus.CANCELLED_RUNNING],
        active_uj=ledger.active_uj,
        idle_uj=ledger.idle_uj,
        wasted_uj=ledger.wasted_uj,
        assignments=tuple((mt.name, per_type[mt.name]) for mt in config.machine_types),
    )


def write_report(report: SimReport, form: str = "json") -> str:
    """Serialize a report: "json" (round-trippable) or "csv" (one row)."""
    if form == "json":
        return report.to_json()
    if form == "csv":
        return report.csv_row() + "\n"
    raise ValueError(f"unknown report form {form!r}")
