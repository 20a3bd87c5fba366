"""Domain model: machine park, task types, execution-time table, configuration.

All durations are integer microseconds internally; config documents use
milliseconds and are converted on parse. Power is integer watts, so energy
bookkeeping downstream stays exact (watts x microseconds = microjoules).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

US_PER_MS = 1000

SCHEDULING_METHODS = ("FCFS", "FCFS-NQ", "MECT", "MEET")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration documents."""


def canonical_method(name: str) -> str:
    """Normalize a scheduling-method name (case-insensitive, _ as -)."""
    norm = str(name).strip().upper().replace("_", "-")
    if norm not in SCHEDULING_METHODS:
        raise ConfigError(
            f"unknown scheduling method {name!r} (expected one of {', '.join(SCHEDULING_METHODS)})"
        )
    return norm


@dataclass(frozen=True)
class TaskTypeSpec:
    """One task class: id is 1-based declaration order, slack in microseconds."""

    id: int
    name: str
    mean_data_size_kb: float
    slack_us: int

    def __post_init__(self):
        if self.slack_us <= 0:
            raise ConfigError(f"task type {self.name!r}: slack must be positive")
        if self.mean_data_size_kb <= 0:
            raise ConfigError(f"task type {self.name!r}: mean data size must be positive")


@dataclass(frozen=True)
class MachineTypeSpec:
    """One machine class with its replica count and power draw in watts."""

    name: str
    power: int
    idle_power: int
    replicas: int

    def __post_init__(self):
        if not 0 <= self.idle_power <= self.power:
            raise ConfigError(f"machine type {self.name!r}: need 0 <= idle_power <= power")
        if self.replicas < 1:
            raise ConfigError(f"machine type {self.name!r}: replicas must be >= 1")


@dataclass(frozen=True)
class Machine:
    """One execution unit: a single replica of a machine type."""

    index: int
    type_spec: MachineTypeSpec
    replica: int

    @property
    def type_name(self) -> str:
        return self.type_spec.name

    @property
    def label(self) -> str:
        return f"{self.type_spec.name}#{self.replica}"


@dataclass(frozen=True)
class EetTable:
    """Execution time in microseconds per (task-type id, machine-type name)."""

    entries: dict[tuple[int, str], int]

    def us(self, task_type_id: int, machine_type_name: str) -> int:
        try:
            return self.entries[(task_type_id, machine_type_name)]
        except KeyError:
            raise KeyError(
                f"no execution time for task type {task_type_id} on {machine_type_name!r}"
            ) from None


@dataclass(frozen=True)
class SimConfig:
    """Validated simulation configuration.

    The machine park is flattened into `machines`, ordered by machine-type
    declaration order then replica number. That index order is the canonical
    machine order used for every lowest-index tie-break in the simulator.
    """

    machine_types: tuple[MachineTypeSpec, ...]
    task_types: tuple[TaskTypeSpec, ...]
    eet: EetTable
    scheduling_method: str
    battery_capacity: float | None = None  # accepted in documents, never used
    machines: tuple[Machine, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        park = []
        for spec in self.machine_types:
            for replica in range(spec.replicas):
                park.append(Machine(index=len(park), type_spec=spec, replica=replica))
        object.__setattr__(self, "machines", tuple(park))

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    def task_type_by_name(self, name: str) -> TaskTypeSpec:
        for tt in self.task_types:
            if tt.name == name:
                return tt
        raise KeyError(f"unknown task type {name!r}")

    def task_type_by_id(self, type_id: int) -> TaskTypeSpec:
        for tt in self.task_types:
            if tt.id == type_id:
                return tt
        raise KeyError(f"unknown task type id {type_id}")

    def eet_us(self, task_type_id: int, machine_index: int) -> int:
        """Execution time of a task type on a machine, by canonical index."""
        return eet_lookup(self, task_type_id, machine_index)


def eet_lookup(config: SimConfig, task_type_id: int, machine_index: int) -> int:
    """EET in microseconds; replica-invariant (depends only on the machine's type)."""
    if not 0 <= machine_index < config.n_machines:
        raise IndexError(
            f"machine index {machine_index} out of range 0..{config.n_machines - 1}"
        )
    return config.eet.us(task_type_id, config.machines[machine_index].type_name)


def _duration_us(value, path: str) -> int:
    """Convert a milliseconds number from a document to whole positive microseconds."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a duration in milliseconds, got {value!r}")
    us = round(value * US_PER_MS)
    if us <= 0:
        raise ConfigError(f"{path}: duration must be positive, got {value!r} ms")
    return us


def _int_field(obj, key: str, path: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return int(value)


def parse_config(text: str) -> SimConfig:
    """Parse and validate a JSON configuration document.

    Durations in the document are milliseconds (real numbers). Errors name
    the offending field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed configuration document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be an object")

    raw_tasks = doc.get("task_types")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise ConfigError("task_types: expected a non-empty list")
    task_types = []
    for i, item in enumerate(raw_tasks):
        path = f"task_types[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{path}: expected an object")
        name = item.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{path}.name: expected a non-empty string")
        if any(tt.name == name for tt in task_types):
            raise ConfigError(f"{path}.name: duplicate task type {name!r}")
        size = item.get("mean_data_size_kb")
        if isinstance(size, bool) or not isinstance(size, (int, float)) or size <= 0:
            raise ConfigError(f"{path}.mean_data_size_kb: expected a positive number")
        slack = _duration_us(item.get("slack_ms"), f"{path}.slack_ms")
        task_types.append(
            TaskTypeSpec(id=i + 1, name=name, mean_data_size_kb=float(size), slack_us=slack)
        )

    raw_machines = doc.get("machine_types")
    if not isinstance(raw_machines, list) or not raw_machines:
        raise ConfigError("machine_types: expected a non-empty list")
    machine_types = []
    entries = {}
    for i, item in enumerate(raw_machines):
        path = f"machine_types[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{path}: expected an object")
        name = item.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{path}.name: expected a non-empty string")
        if any(mt.name == name for mt in machine_types):
            raise ConfigError(f"{path}.name: duplicate machine type {name!r}")
        spec = MachineTypeSpec(
            name=name,
            power=_int_field(item, "power", path),
            idle_power=_int_field(item, "idle_power", path),
            replicas=_int_field(item, "replicas", path),
        )
        eet = item.get("eet")
        if not isinstance(eet, dict):
            raise ConfigError(f"{path}.eet: expected an object keyed by task type name")
        known = {tt.name: tt.id for tt in task_types}
        for task_name, ms in eet.items():
            if task_name not in known:
                raise ConfigError(f"{path}.eet: references unknown task type {task_name!r}")
            entries[(known[task_name], name)] = _duration_us(ms, f"{path}.eet.{task_name}")
        for tt in task_types:
            if (tt.id, name) not in entries:
                raise ConfigError(f"{path}.eet: missing entry for task type {tt.name!r}")
        machine_types.append(spec)

    method = doc.get("scheduling_method")
    if method is None:
        raise ConfigError("scheduling_method: missing")
    method = canonical_method(method)

    battery = doc.get("battery_capacity")
    if battery is not None and (isinstance(battery, bool) or not isinstance(battery, (int, float))):
        raise ConfigError("battery_capacity: expected a number")

    return SimConfig(
        machine_types=tuple(machine_types),
        task_types=tuple(task_types),
        eet=EetTable(entries),
        scheduling_method=method,
        battery_capacity=None if battery is None else float(battery),
    )


DEFAULT_CONFIG_TEXT = """\
{
  "machine_types": [
    {"name": "CPU",  "power": 150, "idle_power": 15, "replicas": 2,
     "eet": {"Task1": 5,   "Task2": 4,   "Task3": 3}},
    {"name": "GPU",  "power": 300, "idle_power": 30, "replicas": 4,
     "eet": {"Task1": 2,   "Task2": 1.5, "Task3": 1}},
    {"name": "ASIC", "power": 50,  "idle_power": 5,  "replicas": 2,
     "eet": {"Task1": 1,   "Task2": 0.8, "Task3": 0.5}}
  ],
  "task_types": [
    {"name": "Task1", "mean_data_size_kb": 100, "slack_ms": 2},
    {"name": "Task2", "mean_data_size_kb": 75,  "slack_ms": 1.5},
    {"name": "Task3", "mean_data_size_kb": 50,  "slack_ms": 1}
  ],
  "scheduling_method": "FCFS"
}
"""


def default_config(scheduling_method: str = "FCFS") -> SimConfig:
    """The built-in CPU/GPU/ASIC park: 2+4+2 machines, three task types."""
    cfg = parse_config(DEFAULT_CONFIG_TEXT)
    method = canonical_method(scheduling_method)
    if method == cfg.scheduling_method:
        return cfg
    return SimConfig(
        machine_types=cfg.machine_types,
        task_types=cfg.task_types,
        eet=cfg.eet,
        scheduling_method=method,
        battery_capacity=cfg.battery_capacity,
    )
