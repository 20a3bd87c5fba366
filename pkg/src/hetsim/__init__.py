"""hetsim: deterministic task-scheduling simulator for heterogeneous machine parks."""

from ._backend import HAVE_KERNEL
from .engine import (
    BusyInterval,
    MachineState,
    SchedulingContractError,
    SimTrace,
    TaskRecord,
    TaskStatus,
    run_simulation,
)
from .metrics import EnergyLedger, SimReport, build_ledger, compute_report, write_report
from .model import (
    ConfigError,
    EetTable,
    Machine,
    MachineTypeSpec,
    SimConfig,
    TaskTypeSpec,
    default_config,
    eet_lookup,
    parse_config,
)
from .schedulers import Decision, Scheduler, StateView, make_scheduler
from .workload import (
    SCENARIOS,
    ScenarioSpec,
    TaskInstance,
    WorkloadError,
    generate_workload,
    read_workload_csv,
    sample_arrival,
    sample_data_size,
    scenario_by_name,
    write_workload_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BusyInterval",
    "ConfigError",
    "Decision",
    "EetTable",
    "EnergyLedger",
    "HAVE_KERNEL",
    "Machine",
    "MachineState",
    "MachineTypeSpec",
    "SCENARIOS",
    "ScenarioSpec",
    "Scheduler",
    "SchedulingContractError",
    "SimConfig",
    "SimReport",
    "SimTrace",
    "StateView",
    "TaskInstance",
    "TaskRecord",
    "TaskStatus",
    "TaskTypeSpec",
    "WorkloadError",
    "build_ledger",
    "compute_report",
    "default_config",
    "eet_lookup",
    "generate_workload",
    "make_scheduler",
    "parse_config",
    "read_workload_csv",
    "run_simulation",
    "sample_arrival",
    "sample_data_size",
    "scenario_by_name",
    "write_report",
    "write_workload_csv",
    "__version__",
]
