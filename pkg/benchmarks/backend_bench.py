#!/usr/bin/env python3
"""Benchmark the compiled event-loop kernel against the pure-Python engine.

Runs identical scenario x scheduler x seed cells on both backends, checks
that the traces match, and prints per-cell and aggregate timings.

Usage: python benchmarks/backend_bench.py [--seeds N] [--scenarios low,medium,high]
"""

import argparse
import time

from hetsim import HAVE_KERNEL, default_config, generate_workload, run_simulation
from hetsim.model import SCHEDULING_METHODS
from hetsim.workload import SCENARIOS


def time_backend(config, cells, backend):
    total = 0.0
    per_cell = {}
    for scenario, scheduler, seed, workload in cells:
        t0 = time.perf_counter()
        trace = run_simulation(config, workload, scheduler, backend=backend)
        dt = time.perf_counter() - t0
        total += dt
        per_cell.setdefault((scenario, scheduler), []).append(dt)
    return total, per_cell, trace


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=3, help="seeds per cell")
    parser.add_argument("--scenarios", default="low,medium,high")
    args = parser.parse_args()

    if not HAVE_KERNEL:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1

    config = default_config()
    scenario_names = [s.strip() for s in args.scenarios.split(",") if s.strip()]
    cells = []
    for scenario in scenario_names:
        for scheduler in SCHEDULING_METHODS:
            for seed in range(args.seeds):
                workload = generate_workload(SCENARIOS[scenario], config.task_types, seed)
                cells.append((scenario, scheduler, seed, workload))

    # correctness first: identical traces cell by cell
    for scenario, scheduler, seed, workload in cells:
        pure = run_simulation(config, workload, scheduler, backend="pure")
        fast = run_simulation(config, workload, scheduler, backend="compiled")
        if pure.to_json() != fast.to_json():
            print(f"BACKEND MISMATCH in {scenario}/{scheduler}/seed={seed}")
            return 1

    # warm caches so first-cell costs do not skew per-cell numbers
    run_simulation(config, cells[0][3], cells[0][1], backend="pure")
    run_simulation(config, cells[0][3], cells[0][1], backend="compiled")

    pure_total, pure_cells, _ = time_backend(config, cells, "pure")
    fast_total, fast_cells, _ = time_backend(config, cells, "compiled")

    print(f"{len(cells)} cells ({len(scenario_names)} scenarios x "
          f"{len(SCHEDULING_METHODS)} schedulers x {args.seeds} seeds), traces identical\n")
    print(f"{'cell':28s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for key in sorted(pure_cells):
        p = sum(pure_cells[key]) / len(pure_cells[key])
        f = sum(fast_cells[key]) / len(fast_cells[key])
        print(f"{key[0] + '/' + key[1]:28s} {p * 1e3:8.2f}ms {f * 1e3:8.2f}ms {p / f:7.1f}x")
    print(f"\n{'total':28s} {pure_total * 1e3:8.2f}ms {fast_total * 1e3:8.2f}ms "
          f"{pure_total / fast_total:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
