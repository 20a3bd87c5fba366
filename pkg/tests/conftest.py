import random

import pytest

from hetsim import TaskInstance, default_config


@pytest.fixture(scope="session")
def config():
    return default_config()


def random_workload(config, n_tasks, seed, window_us=5000):
    """Small random workload for oracle and cross-backend sweeps."""
    rng = random.Random(seed)
    draws = []
    for _ in range(n_tasks):
        tt = rng.choice(config.task_types)
        draws.append((rng.randint(0, window_us), tt))
    draws.sort(key=lambda d: d[0])
    return [
        TaskInstance(
            task_type=tt.id,
            data_size=round(rng.uniform(10.0, 150.0), 3),
            arrival_time=arrival,
            deadline=arrival + tt.slack_us,
            seq=seq,
        )
        for seq, (arrival, tt) in enumerate(draws)
    ]
