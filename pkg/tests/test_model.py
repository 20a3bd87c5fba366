import json

import pytest

from hetsim import ConfigError, default_config, eet_lookup, parse_config
from hetsim.model import DEFAULT_CONFIG_TEXT, canonical_method


def doc(**overrides):
    base = json.loads(DEFAULT_CONFIG_TEXT)
    base.update(overrides)
    return json.dumps(base)


class TestDefaultConfig:
    def test_park_layout(self, config):
        assert len(config.machine_types) == 3
        assert config.n_machines == 8
        assert [m.label for m in config.machines] == [
            "CPU#0", "CPU#1", "GPU#0", "GPU#1", "GPU#2", "GPU#3", "ASIC#0", "ASIC#1",
        ]

    def test_machine_specs(self, config):
        by_name = {mt.name: mt for mt in config.machine_types}
        assert (by_name["CPU"].power, by_name["CPU"].idle_power, by_name["CPU"].replicas) == (150, 15, 2)
        assert (by_name["GPU"].power, by_name["GPU"].idle_power, by_name["GPU"].replicas) == (300, 30, 4)
        assert (by_name["ASIC"].power, by_name["ASIC"].idle_power, by_name["ASIC"].replicas) == (50, 5, 2)

    def test_task_types(self, config):
        assert [(tt.id, tt.name, tt.mean_data_size_kb, tt.slack_us) for tt in config.task_types] == [
            (1, "Task1", 100.0, 2000),
            (2, "Task2", 75.0, 1500),
            (3, "Task3", 50.0, 1000),
        ]

    def test_eet_values_microseconds(self, config):
        expect = {
            ("CPU", 1): 5000, ("CPU", 2): 4000, ("CPU", 3): 3000,
            ("GPU", 1): 2000, ("GPU", 2): 1500, ("GPU", 3): 1000,
            ("ASIC", 1): 1000, ("ASIC", 2): 800, ("ASIC", 3): 500,
        }
        for (machine_type, tid), us in expect.items():
            assert config.eet.us(tid, machine_type) == us

    def test_eet_orderings(self, config):
        # ASIC fastest, CPU slowest, and the GPU time exactly equals the slack
        for tt in config.task_types:
            asic = config.eet.us(tt.id, "ASIC")
            gpu = config.eet.us(tt.id, "GPU")
            cpu = config.eet.us(tt.id, "CPU")
            assert asic < gpu < cpu
            assert asic < tt.slack_us <= gpu
            assert gpu == tt.slack_us

    def test_scheduling_method_variants(self):
        assert default_config("mect").scheduling_method == "MECT"
        assert default_config("fcfs_nq").scheduling_method == "FCFS-NQ"

    def test_canonical_order_is_stable(self):
        a = parse_config(DEFAULT_CONFIG_TEXT)
        b = parse_config(DEFAULT_CONFIG_TEXT)
        assert a == b
        assert [m.label for m in a.machines] == [m.label for m in b.machines]


class TestEetLookup:
    def test_by_machine_index(self, config):
        assert eet_lookup(config, 2, 4) == 1500  # Task2 on GPU#2
        assert eet_lookup(config, 1, 7) == 1000  # Task1 on ASIC#1

    def test_replica_invariance(self, config):
        for tt in config.task_types:
            for a in config.machines:
                for b in config.machines:
                    if a.type_name == b.type_name:
                        assert eet_lookup(config, tt.id, a.index) == eet_lookup(config, tt.id, b.index)

    def test_out_of_range_index(self, config):
        with pytest.raises(IndexError):
            eet_lookup(config, 1, 99)
        with pytest.raises(IndexError):
            eet_lookup(config, 1, -1)

    def test_unknown_task_type(self, config):
        with pytest.raises(KeyError):
            eet_lookup(config, 9, 0)


class TestParseConfig:
    def test_unknown_scheduling_method(self):
        with pytest.raises(ConfigError, match="unknown scheduling method"):
            parse_config(doc(scheduling_method="RR"))

    def test_missing_eet_entry(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        del base["machine_types"][2]["eet"]["Task2"]
        with pytest.raises(ConfigError, match=r"machine_types\[2\].eet.*Task2"):
            parse_config(json.dumps(base))

    def test_malformed_document(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_config("{not json")

    def test_non_positive_slack(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["task_types"][0]["slack_ms"] = 0
        with pytest.raises(ConfigError, match=r"task_types\[0\].slack_ms"):
            parse_config(json.dumps(base))

    def test_non_positive_eet(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["machine_types"][1]["eet"]["Task3"] = -1
        with pytest.raises(ConfigError, match=r"machine_types\[1\].eet.Task3"):
            parse_config(json.dumps(base))

    def test_idle_power_above_power(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["machine_types"][0]["idle_power"] = 200
        with pytest.raises(ConfigError, match="idle_power"):
            parse_config(json.dumps(base))

    def test_zero_replicas(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["machine_types"][0]["replicas"] = 0
        with pytest.raises(ConfigError, match="replicas"):
            parse_config(json.dumps(base))

    def test_duplicate_task_type_names(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["task_types"][1]["name"] = "Task1"
        with pytest.raises(ConfigError, match="duplicate task type"):
            parse_config(json.dumps(base))

    def test_eet_referencing_unknown_task(self):
        base = json.loads(DEFAULT_CONFIG_TEXT)
        base["machine_types"][0]["eet"]["Task9"] = 1
        with pytest.raises(ConfigError, match="Task9"):
            parse_config(json.dumps(base))

    def test_battery_capacity_parsed_and_ignored(self):
        cfg = parse_config(doc(battery_capacity=55.5))
        assert cfg.battery_capacity == 55.5
        base = json.loads(DEFAULT_CONFIG_TEXT)
        assert parse_config(json.dumps(base)).battery_capacity is None

    def test_fractional_milliseconds_convert_exactly(self):
        cfg = parse_config(DEFAULT_CONFIG_TEXT)
        assert cfg.eet.us(2, "ASIC") == 800
        assert cfg.eet.us(2, "GPU") == 1500
        assert cfg.task_type_by_name("Task3").slack_us == 1000


def test_canonical_method_normalization():
    assert canonical_method("fcfs-nq") == "FCFS-NQ"
    assert canonical_method("Meet") == "MEET"
    with pytest.raises(ConfigError):
        canonical_method("priority")
