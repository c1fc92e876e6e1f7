"""Heuristic scenario mining: detectors, merging, instance records."""

from sts.mining.config import (
    DEFAULT_MINER_CONFIG,
    MinerConfig,
    MinerConfigError,
    load_miner_config,
)
from sts.mining.instances import (
    InstanceError,
    ScenarioInstance,
    dump_instances,
    instance_from_dict,
    iter_instances,
    load_instances,
    make_instance,
    scenario_instance_id,
)
from sts.mining.miner import mine_scene

__all__ = [
    "DEFAULT_MINER_CONFIG",
    "InstanceError",
    "MinerConfig",
    "MinerConfigError",
    "ScenarioInstance",
    "dump_instances",
    "instance_from_dict",
    "iter_instances",
    "load_instances",
    "load_miner_config",
    "make_instance",
    "mine_scene",
    "scenario_instance_id",
]
