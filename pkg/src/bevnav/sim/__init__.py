"""Navigation simulator: arena, pedestrians, unicycle robot, raycast camera."""

from bevnav.sim.camera import raycast_depth, raycast_hits
from bevnav.sim.env import NavigationEnv
from bevnav.sim.geometry import WorldGeometry
from bevnav.sim.spec import (
    SCENARIOS,
    BoxSpec,
    PedestrianSpec,
    RewardConfig,
    SimConfig,
    WorldSpec,
    load_world_spec,
    scenario_world,
)
from bevnav.sim.world import (
    NavWorld,
    Observation,
    RobotState,
    StepResult,
    collision_check,
    compute_reward,
)

__all__ = [
    "BoxSpec", "PedestrianSpec", "WorldSpec", "SimConfig", "RewardConfig",
    "SCENARIOS", "scenario_world", "load_world_spec",
    "WorldGeometry", "raycast_depth", "raycast_hits",
    "NavWorld", "Observation", "RobotState", "StepResult",
    "compute_reward", "collision_check",
    "NavigationEnv",
]
