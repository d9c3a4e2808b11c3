"""Evaluation suites: seeded episodes, per-episode records, optional traces."""
from __future__ import annotations

import functools
import math
from pathlib import Path
from typing import Protocol

import numpy as np

from bevnav.agent.sac import SACAgent
from bevnav.common.errors import NoPathError
from bevnav.common.logging import get_logger
from bevnav.evaluation.metrics import EpisodeRecord
from bevnav.evaluation.planner import optimal_path_length
from bevnav.kernel import parallel_map
from bevnav.sim.spec import RewardConfig, SimConfig, WorldSpec
from bevnav.sim.world import NavWorld, Observation

log = get_logger("bevnav.evaluation.harness")


class Policy(Protocol):
    def reset(self, seed: int) -> None: ...

    def act(self, obs: Observation) -> np.ndarray: ...


class RandomPolicy:
    """Uniform actions over the full command range."""

    def __init__(self) -> None:
        self.rng = np.random.default_rng(0)

    def reset(self, seed: int) -> None:
        self.rng = np.random.default_rng(seed)

    def act(self, obs: Observation) -> np.ndarray:
        return np.array([self.rng.uniform(0.0, 1.0), self.rng.uniform(-1.0, 1.0)])


class GoalSeekingPolicy:
    """Turn in place toward the goal, then drive straight at ``speed``."""

    def __init__(self, speed: float = 1.0, gain: float = 2.0, align: float = 0.2) -> None:
        self.speed = speed
        self.gain = gain
        self.align = align

    def reset(self, seed: int) -> None:
        pass

    def act(self, obs: Observation) -> np.ndarray:
        bearing = obs.goal_bearing
        omega = float(np.clip(self.gain * bearing, -1.0, 1.0))
        v = self.speed if abs(bearing) < self.align else 0.0
        return np.array([v, omega])


class AgentPolicy:
    """A trained agent acting deterministically (squashed mean action)."""

    def __init__(self, agent: SACAgent) -> None:
        self.agent = agent

    def reset(self, seed: int) -> None:
        self.agent.rng = np.random.default_rng(seed)

    def act(self, obs: Observation) -> np.ndarray:
        return self.agent.act(obs, deterministic=True)


def run_episode(
    seed: int,
    policy: Policy,
    scenario: WorldSpec,
    sim: SimConfig | None = None,
    reward: RewardConfig | None = None,
    resolution: float = 0.1,
    smooth: bool = False,
    trace_dir: str | Path | None = None,
) -> EpisodeRecord | None:
    """Roll out one episode. Returns ``None`` when no optimal path exists."""
    world = NavWorld(scenario, sim, reward)
    obs = world.reset(seed)
    start = (float(world.start[0]), float(world.start[1]))
    goal = (float(world.goal[0]), float(world.goal[1]))
    try:
        optimal = optimal_path_length(
            start, goal, world.static_geometry, world.sim.robot_radius, resolution, smooth
        )
    except NoPathError as e:
        log.warning("episode_excluded", seed=seed, scenario=scenario.name, reason=str(e))
        return None
    policy.reset(seed)
    done = False
    while not done:
        result = world.step(policy.act(obs))
        obs, done = result.observation, result.done
    stats = world.stats
    if trace_dir is not None:
        world.export_trace(Path(trace_dir) / f"episode_{seed}.csv")
    log.debug("episode_evaluated", seed=seed, outcome=stats.outcome, steps=stats.steps)
    return EpisodeRecord(
        seed=seed,
        outcome=stats.outcome,
        path_length=stats.path_length,
        # raw grid cost between cell centers can undercut the straight line
        optimal_length=max(optimal, math.hypot(goal[0] - start[0], goal[1] - start[1])),
        mean_velocity=stats.mean_velocity,
        reward=stats.total_reward,
        steps=stats.steps,
    )


def run_suite(
    policy: Policy,
    scenario: WorldSpec,
    episodes: int = 100,
    seed0: int = 10_000,
    sim: SimConfig | None = None,
    reward: RewardConfig | None = None,
    resolution: float = 0.1,
    smooth: bool = False,
    trace_dir: str | Path | None = None,
    use_ray: bool | None = None,
) -> list[EpisodeRecord]:
    """Episodes ``seed0 .. seed0 + episodes - 1`` in seed order.

    Episodes without a collision-free optimal path are dropped with a warning.
    """
    seeds = list(range(seed0, seed0 + episodes))
    task = functools.partial(
        run_episode,
        policy=policy,
        scenario=scenario,
        sim=sim,
        reward=reward,
        resolution=resolution,
        smooth=smooth,
        trace_dir=trace_dir,
    )
    results = parallel_map(task, seeds, use_ray=use_ray)
    records = [r for r in results if r is not None]
    log.info(
        "suite_finished",
        scenario=scenario.name,
        episodes=len(records),
        excluded=len(seeds) - len(records),
        pedestrians=scenario.random_pedestrians + len(scenario.pedestrians),
    )
    return records
