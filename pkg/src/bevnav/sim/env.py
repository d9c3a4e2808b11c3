"""Gymnasium wrapper around ``NavWorld``."""
from __future__ import annotations

from typing import Any

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from bevnav.sim.spec import RewardConfig, SimConfig, WorldSpec
from bevnav.sim.world import NavWorld, Observation


class NavigationEnv(gym.Env):
    """Observation: ``{"cloud": (N, 3), "goal": (distance, bearing)}``; action: ``(v, omega)``.

    Goal and collision end the episode as ``terminated``; hitting ``max_steps``
    is reported as ``truncated``.
    """

    metadata = {"render_modes": []}

    def __init__(
        self,
        spec: WorldSpec,
        sim: SimConfig | None = None,
        reward: RewardConfig | None = None,
    ) -> None:
        super().__init__()
        self.world = NavWorld(spec, sim, reward)
        n = self.world.sim.cloud_points
        self.action_space = spaces.Box(
            low=np.array([0.0, -1.0], dtype=np.float32),
            high=np.array([1.0, 1.0], dtype=np.float32),
            dtype=np.float32,
        )
        self.observation_space = spaces.Dict(
            {
                "cloud": spaces.Box(low=-np.inf, high=np.inf, shape=(n, 3), dtype=np.float32),
                "goal": spaces.Box(
                    low=np.array([0.0, -np.pi], dtype=np.float32),
                    high=np.array([np.inf, np.pi], dtype=np.float32),
                    dtype=np.float32,
                ),
            }
        )

    @staticmethod
    def _to_obs(obs: Observation) -> dict[str, np.ndarray]:
        return {
            "cloud": obs.cloud.points,
            "goal": np.array([obs.goal_distance, obs.goal_bearing], dtype=np.float32),
        }

    def reset(
        self, *, seed: int | None = None, options: dict[str, Any] | None = None
    ) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
        super().reset(seed=seed)
        world_seed = seed if seed is not None else int(self.np_random.integers(0, 2**31 - 1))
        obs = self.world.reset(world_seed)
        return self._to_obs(obs), {"seed": world_seed, "goal": self.world.goal.tolist()}

    def step(self, action: np.ndarray) -> tuple[dict[str, np.ndarray], float, bool, bool, dict[str, Any]]:
        result = self.world.step(action)
        terminated = result.outcome in ("goal", "collision")
        truncated = result.outcome == "timeout"
        info = {"outcome": result.outcome, "path_length": self.world.stats.path_length}
        return self._to_obs(result.observation), float(result.reward), terminated, truncated, info
