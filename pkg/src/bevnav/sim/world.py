"""Seeded navigation world: unicycle robot, boxes, pedestrians, reward, episodes."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from bevnav.bev.cloud import PointCloud
from bevnav.common.errors import EpisodeFinishedError, WorldGenerationError
from bevnav.common.logging import get_logger
from bevnav.common.utils import wrap_angle
from bevnav.sim.camera import raycast_depth
from bevnav.sim.geometry import WorldGeometry, clearance
from bevnav.sim.spec import PEDESTRIAN_SPEED, PedestrianSpec, RewardConfig, SimConfig, WorldSpec

log = get_logger("bevnav.sim.world")

Outcome = Literal["running", "goal", "collision", "timeout"]
TRACE_COLUMNS = ["t", "x", "y", "theta", "v", "omega", "reward", "outcome"]


@dataclass
class RobotState:
    x: float
    y: float
    theta: float
    v: float = 0.0
    omega: float = 0.0
    radius: float = 0.3


@dataclass
class Observation:
    cloud: PointCloud
    goal_distance: float
    goal_bearing: float


@dataclass
class StepResult:
    observation: Observation
    reward: float
    done: bool
    outcome: Outcome


@dataclass
class Pedestrian:
    waypoints: np.ndarray
    radius: float
    height: float
    speed: float
    position: np.ndarray
    target: int = 1

    @classmethod
    def from_spec(cls, spec: PedestrianSpec) -> Pedestrian:
        wps = np.asarray(spec.waypoints, dtype=np.float64).reshape(-1, 2)
        return cls(
            waypoints=wps,
            radius=spec.radius,
            height=spec.height,
            speed=spec.speed,
            position=wps[0].copy(),
            target=1 % len(wps),
        )

    def advance(self, dt: float) -> None:
        """Walk ``speed * dt`` along the closed waypoint loop."""
        remaining = self.speed * dt
        if len(self.waypoints) < 2:
            return
        while remaining > 0:
            goal = self.waypoints[self.target]
            delta = goal - self.position
            dist = float(math.hypot(delta[0], delta[1]))
            if dist > remaining:
                self.position = self.position + delta * (remaining / dist)
                return
            self.position = goal.copy()
            remaining -= dist
            self.target = (self.target + 1) % len(self.waypoints)


@dataclass
class EpisodeStats:
    steps: int = 0
    path_length: float = 0.0
    total_reward: float = 0.0
    velocity_sum: float = 0.0
    outcome: Outcome = "running"
    trace: list[dict[str, float | str]] = field(default_factory=list)

    @property
    def mean_velocity(self) -> float:
        return self.velocity_sum / self.steps if self.steps else 0.0


def compute_reward(
    d_t: float,
    d_prev: float,
    v: float,
    omega: float,
    collided: bool,
    cfg: RewardConfig | None = None,
) -> float:
    """Goal bonus, else collision penalty, else progress shaping ``v - |omega| + (d_prev - d_t)``."""
    cfg = cfg or RewardConfig()
    if d_t < cfg.goal_tolerance:
        return cfg.goal_reward
    if collided:
        return cfg.collision_reward
    return v - abs(omega) + (d_prev - d_t)


def collision_check(robot: RobotState, world: NavWorld | WorldGeometry) -> bool:
    """True iff the robot disc strictly penetrates a wall, box or pedestrian."""
    geom = world.geometry if isinstance(world, NavWorld) else world
    return clearance(robot.x, robot.y, geom) < robot.radius


class NavWorld:
    """One environment instance. Not thread-safe; use one per worker."""

    def __init__(
        self,
        spec: WorldSpec,
        sim: SimConfig | None = None,
        reward: RewardConfig | None = None,
    ) -> None:
        self.spec = spec
        self.sim = sim or SimConfig()
        self.reward_cfg = reward or RewardConfig()
        self.rng = np.random.default_rng(0)
        self.box_lo = np.zeros((0, 3))
        self.box_hi = np.zeros((0, 3))
        self.pedestrians: list[Pedestrian] = []
        self.robot = RobotState(0.0, 0.0, 0.0, radius=self.sim.robot_radius)
        self.start = np.zeros(2)
        self.goal = np.zeros(2)
        self.stats = EpisodeStats()
        self.done = True
        self.seed: int | None = None
        self._prev_distance = 0.0

    # ------------------------------------------------------------------
    # geometry
    # ------------------------------------------------------------------

    @property
    def geometry(self) -> WorldGeometry:
        peds = self.pedestrians
        return WorldGeometry(
            half_extent=self.spec.half_extent,
            wall_height=self.spec.wall_height,
            box_lo=self.box_lo,
            box_hi=self.box_hi,
            ped_xy=np.array([p.position for p in peds]).reshape(-1, 2),
            ped_radius=np.array([p.radius for p in peds], dtype=np.float64),
            ped_height=np.array([p.height for p in peds], dtype=np.float64),
        )

    @property
    def static_geometry(self) -> WorldGeometry:
        """Walls and boxes only; what the path planner sees."""
        return WorldGeometry(
            half_extent=self.spec.half_extent,
            wall_height=self.spec.wall_height,
            box_lo=self.box_lo,
            box_hi=self.box_hi,
        )

    def goal_distance(self) -> float:
        return float(math.hypot(self.goal[0] - self.robot.x, self.goal[1] - self.robot.y))

    def goal_bearing(self) -> float:
        heading = math.atan2(self.goal[1] - self.robot.y, self.goal[0] - self.robot.x)
        return wrap_angle(heading - self.robot.theta)

    # ------------------------------------------------------------------
    # episode lifecycle
    # ------------------------------------------------------------------

    def reset(self, seed: int) -> Observation:
        """Sample boxes, pedestrians, start pose and goal; deterministic in ``seed``."""
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)
        r = self.sim.robot_radius
        self._place_boxes(margin=2 * r)
        self.pedestrians = []
        start = self._sample_free(min_clearance=2 * r, what="robot start")
        goal = self._sample_free(
            min_clearance=2 * r, what="goal", away_from=start, min_distance=self.sim.min_goal_distance
        )
        self._place_pedestrians(start, goal)
        theta = wrap_angle(float(self.rng.uniform(-math.pi, math.pi)))
        self.robot = RobotState(float(start[0]), float(start[1]), theta, radius=r)
        self.start = start
        self.goal = goal
        self.stats = EpisodeStats()
        self.done = False
        self._prev_distance = self.goal_distance()
        log.debug(
            "world_reset",
            seed=self.seed,
            scenario=self.spec.name,
            start=[round(float(v), 3) for v in start],
            goal=[round(float(v), 3) for v in goal],
            boxes=len(self.box_lo),
            pedestrians=len(self.pedestrians),
        )
        return self.observe()

    def observe(self) -> Observation:
        cloud = raycast_depth(
            self.robot.x, self.robot.y, self.robot.theta, self.geometry, self.sim, self.rng
        )
        return Observation(cloud=cloud, goal_distance=self.goal_distance(), goal_bearing=self.goal_bearing())

    def step(self, action: tuple[float, float] | np.ndarray) -> StepResult:
        """Advance one tick. ``action`` saturates onto the closed box [0, 1] x [-1, 1].

        Policy actions lie strictly inside; scripted inputs may sit on the bounds.
        """
        if self.done:
            raise EpisodeFinishedError("step() called on a finished episode; call reset() first")
        v = float(np.clip(action[0], 0.0, 1.0))
        omega = float(np.clip(action[1], -1.0, 1.0))
        dt = self.sim.dt
        robot = self.robot
        x0, y0 = robot.x, robot.y
        robot.x += v * math.cos(robot.theta) * dt
        robot.y += v * math.sin(robot.theta) * dt
        robot.theta = wrap_angle(robot.theta + omega * dt)
        robot.v, robot.omega = v, omega
        for ped in self.pedestrians:
            ped.advance(dt)

        d_t = self.goal_distance()
        collided = collision_check(robot, self)
        reward = compute_reward(d_t, self._prev_distance, v, omega, collided, self.reward_cfg)
        self._prev_distance = d_t

        stats = self.stats
        stats.steps += 1
        stats.path_length += math.hypot(robot.x - x0, robot.y - y0)
        stats.total_reward += reward
        stats.velocity_sum += v
        outcome: Outcome = "running"
        if d_t < self.reward_cfg.goal_tolerance:
            outcome = "goal"
        elif collided:
            outcome = "collision"
        elif stats.steps >= self.sim.max_steps:
            outcome = "timeout"
        stats.outcome = outcome
        self.done = outcome != "running"
        stats.trace.append(
            {
                "t": stats.steps,
                "x": robot.x,
                "y": robot.y,
                "theta": robot.theta,
                "v": v,
                "omega": omega,
                "reward": reward,
                "outcome": outcome,
            }
        )
        if self.done:
            log.debug("episode_finished", seed=self.seed, outcome=outcome, steps=stats.steps)
        return StepResult(observation=self.observe(), reward=reward, done=self.done, outcome=outcome)

    def set_robot_pose(self, x: float, y: float, theta: float) -> None:
        self.robot.x, self.robot.y, self.robot.theta = float(x), float(y), wrap_angle(theta)
        self._prev_distance = self.goal_distance()

    def set_goal(self, x: float, y: float) -> None:
        self.goal = np.array([x, y], dtype=np.float64)
        self._prev_distance = self.goal_distance()

    def export_trace(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=TRACE_COLUMNS)
            writer.writeheader()
            writer.writerows(self.stats.trace)
        return path

    # ------------------------------------------------------------------
    # rejection sampling
    # ------------------------------------------------------------------

    def _place_boxes(self, margin: float) -> None:
        spec = self.spec
        lo = [(b.center[0] - b.size[0] / 2, b.center[1] - b.size[1] / 2, 0.0) for b in spec.boxes]
        hi = [(b.center[0] + b.size[0] / 2, b.center[1] + b.size[1] / 2, b.height) for b in spec.boxes]
        smin, smax = spec.box_size_range
        for i in range(spec.random_boxes):
            for _ in range(self.sim.max_tries):
                sx, sy = self.rng.uniform(smin, smax, size=2)
                lim_x = spec.half_extent - sx / 2 - margin
                lim_y = spec.half_extent - sy / 2 - margin
                if lim_x <= 0 or lim_y <= 0:
                    continue
                cx = self.rng.uniform(-lim_x, lim_x)
                cy = self.rng.uniform(-lim_y, lim_y)
                cand_lo = (cx - sx / 2, cy - sy / 2, 0.0)
                cand_hi = (cx + sx / 2, cy + sy / 2, spec.box_height)
                if all(_box_gap(cand_lo, cand_hi, a, b) >= margin for a, b in zip(lo, hi, strict=True)):
                    lo.append(cand_lo)
                    hi.append(cand_hi)
                    break
            else:
                raise WorldGenerationError(
                    f"could not place random box {i + 1}/{spec.random_boxes} after {self.sim.max_tries} tries"
                )
        self.box_lo = np.array(lo, dtype=np.float64).reshape(-1, 3)
        self.box_hi = np.array(hi, dtype=np.float64).reshape(-1, 3)

    def _sample_free(
        self,
        min_clearance: float,
        what: str,
        away_from: np.ndarray | None = None,
        min_distance: float = 0.0,
        avoid: list[tuple[np.ndarray, float]] | None = None,
    ) -> np.ndarray:
        geom = self.static_geometry
        h = self.spec.half_extent
        for _ in range(self.sim.max_tries):
            p = self.rng.uniform(-h, h, size=2)
            if clearance(float(p[0]), float(p[1]), geom) < min_clearance:
                continue
            if away_from is not None and math.hypot(*(p - away_from)) < min_distance:
                continue
            if avoid and any(math.hypot(*(p - q)) < d for q, d in avoid):
                continue
            return p
        raise WorldGenerationError(f"could not sample {what} after {self.sim.max_tries} tries (world too dense)")

    def _place_pedestrians(self, start: np.ndarray, goal: np.ndarray) -> None:
        r = self.sim.robot_radius
        peds = [Pedestrian.from_spec(p) for p in self.spec.pedestrians]
        ped_r = self.spec.pedestrian_radius
        avoid = [(start, 2 * r + ped_r), (goal, r + ped_r)]
        avoid += [(p.position, 2 * ped_r + r) for p in peds]
        geom = self.static_geometry
        for i in range(self.spec.random_pedestrians):
            for _ in range(self.sim.max_tries):
                a = self._sample_free(ped_r + r, f"pedestrian {i + 1}", avoid=avoid)
                b = self._sample_free(ped_r + r, f"pedestrian {i + 1} waypoint", away_from=a, min_distance=2.0)
                # the walking segment must stay clear of boxes
                if all(
                    clearance(*(a + (b - a) * s), geom) >= ped_r for s in np.linspace(0.0, 1.0, 11)
                ):
                    break
            else:
                raise WorldGenerationError(f"no clear walking path for pedestrian {i + 1}")
            avoid.append((a, 2 * ped_r + r))
            peds.append(
                Pedestrian(
                    waypoints=np.stack([a, b]),
                    radius=ped_r,
                    height=self.spec.pedestrian_height,
                    speed=PEDESTRIAN_SPEED,
                    position=a.copy(),
                )
            )
        self.pedestrians = peds


def _box_gap(
    lo_a: tuple[float, ...], hi_a: tuple[float, ...], lo_b: tuple[float, ...], hi_b: tuple[float, ...]
) -> float:
    """Footprint gap between two boxes (0 when they overlap)."""
    gx = max(lo_a[0] - hi_b[0], lo_b[0] - hi_a[0], 0.0)
    gy = max(lo_a[1] - hi_b[1], lo_b[1] - hi_a[1], 0.0)
    return math.hypot(gx, gy)


__all__ = [
    "NavWorld",
    "Observation",
    "Outcome",
    "RobotState",
    "StepResult",
    "EpisodeStats",
    "compute_reward",
    "collision_check",
]
