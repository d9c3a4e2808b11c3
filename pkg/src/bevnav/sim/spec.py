"""World, simulator and reward configuration models plus scenario presets."""
from __future__ import annotations

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from bevnav.common.errors import ConfigError
from bevnav.common.utils import format_validation_error

PEDESTRIAN_SPEED = 1.0
Profile = Literal["desk", "paper"]


class BoxSpec(BaseModel):
    """Axis-aligned box on the floor, extruded to ``height``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    center: tuple[float, float]
    size: tuple[float, float] = (1.0, 1.0)
    height: float = Field(default=1.0, gt=0)

    @field_validator("size")
    @classmethod
    def _positive(cls, v: tuple[float, float]) -> tuple[float, float]:
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError(f"box size must be positive, got {v}")
        return v


class PedestrianSpec(BaseModel):
    """A cylinder walking a closed waypoint loop at constant speed."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    waypoints: list[tuple[float, float]] = Field(min_length=1)
    radius: float = Field(default=0.3, gt=0)
    height: float = Field(default=1.7, gt=0)
    speed: float = PEDESTRIAN_SPEED

    @field_validator("speed")
    @classmethod
    def _fixed_speed(cls, v: float) -> float:
        if v != PEDESTRIAN_SPEED:
            raise ValueError(f"pedestrian speed is fixed at {PEDESTRIAN_SPEED} m/s, got {v}")
        return v


class WorldSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "empty"
    half_extent: float = Field(default=5.0, gt=0)
    wall_height: float = Field(default=2.0, gt=0)
    boxes: list[BoxSpec] = Field(default_factory=list)
    random_boxes: int = Field(default=0, ge=0)
    box_size_range: tuple[float, float] = (0.5, 1.5)
    box_height: float = Field(default=1.0, gt=0)
    pedestrians: list[PedestrianSpec] = Field(default_factory=list)
    random_pedestrians: int = Field(default=0, ge=0)
    pedestrian_radius: float = Field(default=0.3, gt=0)
    pedestrian_height: float = Field(default=1.7, gt=0)

    @model_validator(mode="after")
    def _inside_arena(self) -> WorldSpec:
        h = self.half_extent
        for i, box in enumerate(self.boxes):
            (cx, cy), (sx, sy) = box.center, box.size
            if abs(cx) + sx / 2 > h or abs(cy) + sy / 2 > h:
                raise ValueError(f"boxes[{i}] at {box.center} size {box.size} leaves the arena")
        for i, ped in enumerate(self.pedestrians):
            for wx, wy in ped.waypoints:
                if abs(wx) + ped.radius > h or abs(wy) + ped.radius > h:
                    raise ValueError(f"pedestrians[{i}] waypoint ({wx}, {wy}) leaves the arena")
        lo, hi = self.box_size_range
        if not 0 < lo <= hi:
            raise ValueError(f"box_size_range must satisfy 0 < lo <= hi, got {self.box_size_range}")
        return self

    def with_pedestrians(self, count: int) -> WorldSpec:
        return self.model_copy(update={"random_pedestrians": int(count)})


class SimConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    dt: float = Field(default=0.1, gt=0)
    max_steps: int = Field(default=500, ge=1)
    robot_radius: float = Field(default=0.3, gt=0)
    camera_height: float = Field(default=0.45, gt=0)
    h_fov_deg: float = Field(default=85.0, gt=0, lt=180)
    v_fov_deg: float = Field(default=58.0, gt=0, lt=180)
    rays_h: int = Field(default=64, ge=1)
    rays_v: int = Field(default=24, ge=1)
    min_range: float = Field(default=0.3, ge=0)
    max_range: float = Field(default=10.0, gt=0)
    cloud_points: int = Field(default=256, ge=1)
    min_goal_distance: float = Field(default=2.0, ge=0)
    max_tries: int = Field(default=10_000, ge=1)


class RewardConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    goal_tolerance: float = Field(default=0.2, gt=0)
    goal_reward: float = 80.0
    collision_reward: float = -100.0


def empty_world(profile: Profile = "desk") -> WorldSpec:
    return WorldSpec(name="empty", half_extent=5.0 if profile == "desk" else 10.0)


def square_world(profile: Profile = "desk") -> WorldSpec:
    """Square arena with randomly placed boxes."""
    if profile == "paper":
        return WorldSpec(name="square", half_extent=10.0, random_boxes=6)
    return WorldSpec(name="square", half_extent=5.0, random_boxes=3, box_size_range=(0.4, 1.0))


def lobby_world(profile: Profile = "desk", pedestrians: int = 0) -> WorldSpec:
    """Arena with four fixed pillar columns and walking pedestrians."""
    if profile == "paper":
        half, offset, size = 8.0, 3.0, 0.8
    else:
        half, offset, size = 5.0, 2.0, 0.6
    pillars = [
        BoxSpec(center=(sx * offset, sy * offset), size=(size, size), height=3.0)
        for sx in (-1, 1)
        for sy in (-1, 1)
    ]
    return WorldSpec(
        name="lobby", half_extent=half, wall_height=3.0, boxes=pillars, random_pedestrians=pedestrians
    )


SCENARIOS = {"empty": empty_world, "square": square_world, "lobby": lobby_world}


def scenario_world(name: str, profile: Profile = "desk") -> WorldSpec:
    try:
        factory = SCENARIOS[name]
    except KeyError as e:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}") from e
    return factory(profile)


def load_world_spec(path: str | Path) -> WorldSpec:
    """Load a scenario file (JSON or YAML)."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = yaml.safe_load(f) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"scenario file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from e
    try:
        return WorldSpec.model_validate(doc)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e, prefix="world")) from e

