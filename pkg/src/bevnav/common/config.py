"""Run configuration: profile presets, config files and CLI overrides merged
into one validated ``RunConfig``."""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from bevnav.agent.config import TrainConfig
from bevnav.bev.encoder import EncoderConfig
from bevnav.bev.pillars import PillarConfig
from bevnav.common.errors import ConfigError
from bevnav.common.utils import format_validation_error, make_config_hash
from bevnav.sim.spec import Profile, RewardConfig, SimConfig, WorldSpec, scenario_world

VelocityMode = Literal["all", "success"]
HASH_EXCLUDE = {"out_dir", "steps", "seed"}


class EvalConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    episodes: int = Field(default=100, ge=1)
    seed0: int = Field(default=10_000, ge=0)
    velocity_mode: VelocityMode = "all"
    grid_resolution: float = Field(default=0.1, gt=0)
    smooth_paths: bool = False
    pedestrians: list[int] = Field(default_factory=lambda: [0])


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    profile: Profile = "desk"
    scenario: str = "square"
    world: WorldSpec | None = None
    pillars: PillarConfig = Field(default_factory=PillarConfig.desk)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    sim: SimConfig = Field(default_factory=SimConfig)
    reward: RewardConfig = Field(default_factory=RewardConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    seed: int = Field(default=0, ge=0)
    steps: int = Field(default=30_000, ge=0)
    out_dir: str = ""
    log_every: int = Field(default=1, ge=1)
    checkpoint_every: int = Field(default=5_000, ge=0)

    def world_spec(self) -> WorldSpec:
        """Explicit ``world`` wins over the named scenario preset."""
        return self.world if self.world is not None else scenario_world(self.scenario, self.profile)

    def arena_diagonal(self) -> float:
        return 2.0 * math.sqrt(2.0) * self.world_spec().half_extent

    def config_hash(self) -> str:
        return make_config_hash(self.model_dump(mode="json", exclude=HASH_EXCLUDE))


PROFILE_PRESETS: dict[str, dict[str, Any]] = {
    "desk": {
        "profile": "desk",
        "pillars": PillarConfig.desk().model_dump(mode="json"),
        "sim": {"cloud_points": 256},
    },
    "paper": {
        "profile": "paper",
        "pillars": PillarConfig.simulator().model_dump(mode="json"),
        "sim": {"cloud_points": 1024},
    },
}


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``; non-dict values replace."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def read_config_file(path: str | Path) -> dict[str, Any]:
    """JSON or YAML mapping."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from e
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping, got {type(doc).__name__}")
    return doc


def load_run_config(
    path: str | Path | None = None,
    profile: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Profile preset <- config file <- ``overrides`` (highest precedence)."""
    doc = read_config_file(path) if path else {}
    chosen = profile or (overrides or {}).get("profile") or doc.get("profile") or "desk"
    if chosen not in PROFILE_PRESETS:
        raise ConfigError(f"invalid configuration: profile: unknown profile {chosen!r}")
    merged = deep_merge(PROFILE_PRESETS[chosen], doc)
    merged = deep_merge(merged, overrides or {})
    merged["profile"] = chosen
    try:
        cfg = RunConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from e
    # resolve the scenario name early so a typo fails here
    cfg.world_spec()
    return cfg


def dump_run_config(cfg: RunConfig, path: str | Path) -> Path:
    """Write the resolved configuration as JSON; it loads back unchanged."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(cfg.model_dump(mode="json"), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
