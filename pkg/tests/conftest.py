from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from bevnav.agent.sac import SACAgent
from bevnav.agent.trainer import build_agent
from bevnav.common.config import RunConfig, load_run_config

TINY_OVERRIDES: dict[str, Any] = {
    "scenario": "empty",
    "steps": 60,
    "checkpoint_every": 0,
    "encoder": {"sparse_channels": [4, 8], "dense_blocks": 1, "dense_channels": 16},
    "sim": {"max_steps": 25, "rays_h": 16, "rays_v": 6, "cloud_points": 64},
    "train": {
        "batch_size": 4,
        "window": 2,
        "warmup_steps": 20,
        "hidden": 16,
        "buffer_capacity": 500,
    },
    "eval": {"episodes": 3},
}


@pytest.fixture(autouse=True)
def _keep_default_logging(monkeypatch):
    # cached loggers from a CLI run would bypass structlog.testing.capture_logs
    monkeypatch.setattr("bevnav.cli.configure_logging", lambda *_args, **_kw: None)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def tiny_cfg() -> RunConfig:
    """Desk profile shrunk until a full train/eval cycle takes seconds."""
    return load_run_config(None, "desk", TINY_OVERRIDES)


@pytest.fixture
def tiny_agent(tiny_cfg: RunConfig) -> SACAgent:
    return build_agent(tiny_cfg)


@pytest.fixture
def random_points(rng: np.random.Generator):
    """Factory for (n, 3) points spread over the desk pillar ranges."""

    def make(n: int = 64) -> np.ndarray:
        return np.stack(
            [rng.uniform(-4.0, 4.0, n), rng.uniform(0.2, 4.5, n), rng.uniform(0.0, 1.8, n)], axis=1
        ).astype(np.float32)

    return make
