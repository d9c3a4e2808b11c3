from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from bevnav.bev.cloud import PointCloud


class AugmentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    shift: float = Field(default=0.01, ge=0)


def augment(cloud: PointCloud, cfg: AugmentConfig, rng: np.random.Generator) -> PointCloud:
    """Translate every point by one offset drawn from [-shift, shift] per horizontal axis."""
    dx, dy = rng.uniform(-cfg.shift, cfg.shift, size=2)
    return cloud.translated(np.array([dx, dy, 0.0]))
