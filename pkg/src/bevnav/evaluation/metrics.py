"""Episode records and the suite-level metrics computed from them."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np

from bevnav.common.config import VelocityMode
from bevnav.common.errors import MetricsError
from bevnav.sim.world import Outcome


@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    outcome: Outcome
    path_length: float
    optimal_length: float
    mean_velocity: float
    reward: float
    steps: int

    @property
    def success(self) -> int:
        return int(self.outcome == "goal")

    def as_row(self) -> dict[str, float | int | str]:
        row: dict[str, float | int | str] = asdict(self)
        row["success"] = self.success
        return row


@dataclass(frozen=True)
class MetricsReport:
    scenario: str
    pedestrians: int
    sr: float
    velocity: float
    spl: float
    reward: float
    episodes: int

    def as_row(self) -> dict[str, float | int | str]:
        return {
            "scenario": self.scenario,
            "peds": self.pedestrians,
            "SR": round(self.sr, 4),
            "Velocity": round(self.velocity, 4),
            "SPL": round(self.spl, 4),
            "Reward": round(self.reward, 4),
            "N": self.episodes,
        }


def _require(records: Sequence[EpisodeRecord]) -> None:
    if not records:
        raise MetricsError("metrics need at least one episode record")


def compute_sr(records: Sequence[EpisodeRecord]) -> float:
    _require(records)
    return float(np.mean([r.success for r in records]))


def compute_spl(records: Sequence[EpisodeRecord]) -> float:
    """``mean(S_i * L_i / max(P_i, L_i))``."""
    _require(records)
    terms = []
    for r in records:
        if r.optimal_length <= 0:
            raise MetricsError(f"episode seed={r.seed}: optimal length must be positive, got {r.optimal_length}")
        terms.append(r.success * r.optimal_length / max(r.path_length, r.optimal_length))
    return float(np.mean(terms))


def compute_velocity(records: Sequence[EpisodeRecord], mode: VelocityMode = "all") -> float:
    """Mean over episodes of each episode's mean commanded linear velocity.

    ``mode="success"`` averages successful episodes only and is 0.0 when
    there are none.
    """
    _require(records)
    if mode == "success":
        chosen = [r.mean_velocity for r in records if r.success]
        return float(np.mean(chosen)) if chosen else 0.0
    return float(np.mean([r.mean_velocity for r in records]))


def mean_reward(records: Sequence[EpisodeRecord]) -> float:
    _require(records)
    return float(np.mean([r.reward for r in records]))


def summarize(
    records: Sequence[EpisodeRecord],
    scenario: str,
    pedestrians: int = 0,
    velocity_mode: VelocityMode = "all",
) -> MetricsReport:
    return MetricsReport(
        scenario=scenario,
        pedestrians=pedestrians,
        sr=compute_sr(records),
        velocity=compute_velocity(records, velocity_mode),
        spl=compute_spl(records),
        reward=mean_reward(records),
        episodes=len(records),
    )
