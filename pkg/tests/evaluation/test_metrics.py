from __future__ import annotations

import numpy as np
import pytest

from bevnav.common.errors import MetricsError
from bevnav.evaluation.metrics import (
    EpisodeRecord,
    compute_spl,
    compute_sr,
    compute_velocity,
    mean_reward,
    summarize,
)
from bevnav.sim.spec import SimConfig, empty_world
from bevnav.sim.world import NavWorld


def _rec(outcome: str = "goal", path: float = 5.0, optimal: float = 5.0, velocity: float = 0.5,
         reward: float = 0.0, seed: int = 0) -> EpisodeRecord:
    return EpisodeRecord(
        seed=seed,
        outcome=outcome,
        path_length=path,
        optimal_length=optimal,
        mean_velocity=velocity,
        reward=reward,
        steps=10,
    )


def test_success_rate():
    records = [_rec(), _rec(), _rec(), _rec("collision")]
    assert compute_sr(records) == 0.75


@pytest.mark.parametrize(
    ("records", "expected"),
    [
        ([_rec(path=5.0, optimal=5.0)], 1.0),
        ([_rec(path=10.0, optimal=5.0)], 0.5),
        ([_rec("timeout", path=1.0, optimal=5.0), _rec(path=5.0, optimal=5.0)], 0.5),
        # shorter than optimal still counts as a perfect path
        ([_rec(path=4.9, optimal=5.0)], 1.0),
    ],
)
def test_spl(records, expected):
    assert compute_spl(records) == pytest.approx(expected)


def test_spl_rejects_nonpositive_optimal_length():
    with pytest.raises(MetricsError, match="optimal length"):
        compute_spl([_rec(optimal=0.0)])


@pytest.mark.parametrize("fn", [compute_sr, compute_spl, compute_velocity, mean_reward])
def test_empty_records_rejected(fn):
    with pytest.raises(MetricsError):
        fn([])


def test_spl_bounded_by_sr_and_order_free(rng):
    outcomes = ["goal", "collision", "timeout"]
    records = [
        _rec(outcomes[int(rng.integers(3))], path=float(rng.uniform(0.1, 20)), optimal=float(rng.uniform(0.1, 20)))
        for _ in range(50)
    ]
    assert compute_spl(records) <= compute_sr(records)
    shuffled = [records[i] for i in rng.permutation(len(records))]
    a, b = summarize(shuffled, "x"), summarize(records, "x")
    for field in ("sr", "spl", "velocity", "reward"):
        assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12)


def test_velocity_modes():
    records = [_rec(velocity=0.76), _rec(velocity=0.76)]
    assert compute_velocity(records) == pytest.approx(0.76)
    mixed = [_rec(velocity=0.8), _rec("collision", velocity=0.2)]
    assert compute_velocity(mixed, "all") == pytest.approx(0.5)
    assert compute_velocity(mixed, "success") == pytest.approx(0.8)
    assert compute_velocity([_rec("timeout")], "success") == 0.0


def test_one_step_goal_reward():
    world = NavWorld(empty_world(), SimConfig(rays_h=8, rays_v=4, cloud_points=16))
    world.reset(0)
    world.set_goal(1.0, 1.0)
    world.set_robot_pose(0.81, 1.0, 0.0)
    result = world.step((0.0, 0.0))
    assert result.outcome == "goal"
    stats = world.stats
    record = _rec(stats.outcome, path=stats.path_length, velocity=stats.mean_velocity, reward=stats.total_reward)
    assert mean_reward([record]) == 80.0


def test_summary_row():
    report = summarize([_rec(velocity=0.7, reward=80.0), _rec("collision", velocity=0.3, reward=-100.0)], "lobby", 5)
    assert report.as_row() == {
        "scenario": "lobby",
        "peds": 5,
        "SR": 0.5,
        "Velocity": 0.5,
        "SPL": 0.5,
        "Reward": -10.0,
        "N": 2,
    }
    assert report.sr == compute_sr([_rec(), _rec("collision")])


def test_record_row_flags_success():
    row = _rec("goal").as_row()
    assert row["success"] == 1
    assert _rec("timeout").as_row()["success"] == 0
    assert np.isclose(row["path_length"], 5.0)
