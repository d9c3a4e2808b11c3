"""Reward shaping and the collision rule."""
from __future__ import annotations

import numpy as np
import pytest

from bevnav.sim.geometry import WorldGeometry, clearance
from bevnav.sim.spec import RewardConfig
from bevnav.sim.world import RobotState, collision_check, compute_reward


@pytest.mark.parametrize(
    ("d_t", "d_prev", "v", "omega", "collided", "expected"),
    [
        (0.19, 0.5, 0.0, 0.0, False, 80.0),
        (0.19, 0.5, 0.0, 0.0, True, 80.0),
        (3.0, 3.1, 0.5, 0.0, True, -100.0),
        (3.8, 4.0, 0.5, -0.3, False, 0.4),
        (2.0, 1.9, 0.0, 1.0, False, -1.1),
    ],
)
def test_reward_cases(d_t, d_prev, v, omega, collided, expected):
    assert compute_reward(d_t, d_prev, v, omega, collided) == pytest.approx(expected)


def test_goal_tolerance_is_strict():
    assert compute_reward(0.2, 0.3, 0.0, 0.0, False) == pytest.approx(0.1)


def test_reward_constants_configurable():
    cfg = RewardConfig(goal_tolerance=0.5, goal_reward=10.0, collision_reward=-5.0)
    assert compute_reward(0.4, 1.0, 0.0, 0.0, False, cfg) == 10.0
    assert compute_reward(1.0, 1.0, 0.0, 0.0, True, cfg) == -5.0


@pytest.fixture
def geom() -> WorldGeometry:
    return WorldGeometry(
        half_extent=5.0,
        wall_height=2.0,
        box_lo=np.array([[2.0, -1.0, 0.0]]),
        box_hi=np.array([[3.0, 1.0, 1.0]]),
        ped_xy=np.array([[-2.0, -2.0]]),
        ped_radius=np.array([0.25]),
        ped_height=np.array([1.7]),
    )


def test_near_wall_collides(geom):
    assert collision_check(RobotState(4.75, -3.0, 0.0, radius=0.3), geom)


def test_clear_of_everything(geom):
    robot = RobotState(0.0, 3.0, 0.0, radius=0.3)
    assert clearance(robot.x, robot.y, geom) >= 1.0
    assert not collision_check(robot, geom)


def test_exact_tangency_is_not_a_collision(geom):
    assert clearance(1.75, 0.0, geom) == 0.25
    assert not collision_check(RobotState(1.75, 0.0, 0.0, radius=0.25), geom)
    assert collision_check(RobotState(1.875, 0.0, 0.0, radius=0.25), geom)


def test_box_corner_uses_euclidean_gap(geom):
    # 0.3 / 0.4 from the corner (2, 1) gives a 0.5 gap
    assert clearance(1.7, 1.4, geom) == pytest.approx(0.5)


def test_pedestrian_surface_distance(geom):
    assert clearance(-2.0, -1.0, geom) == pytest.approx(0.75)
    assert collision_check(RobotState(-2.0, -1.5, 0.0, radius=0.3), geom)
