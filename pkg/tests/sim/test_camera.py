"""Raycast depth camera against analytic geometry."""
from __future__ import annotations

import numpy as np
import pytest

from bevnav.common.errors import EmptyCloudError
from bevnav.sim.camera import ray_grid, raycast_depth, raycast_hits
from bevnav.sim.geometry import WorldGeometry, ray_aabb, ray_cylinders
from bevnav.sim.spec import SimConfig

SIM = SimConfig()


def _geom(half: float = 5.0, boxes=(), peds=()) -> WorldGeometry:
    lo = np.array([b[0] for b in boxes], dtype=np.float64).reshape(-1, 3)
    hi = np.array([b[1] for b in boxes], dtype=np.float64).reshape(-1, 3)
    return WorldGeometry(
        half_extent=half,
        wall_height=2.0,
        box_lo=lo,
        box_hi=hi,
        ped_xy=np.array([p[0] for p in peds], dtype=np.float64).reshape(-1, 2),
        ped_radius=np.array([p[1] for p in peds], dtype=np.float64),
        ped_height=np.full(len(peds), 1.7),
    )


def test_ray_grid_is_unit_and_within_fov():
    dirs = ray_grid(SIM)
    assert dirs.shape == (SIM.rays_h * SIM.rays_v, 3)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)
    az = np.degrees(np.arctan2(dirs[:, 0], dirs[:, 1]))
    assert np.abs(az).max() == pytest.approx(SIM.h_fov_deg / 2)


def test_flat_floor_only():
    pts = raycast_hits(0.0, 0.0, 0.3, _geom(half=50.0), SIM)
    assert len(pts) > 0
    np.testing.assert_allclose(pts[:, 2], 0.0, atol=1e-6)
    assert np.all(pts[:, 1] > 0)


def test_box_ahead_front_face_range():
    box = ((1.5, -0.5, 0.0), (2.5, 0.5, 1.0))
    pts = raycast_hits(0.0, 0.0, 0.0, _geom(boxes=[box]), SIM)
    raised = pts[(pts[:, 2] > 1e-6) & (np.abs(pts[:, 0]) < 0.5)]
    assert len(raised) > 0
    assert raised[:, 1].min() == pytest.approx(1.5, abs=1e-6)


def test_rotation_is_consistent():
    box = ((-0.5, 1.5, 0.0), (0.5, 2.5, 1.0))
    pts = raycast_hits(0.0, 0.0, np.pi / 2, _geom(boxes=[box]), SIM)
    raised = pts[(pts[:, 2] > 1e-6) & (np.abs(pts[:, 0]) < 0.5)]
    assert raised[:, 1].min() == pytest.approx(1.5, abs=1e-6)


def test_obstacle_beyond_range_is_invisible():
    box = ((11.5, -0.5, 0.0), (12.5, 0.5, 1.0))
    pts = raycast_hits(0.0, 0.0, 0.0, _geom(half=20.0, boxes=[box]), SIM)
    np.testing.assert_allclose(pts[:, 2], 0.0, atol=1e-6)
    assert np.linalg.norm(pts - np.array([0.0, 0.0, SIM.camera_height]), axis=1).max() <= SIM.max_range + 1e-9


def test_pedestrian_cylinder_visible():
    pts = raycast_hits(0.0, 0.0, 0.0, _geom(peds=[((3.0, 0.0), 0.3)]), SIM)
    raised = pts[(pts[:, 2] > 1e-6) & (np.abs(pts[:, 0]) < 0.3)]
    assert raised[:, 1].min() == pytest.approx(2.7, abs=0.01)


def test_ray_aabb_parallel_rays():
    origins = np.array([[0.0, 0.0, 0.5], [0.0, 2.0, 0.5]])
    dirs = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    t = ray_aabb(origins, dirs, np.array([[2.0, -1.0, 0.0]]), np.array([[3.0, 1.0, 1.0]]))
    assert t[0] == pytest.approx(2.0)
    assert np.isinf(t[1])


def test_ray_cylinder_behind_is_missed():
    origins = np.array([[0.0, 0.0, 0.5]])
    t = ray_cylinders(origins, np.array([[1.0, 0.0, 0.0]]), np.array([[-3.0, 0.0]]), np.array([0.3]), np.array([1.7]))
    assert np.isinf(t[0])


def test_depth_resamples_to_cloud_size(rng):
    cloud = raycast_depth(0.0, 0.0, 0.0, _geom(), SimConfig(cloud_points=100), rng)
    assert len(cloud) == 100
    assert cloud.frame == "camera"


def test_no_hits_raises(rng):
    sim = SimConfig(v_fov_deg=10.0, rays_v=3, max_range=1.0)
    with pytest.raises(EmptyCloudError):
        raycast_depth(0.0, 0.0, 0.0, _geom(half=50.0), sim, rng)
