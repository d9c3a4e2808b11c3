"""Raycast depth camera mounted on the robot.

Camera frame: x to the right, y forward, z height above the floor. Ranges are
measured from the sensor origin at ``camera_height``.
"""
from __future__ import annotations

import math

import numpy as np

from bevnav.bev.cloud import PointCloud, downsample_cloud
from bevnav.common.errors import EmptyCloudError
from bevnav.sim.geometry import WorldGeometry, ray_aabb, ray_cylinders, ray_floor, ray_walls
from bevnav.sim.spec import SimConfig


def ray_grid(sim: SimConfig) -> np.ndarray:
    """(rays_v * rays_h, 3) unit directions in the camera frame."""
    az = np.deg2rad(np.linspace(-sim.h_fov_deg / 2, sim.h_fov_deg / 2, sim.rays_h))
    el = np.deg2rad(np.linspace(-sim.v_fov_deg / 2, sim.v_fov_deg / 2, sim.rays_v))
    el_g, az_g = np.meshgrid(el, az, indexing="ij")
    dirs = np.stack(
        [np.cos(el_g) * np.sin(az_g), np.cos(el_g) * np.cos(az_g), np.sin(el_g)], axis=-1
    )
    return dirs.reshape(-1, 3)


def raycast_hits(
    x: float, y: float, theta: float, geom: WorldGeometry, sim: SimConfig
) -> np.ndarray:
    """All in-range hits as camera-frame points, before resampling."""
    cam = ray_grid(sim)
    fwd = np.array([math.cos(theta), math.sin(theta)])
    right = np.array([math.sin(theta), -math.cos(theta)])
    dirs = np.empty_like(cam)
    dirs[:, :2] = cam[:, :1] * right[None] + cam[:, 1:2] * fwd[None]
    dirs[:, 2] = cam[:, 2]
    origins = np.tile(np.array([x, y, sim.camera_height]), (len(dirs), 1))

    t_floor = ray_floor(origins, dirs)
    t_obj = np.minimum.reduce(
        [
            ray_walls(origins, dirs, geom.half_extent, geom.wall_height),
            ray_aabb(origins, dirs, geom.box_lo, geom.box_hi),
            ray_cylinders(origins, dirs, geom.ped_xy, geom.ped_radius, geom.ped_height),
        ]
    )
    t = np.minimum(t_floor, t_obj)
    keep = np.isfinite(t) & (t >= sim.min_range) & (t <= sim.max_range)
    pts = cam[keep] * t[keep, None]
    pts[:, 2] += sim.camera_height
    on_floor = t_floor[keep] <= t_obj[keep]
    pts[on_floor, 2] = 0.0
    return pts


def raycast_depth(
    x: float,
    y: float,
    theta: float,
    geom: WorldGeometry,
    sim: SimConfig,
    rng: np.random.Generator,
) -> PointCloud:
    """Render one frame and resample it to ``sim.cloud_points`` points."""
    pts = raycast_hits(x, y, theta, geom, sim)
    if len(pts) == 0:
        raise EmptyCloudError(f"raycast from ({x:.3f}, {y:.3f}) produced no in-range hits")
    return downsample_cloud(PointCloud(pts, frame="camera"), sim.cloud_points, rng)
