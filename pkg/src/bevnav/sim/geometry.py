"""Vectorized ray and disc intersection tests against the arena contents.

Rays are (R, 3) origins and unit directions; every ``ray_*`` function returns
(R,) hit distances with ``inf`` for a miss.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-12


@dataclass
class WorldGeometry:
    """Static and moving obstacles at one instant."""

    half_extent: float
    wall_height: float
    box_lo: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    box_hi: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    ped_xy: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    ped_radius: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ped_height: np.ndarray = field(default_factory=lambda: np.zeros(0))


def ray_floor(origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    dz = dirs[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dz < -_EPS, -origins[:, 2] / dz, np.inf)
    return np.where(t >= 0, t, np.inf)


def ray_walls(origins: np.ndarray, dirs: np.ndarray, half_extent: float, height: float) -> np.ndarray:
    """Rays start inside the arena and leave through one of the four walls."""
    best = np.full(len(origins), np.inf)
    for axis in (0, 1):
        d = dirs[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            plane = np.where(d > 0, half_extent, -half_extent)
            t = np.where(np.abs(d) > _EPS, (plane - origins[:, axis]) / d, np.inf)
        t = np.where(t >= 0, t, np.inf)
        z = origins[:, 2] + np.where(np.isfinite(t), t, 0.0) * dirs[:, 2]
        t = np.where((z >= 0) & (z <= height), t, np.inf)
        best = np.minimum(best, t)
    return best


def ray_aabb(origins: np.ndarray, dirs: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Slab test against B boxes; nearest entry distance per ray."""
    if len(lo) == 0:
        return np.full(len(origins), np.inf)
    o = origins[:, None, :]
    d = dirs[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(np.abs(d) > _EPS, 1.0 / d, np.inf)
        t1 = (lo[None] - o) * inv
        t2 = (hi[None] - o) * inv
    # a ray parallel to a slab hits it only when the origin lies inside it
    parallel = np.abs(d) <= _EPS
    inside = (o >= lo[None]) & (o <= hi[None])
    tmin = np.where(parallel, np.where(inside, -np.inf, np.inf), np.minimum(t1, t2))
    tmax = np.where(parallel, np.where(inside, np.inf, -np.inf), np.maximum(t1, t2))
    near = tmin.max(axis=2)
    far = tmax.min(axis=2)
    hit = (near <= far) & (far >= 0)
    t = np.where(hit, np.maximum(near, 0.0), np.inf)
    return t.min(axis=1)


def ray_cylinders(
    origins: np.ndarray,
    dirs: np.ndarray,
    centers: np.ndarray,
    radii: np.ndarray,
    heights: np.ndarray,
) -> np.ndarray:
    """Side surfaces of vertical cylinders standing on the floor."""
    if len(centers) == 0:
        return np.full(len(origins), np.inf)
    ox = origins[:, None, 0] - centers[None, :, 0]
    oy = origins[:, None, 1] - centers[None, :, 1]
    dx = dirs[:, None, 0]
    dy = dirs[:, None, 1]
    a = dx * dx + dy * dy
    b = 2.0 * (ox * dx + oy * dy)
    c = ox * ox + oy * oy - radii[None, :] ** 2
    disc = b * b - 4.0 * a * c
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.maximum(disc, 0.0))
        t0 = (-b - sq) / (2.0 * a)
        t1 = (-b + sq) / (2.0 * a)
    t = np.where(t0 >= 0, t0, t1)
    z = origins[:, None, 2] + np.where(np.isfinite(t), t, 0.0) * dirs[:, None, 2]
    ok = (a > _EPS) & (disc >= 0) & (t >= 0) & (z >= 0) & (z <= heights[None, :])
    return np.where(ok, t, np.inf).min(axis=1)


def clearance_many(xs: np.ndarray, ys: np.ndarray, geom: WorldGeometry) -> np.ndarray:
    """Distance from each point to the nearest wall, box footprint or pedestrian surface."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    best = geom.half_extent - np.maximum(np.abs(xs), np.abs(ys))
    if len(geom.box_lo):
        lo, hi = geom.box_lo, geom.box_hi
        dx = np.maximum(np.maximum(lo[None, :, 0] - xs[..., None], 0.0), xs[..., None] - hi[None, :, 0])
        dy = np.maximum(np.maximum(lo[None, :, 1] - ys[..., None], 0.0), ys[..., None] - hi[None, :, 1])
        best = np.minimum(best, np.hypot(dx, dy).min(axis=-1))
    if len(geom.ped_xy):
        px = geom.ped_xy[None, :, 0] - xs[..., None]
        py = geom.ped_xy[None, :, 1] - ys[..., None]
        best = np.minimum(best, (np.hypot(px, py) - geom.ped_radius[None, :]).min(axis=-1))
    return best


def clearance(x: float, y: float, geom: WorldGeometry) -> float:
    return float(clearance_many(np.array([x]), np.array([y]), geom)[0])

