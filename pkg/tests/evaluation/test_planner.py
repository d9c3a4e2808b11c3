"""Optimal path lengths used as the SPL reference."""
from __future__ import annotations

import heapq
import math

import numpy as np
import pytest

from bevnav.common.config import EvalConfig
from bevnav.common.errors import NoPathError
from bevnav.evaluation.planner import (
    OccupancyGrid,
    astar,
    grid_path_length,
    optimal_path_length,
    plan_path,
)
from bevnav.sim.geometry import WorldGeometry

RADIUS = 0.3


def _geom(boxes=(), half: float = 5.0) -> WorldGeometry:
    lo = np.array([b[0] for b in boxes], dtype=np.float64).reshape(-1, 3)
    hi = np.array([b[1] for b in boxes], dtype=np.float64).reshape(-1, 3)
    return WorldGeometry(
        half_extent=half,
        wall_height=2.0,
        box_lo=lo,
        box_hi=hi,
        ped_xy=np.zeros((0, 2)),
        ped_radius=np.zeros(0),
        ped_height=np.zeros(0),
    )


WALL = ((0.0, -3.0, 0.0), (0.2, 5.0, 1.0))
RING = [
    ((2.0, 2.0, 0.0), (4.0, 2.2, 1.0)),
    ((2.0, 3.8, 0.0), (4.0, 4.0, 1.0)),
    ((2.0, 2.0, 0.0), (2.2, 4.0, 1.0)),
    ((3.8, 2.0, 0.0), (4.0, 4.0, 1.0)),
]


def _dijkstra(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]) -> float:
    """Exhaustive 8-connected search without corner cutting, in grid units."""
    free, n = grid.free, grid.size
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done: set[tuple[int, int]] = set()
    while heap:
        d, (i, j) = heapq.heappop(heap)
        if (i, j) in done:
            continue
        done.add((i, j))
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ni, nj = i + di, j + dj
                if (di, dj) == (0, 0) or not (0 <= ni < n and 0 <= nj < n) or not free[ni, nj]:
                    continue
                if di and dj and not (free[i + di, j] and free[i, j + dj]):
                    continue
                nd = d + (math.sqrt(2.0) if di and dj else 1.0)
                if nd < dist.get((ni, nj), math.inf):
                    dist[(ni, nj)] = nd
                    heapq.heappush(heap, (nd, (ni, nj)))
    return dist[goal] * grid.resolution


@pytest.mark.parametrize("smooth", [True, False])
def test_empty_world_close_to_euclidean(smooth):
    length = optimal_path_length((-2.46, 0.03), (2.54, 0.03), _geom(), RADIUS, smooth=smooth)
    assert 5.0 - 1e-9 <= length <= 5.25


def test_off_axis_discretization_bound():
    start, goal = (-3.13, -1.77), (2.61, 3.04)
    euclid = math.hypot(goal[0] - start[0], goal[1] - start[1])
    smooth = optimal_path_length(start, goal, _geom(), RADIUS, smooth=True)
    assert smooth == pytest.approx(euclid)
    raw = optimal_path_length(start, goal, _geom(), RADIUS, smooth=False)
    assert abs(raw - euclid) <= 0.05 * euclid


def test_enclosed_goal_has_no_path():
    with pytest.raises(NoPathError):
        optimal_path_length((-3.0, -3.0), (3.0, 3.0), _geom(RING), RADIUS)


def test_occupied_endpoints_rejected():
    grid = OccupancyGrid.build(_geom([WALL]), RADIUS)
    with pytest.raises(NoPathError, match="start cell"):
        astar(grid, grid.cell_of(0.1, 0.0), grid.cell_of(2.0, 0.0))
    with pytest.raises(NoPathError, match="goal cell"):
        astar(grid, grid.cell_of(-2.0, 0.0), grid.cell_of(4.95, 0.0))


def test_detour_matches_exhaustive_search():
    geom = _geom([WALL])
    start, goal = (-2.0, 2.0), (2.0, 2.0)
    grid = OccupancyGrid.build(geom, RADIUS)
    expected = _dijkstra(grid, grid.cell_of(*start), grid.cell_of(*goal))
    length = optimal_path_length(start, goal, geom, RADIUS, smooth=False)
    assert length == pytest.approx(expected, rel=1e-12)
    # the wall forces a long way round
    assert length > 2 * 5.0


def test_smoothed_detour_is_shorter_but_collision_free():
    geom = _geom([WALL])
    plan = plan_path((-2.0, 2.0), (2.0, 2.0), geom, RADIUS, smooth=True)
    assert plan.length < plan.grid_length
    # every crossing passes below the inflated wall end at y = -3.3
    assert plan.length > math.hypot(2.0, 5.3) + math.hypot(1.8, 5.3) - 0.01
    assert plan.points[0] == (-2.0, 2.0)
    assert plan.points[-1] == (2.0, 2.0)


def test_grid_inflation():
    grid = OccupancyGrid.build(_geom(), RADIUS)
    assert grid.size == 100
    # centers within the robot radius of the arena wall are blocked
    assert not grid.free[0, 50]
    assert not grid.free[2, 50]
    assert grid.free[3, 50]
    assert grid.cell_of(-99.0, 99.0) == (0, 99)


def test_grid_path_length_counts_moves():
    cells = [(0, 0), (1, 1), (2, 1), (3, 2)]
    assert grid_path_length(cells, 0.1) == pytest.approx(0.1 * (1 + 2 * math.sqrt(2.0)))


def test_default_length_is_octile_grid_cost():
    geom = _geom([WALL])
    start, goal = (-2.0, 2.0), (2.0, 2.0)
    grid = OccupancyGrid.build(geom, RADIUS)
    assert optimal_path_length(start, goal, geom, RADIUS) == pytest.approx(
        _dijkstra(grid, grid.cell_of(*start), grid.cell_of(*goal)), rel=1e-12
    )
    assert EvalConfig().smooth_paths is False
