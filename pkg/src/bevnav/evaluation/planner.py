"""Optimal path lengths on an inflated occupancy grid (8-connected A*)."""
from __future__ import annotations

import heapq
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from bevnav.common.errors import NoPathError
from bevnav.sim.geometry import WorldGeometry, clearance_many

SQRT2 = math.sqrt(2.0)
_MOVES = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]


@dataclass
class OccupancyGrid:
    """Square grid over the arena; a cell is free when its center keeps
    ``robot_radius`` clearance from walls and boxes."""

    free: np.ndarray
    resolution: float
    half_extent: float

    @classmethod
    def build(cls, geom: WorldGeometry, robot_radius: float, resolution: float = 0.1) -> OccupancyGrid:
        n = int(round(2 * geom.half_extent / resolution))
        centers = -geom.half_extent + (np.arange(n) + 0.5) * resolution
        xs, ys = np.meshgrid(centers, centers, indexing="ij")
        free = clearance_many(xs, ys, geom) >= robot_radius
        return cls(free=free, resolution=resolution, half_extent=geom.half_extent)

    @property
    def size(self) -> int:
        return int(self.free.shape[0])

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        n = self.size
        i = min(max(int(math.floor((x + self.half_extent) / self.resolution)), 0), n - 1)
        j = min(max(int(math.floor((y + self.half_extent) / self.resolution)), 0), n - 1)
        return i, j

    def center(self, i: int, j: int) -> tuple[float, float]:
        r = self.resolution
        return -self.half_extent + (i + 0.5) * r, -self.half_extent + (j + 0.5) * r

    def neighbors(self, i: int, j: int) -> Iterator[tuple[int, int, bool]]:
        """Free 8-neighbors; a diagonal move needs both adjacent straight cells free."""
        n = self.size
        free = self.free
        for di, dj in _MOVES:
            ni, nj = i + di, j + dj
            if not (0 <= ni < n and 0 <= nj < n) or not free[ni, nj]:
                continue
            diagonal = di != 0 and dj != 0
            if diagonal and not (free[i + di, j] and free[i, j + dj]):
                continue
            yield ni, nj, diagonal


@dataclass
class PathPlan:
    cells: list[tuple[int, int]]
    points: list[tuple[float, float]]
    grid_length: float
    length: float


def _octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return (max(dx, dy) - min(dx, dy)) + SQRT2 * min(dx, dy)


def astar(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]) -> list[tuple[int, int]]:
    """Cell path from ``start`` to ``goal`` minimizing octile cost."""
    if not grid.free[start]:
        raise NoPathError(f"start cell {start} is occupied")
    if not grid.free[goal]:
        raise NoPathError(f"goal cell {goal} is occupied")
    g: dict[tuple[int, int], float] = {start: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    closed: set[tuple[int, int]] = set()
    heap: list[tuple[float, float, tuple[int, int]]] = [(_octile(start, goal), 0.0, start)]
    while heap:
        _, cost, cell = heapq.heappop(heap)
        if cell in closed:
            continue
        if cell == goal:
            path = [cell]
            while cell in parent:
                cell = parent[cell]
                path.append(cell)
            return path[::-1]
        closed.add(cell)
        for ni, nj, diagonal in grid.neighbors(*cell):
            nxt = (ni, nj)
            new_cost = cost + (SQRT2 if diagonal else 1.0)
            if nxt not in closed and new_cost < g.get(nxt, math.inf):
                g[nxt] = new_cost
                parent[nxt] = cell
                heapq.heappush(heap, (new_cost + _octile(nxt, goal), new_cost, nxt))
    raise NoPathError(f"no path from cell {start} to cell {goal}")


def grid_path_length(cells: list[tuple[int, int]], resolution: float) -> float:
    """Octile cost of a cell path, summed as straight and diagonal move counts."""
    straight = diagonal = 0
    for (a, b), (c, d) in zip(cells[:-1], cells[1:], strict=True):
        if a != c and b != d:
            diagonal += 1
        else:
            straight += 1
    return resolution * (straight + SQRT2 * diagonal)


def line_of_sight(
    p: tuple[float, float], q: tuple[float, float], geom: WorldGeometry, radius: float, step: float
) -> bool:
    dist = math.hypot(q[0] - p[0], q[1] - p[1])
    samples = max(int(math.ceil(dist / step)), 1) + 1
    s = np.linspace(0.0, 1.0, samples)
    xs = p[0] + (q[0] - p[0]) * s
    ys = p[1] + (q[1] - p[1]) * s
    return bool(np.all(clearance_many(xs, ys, geom) >= radius))


def string_pull(
    points: list[tuple[float, float]], geom: WorldGeometry, radius: float, step: float
) -> list[tuple[float, float]]:
    """Greedy shortcutting: from each kept point jump to the farthest visible successor."""
    out = [points[0]]
    i = 0
    while i < len(points) - 1:
        j = i + 1
        while j + 1 < len(points) and line_of_sight(points[i], points[j + 1], geom, radius, step):
            j += 1
        out.append(points[j])
        i = j
    return out


def plan_path(
    start: tuple[float, float],
    goal: tuple[float, float],
    geom: WorldGeometry,
    robot_radius: float,
    resolution: float = 0.1,
    smooth: bool = False,
) -> PathPlan:
    grid = OccupancyGrid.build(geom, robot_radius, resolution)
    cells = astar(grid, grid.cell_of(*start), grid.cell_of(*goal))
    grid_length = grid_path_length(cells, resolution)
    if not smooth:
        return PathPlan(cells, [grid.center(*c) for c in cells], grid_length, grid_length)
    raw = [tuple(map(float, start)), *(grid.center(*c) for c in cells[1:-1]), tuple(map(float, goal))]
    pulled = string_pull(raw, geom, robot_radius, resolution / 4)
    length = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pulled[:-1], pulled[1:], strict=True))
    return PathPlan(cells, pulled, grid_length, length)


def optimal_path_length(
    start: tuple[float, float],
    goal: tuple[float, float],
    geom: WorldGeometry,
    robot_radius: float,
    resolution: float = 0.1,
    smooth: bool = False,
) -> float:
    """Shortest collision-free length from ``start`` to ``goal``.

    The default is the octile A* cost between cell centers on the inflated
    grid. ``smooth=True`` shortens that path by line of sight first.
    Raises ``NoPathError`` when the goal is unreachable.
    """
    return plan_path(start, goal, geom, robot_radius, resolution, smooth).length
