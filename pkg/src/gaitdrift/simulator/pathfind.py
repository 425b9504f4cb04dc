"""Grid-based path planning over a rectangular floor plan.

Plans run A* on a regular occupancy grid whose cells are blocked when the
agent disc would overlap an obstacle or a wall, then shorten the cell path
with a greedy line-of-sight pass so walks follow natural straight segments
instead of staircase grid moves.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .geometry import Point, Rect, point_clear, segment_clear

GRID_RESOLUTION = 0.1

SQRT2 = math.sqrt(2.0)


class PathError(RuntimeError):
    """No collision-free route exists between the requested endpoints."""


class OccupancyGrid:
    """Free/blocked cells at a fixed resolution for one clearance value."""

    def __init__(
        self,
        width: float,
        height: float,
        obstacles: list[Rect],
        clearance: float,
        resolution: float = GRID_RESOLUTION,
    ):
        self.width = width
        self.height = height
        self.obstacles = list(obstacles)
        self.clearance = clearance
        self.resolution = resolution
        self.nx = max(1, int(round(width / resolution)))
        self.ny = max(1, int(round(height / resolution)))
        # Cell (i, j) is represented by its centre point.
        cx = (np.arange(self.nx) + 0.5) * resolution
        cy = (np.arange(self.ny) + 0.5) * resolution
        xs, ys = np.meshgrid(cx, cy, indexing="ij")
        free = (
            (xs >= clearance)
            & (ys >= clearance)
            & (xs <= width - clearance)
            & (ys <= height - clearance)
        )
        for rect in self.obstacles:
            free &= rect.distance_arrays(xs, ys) >= clearance
        self.free = free
        self._cx = cx
        self._cy = cy

    def cell_center(self, cell: tuple[int, int]) -> Point:
        return (float(self._cx[cell[0]]), float(self._cy[cell[1]]))

    def nearest_free_cell(self, point: Point) -> tuple[int, int]:
        i = min(self.nx - 1, max(0, int(point[0] / self.resolution)))
        j = min(self.ny - 1, max(0, int(point[1] / self.resolution)))
        if self.free[i, j]:
            return (i, j)
        free_idx = np.argwhere(self.free)
        if free_idx.size == 0:
            raise PathError("floor plan has no free space at this clearance")
        centres_x = self._cx[free_idx[:, 0]]
        centres_y = self._cy[free_idx[:, 1]]
        d2 = (centres_x - point[0]) ** 2 + (centres_y - point[1]) ** 2
        best = int(np.argmin(d2))
        return (int(free_idx[best, 0]), int(free_idx[best, 1]))


def _astar(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]):
    """8-connected A* with octile heuristic; diagonal steps are allowed only
    when both adjacent orthogonal cells are free (no corner cutting)."""
    free = grid.free
    nx, ny = grid.nx, grid.ny

    def heuristic(cell):
        dx = abs(cell[0] - goal[0])
        dy = abs(cell[1] - goal[1])
        return (dx + dy) + (SQRT2 - 2.0) * min(dx, dy)

    g_score = {start: 0.0}
    came_from: dict[tuple[int, int], tuple[int, int]] = {}
    counter = 0
    open_heap = [(heuristic(start), counter, start)]
    closed = set()
    while open_heap:
        _, _, current = heapq.heappop(open_heap)
        if current == goal:
            path = [current]
            while current in came_from:
                current = came_from[current]
                path.append(current)
            path.reverse()
            return path
        if current in closed:
            continue
        closed.add(current)
        ci, cj = current
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                ni, nj = ci + di, cj + dj
                if not (0 <= ni < nx and 0 <= nj < ny):
                    continue
                if not free[ni, nj]:
                    continue
                if di != 0 and dj != 0:
                    if not (free[ci + di, cj] and free[ci, cj + dj]):
                        continue
                    step = SQRT2
                else:
                    step = 1.0
                tentative = g_score[current] + step
                neighbor = (ni, nj)
                if tentative < g_score.get(neighbor, math.inf) - 1e-12:
                    g_score[neighbor] = tentative
                    came_from[neighbor] = current
                    counter += 1
                    heapq.heappush(
                        open_heap, (tentative + heuristic(neighbor), counter, neighbor)
                    )
    return None


def _smooth(points: list[Point], grid: OccupancyGrid) -> list[Point]:
    """Greedy shortcutting: from each anchor jump to the farthest point that
    is still reachable in a straight clear line."""
    if len(points) <= 2:
        return points
    out = [points[0]]
    i = 0
    while i < len(points) - 1:
        j = len(points) - 1
        while j > i + 1:
            if segment_clear(
                points[i],
                points[j],
                grid.width,
                grid.height,
                grid.obstacles,
                grid.clearance,
            ):
                break
            j -= 1
        out.append(points[j])
        i = j
    return out


def plan_path(
    plan,
    start: Point,
    goal: Point,
    clearance: float = 0.5,
    resolution: float = GRID_RESOLUTION,
) -> list[Point]:
    """Collision-free polyline from start to goal (both included) across a
    floor plan, keeping ``clearance`` metres from walls and obstacles."""
    grid = OccupancyGrid(plan.width, plan.height, list(plan.obstacles), clearance, resolution)
    return plan_on_grid(grid, start, goal)


def plan_on_grid(grid: OccupancyGrid, start: Point, goal: Point) -> list[Point]:
    """Collision-free polyline from start to goal (both included).

    Endpoints must respect the grid clearance. Straight connections are
    returned directly; otherwise the A* cell path is shortcut-smoothed.
    """
    for name, point in (("start", start), ("goal", goal)):
        if not point_clear(
            point[0], point[1], grid.width, grid.height, grid.obstacles, grid.clearance
        ):
            raise PathError(f"{name} point {point} violates clearance {grid.clearance}")
    if start == goal:
        return [start]
    if segment_clear(
        start, goal, grid.width, grid.height, grid.obstacles, grid.clearance
    ):
        return [start, goal]
    start_cell = grid.nearest_free_cell(start)
    goal_cell = grid.nearest_free_cell(goal)
    cells = _astar(grid, start_cell, goal_cell)
    if cells is None:
        raise PathError(f"no route from {start} to {goal}")
    points = [start] + [grid.cell_center(c) for c in cells] + [goal]
    return _smooth(points, grid)
