"""Planar geometry helpers for the home simulator.

All coordinates are metres. Obstacles are axis-aligned rectangles; the
agent is a disc, so clearance checks compare point-to-rectangle distance
against the disc radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True, slots=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if self.x0 >= self.x1 or self.y0 >= self.y1:
            raise ValueError(f"degenerate rectangle {self}")

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def distance(self, x: float, y: float) -> float:
        """Euclidean distance from a point to the rectangle (0 inside)."""
        dx = max(self.x0 - x, 0.0, x - self.x1)
        dy = max(self.y0 - y, 0.0, y - self.y1)
        return math.hypot(dx, dy)

    def distance_arrays(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        dx = np.maximum(self.x0 - xs, 0.0)
        np.maximum(dx, xs - self.x1, out=dx)
        dy = np.maximum(self.y0 - ys, 0.0)
        np.maximum(dy, ys - self.y1, out=dy)
        return np.hypot(dx, dy)


def point_clear(
    x: float,
    y: float,
    width: float,
    height: float,
    obstacles: list[Rect],
    clearance: float,
) -> bool:
    """True when a disc of the given radius at (x, y) fits inside the room
    without touching any obstacle."""
    if x < clearance or y < clearance or x > width - clearance or y > height - clearance:
        return False
    return all(r.distance(x, y) >= clearance for r in obstacles)


def segment_clear(
    p: Point,
    q: Point,
    width: float,
    height: float,
    obstacles: list[Rect],
    clearance: float,
    step: float = 0.05,
) -> bool:
    """Sampled line-of-sight test: the whole segment keeps ``clearance``."""
    length = math.hypot(q[0] - p[0], q[1] - p[1])
    n = max(2, int(length / step) + 2)
    ts = np.linspace(0.0, 1.0, n)
    xs = p[0] + ts * (q[0] - p[0])
    ys = p[1] + ts * (q[1] - p[1])
    if (
        xs.min() < clearance
        or ys.min() < clearance
        or xs.max() > width - clearance
        or ys.max() > height - clearance
    ):
        return False
    for r in obstacles:
        if r.distance_arrays(xs, ys).min() < clearance:
            return False
    return True


def polyline_length(points: list[Point]) -> float:
    return sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(points, points[1:])
    )
