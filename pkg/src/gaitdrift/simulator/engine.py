"""Trajectory synthesis and sensor firing.

The engine turns a floor plan plus a scenario into a sensor event log:
plan each day's visits, route walks along cached collision-free paths,
sample the agent's position at a fixed rate, and derive ON/OFF edges for
every sensor from the sampled trajectory.

Randomness is drawn from one substream per (seed, day), so runs are
reproducible event-for-event and adjacent days are independent. Schedules
and visit positions never depend on walking speed, which lets two runs
that differ only in speed share identical routes.
"""

from __future__ import annotations

import math

import numpy as np

from ..events import OFF, ON, EventLog, SensorEvent
from .floorplan import ActivitySpot, FloorPlan, SensorKind
from .geometry import Point, point_clear
from .pathfind import OccupancyGrid, PathError, plan_on_grid
from .scenario import GroundTruth, Scenario
from .schedule import OUTSIDE, generate_schedule, home_spot, walk_budget

# Extra clearance on top of the body radius used for planning, absorbing
# the sampling error of grid-segment shortcuts.
PLANNING_MARGIN = 0.08

# Seconds the door switch stays open per crossing.
DOOR_HOLD = 1.5

# Seconds of position samples emitted after each arrival, long enough for
# the stillness rule to release motion sensors.
DWELL_HEAD = 1.3

DEFAULT_STILL_WINDOW = 1.0
DEFAULT_STILL_EPS = 0.01


class SimulationError(RuntimeError):
    """The floor plan cannot support the requested scenario."""


def sample_walk(
    points: list[Point], speed: float, rate: float, t0: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Sample a constant-speed traversal of a polyline at ``rate`` Hz.

    Returns (times, xs, ys, arrival_time). Sampling starts at ``t0`` and
    always includes the exact arrival instant as the final sample.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("points must be a non-empty list of (x, y) pairs")
    if len(pts) > 1:
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        pts = pts[keep]
    if len(pts) == 1:
        ts = np.array([t0])
        return ts, np.array([pts[0, 0]]), np.array([pts[0, 1]]), t0
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    total = float(cum[-1])
    duration = total / speed
    n = int(duration * rate + 1e-9)
    ts = t0 + np.arange(n + 1) / rate
    arrival = t0 + duration
    if arrival > ts[-1] + 1e-9:
        ts = np.append(ts, arrival)
    else:
        arrival = float(ts[-1])
    s = np.minimum((ts - t0) * speed, total)
    xs = np.interp(s, cum, pts[:, 0])
    ys = np.interp(s, cum, pts[:, 1])
    return ts, xs, ys, arrival


def fire_sensors(
    ts: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    present: np.ndarray,
    plan: FloorPlan,
    body_radius: float,
    still_window: float = DEFAULT_STILL_WINDOW,
    still_eps: float = DEFAULT_STILL_EPS,
) -> list[SensorEvent]:
    """Derive ON/OFF events from a sampled trajectory.

    A PIR is active while the agent's centre is within ``radius +
    body_radius`` of it (inclusive) and the agent has moved more than
    ``still_eps`` over the trailing ``still_window`` seconds. A pressure
    mat is active whenever the body disc overlaps its rectangle, moving or
    not. ``present`` marks samples where the agent is inside the home;
    door sensors are event-driven and not evaluated here.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        return []
    if not (np.diff(ts) > 0).all():
        raise ValueError("trajectory timestamps must be strictly increasing")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    present = np.asarray(present, dtype=bool)
    seg = np.hypot(np.diff(xs), np.diff(ys))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    window_start = np.searchsorted(ts, ts - still_window, side="left")
    moving = (cum - cum[window_start]) > still_eps

    events: list[SensorEvent] = []
    for sensor in plan.sensors:
        if sensor.kind is SensorKind.DOOR:
            continue
        if sensor.kind is SensorKind.PIR:
            dist = np.hypot(xs - sensor.x, ys - sensor.y)
            active = (dist <= sensor.radius + body_radius) & moving & present
        else:
            dist = sensor.rect.distance_arrays(xs, ys)
            active = (dist <= body_radius) & present
        previous = np.concatenate(([False], active[:-1]))
        for i in np.flatnonzero(active != previous):
            status = ON if active[i] else OFF
            events.append(
                SensorEvent(sensor_id=sensor.sensor_id, timestamp=float(ts[i]), status=status)
            )
    return events


class _Router:
    """Caches smoothed canonical paths between anchor points (spot centres
    and the inside of the door). Reverse routes reuse the forward path."""

    def __init__(self, plan: FloorPlan, clearance: float):
        self.plan = plan
        self.grid = OccupancyGrid(plan.width, plan.height, list(plan.obstacles), clearance)
        self.anchors: dict[str, Point] = {s.name: (s.x, s.y) for s in plan.spots}
        self.anchors[OUTSIDE] = plan.door_inner_point(clearance + 0.3)
        self._cache: dict[tuple[str, str], list[Point]] = {}

    def route(self, a: str, b: str) -> list[Point]:
        key = (a, b)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        reverse = self._cache.get((b, a))
        if reverse is not None:
            path = list(reversed(reverse))
        else:
            try:
                path = plan_on_grid(self.grid, self.anchors[a], self.anchors[b])
            except PathError as exc:
                raise SimulationError(f"no route between {a!r} and {b!r}: {exc}") from exc
        self._cache[key] = path
        return path


def _jitter_point(spot: ActivitySpot, rng: np.random.Generator) -> Point:
    r = spot.jitter * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return (spot.x + r * math.cos(theta), spot.y + r * math.sin(theta))


def _validate_clearances(plan: FloorPlan, clearance: float) -> None:
    obstacles = list(plan.obstacles)
    for spot in plan.spots:
        if not point_clear(
            spot.x, spot.y, plan.width, plan.height, obstacles, clearance + spot.jitter
        ):
            raise SimulationError(
                f"spot {spot.name!r} needs {clearance + spot.jitter:.2f} m of clearance"
            )
    inner = plan.door_inner_point(clearance + 0.3)
    if not point_clear(inner[0], inner[1], plan.width, plan.height, obstacles, clearance):
        raise SimulationError("door approach is blocked at this body radius")


def simulate(
    plan: FloorPlan,
    scenario: Scenario,
    still_window: float = DEFAULT_STILL_WINDOW,
    still_eps: float = DEFAULT_STILL_EPS,
) -> tuple[EventLog, GroundTruth]:
    """Run one scenario on one floor plan.

    Returns the sensor event log and the matching per-day drift labels.
    The run is a pure function of (plan, scenario): repeating it yields an
    identical event log.
    """
    clearance = scenario.body_radius + PLANNING_MARGIN
    _validate_clearances(plan, clearance)
    router = _Router(plan, clearance)
    rate = scenario.sample_rate
    budget = walk_budget(plan)
    head_offsets = np.arange(1, int(round(DWELL_HEAD * rate)) + 1) / rate

    t_chunks: list[np.ndarray] = []
    x_chunks: list[np.ndarray] = []
    y_chunks: list[np.ndarray] = []
    p_chunks: list[np.ndarray] = []
    door_events: list[SensorEvent] = []
    door_id = plan.door.sensor_id

    home = home_spot(plan)
    current_xy: Point = (home.x, home.y)
    current_anchor = home.name

    for day in range(1, scenario.num_days + 1):
        rng = np.random.default_rng(np.random.SeedSequence((scenario.seed, day)))
        visits = generate_schedule(plan, scenario, day, rng)
        speed = scenario.speed_for_day(day)
        for visit in visits:
            if visit.spot == OUTSIDE:
                target = router.anchors[OUTSIDE]
            else:
                target = _jitter_point(plan.spot(visit.spot), rng)
            if current_anchor == OUTSIDE:
                # Re-entry: the door swings as the walk begins.
                door_events.append(
                    SensorEvent(sensor_id=door_id, timestamp=visit.start, status=ON)
                )
                door_events.append(
                    SensorEvent(sensor_id=door_id, timestamp=visit.start + DOOR_HOLD, status=OFF)
                )
            route = router.route(current_anchor, visit.spot)
            ts, xs, ys, arrival = sample_walk(
                [current_xy] + route + [target], speed, rate, visit.start
            )
            if arrival - visit.start > budget:
                raise SimulationError(
                    f"walk {current_anchor!r}->{visit.spot!r} exceeds the planning budget"
                )
            t_chunks.append(ts)
            x_chunks.append(xs)
            y_chunks.append(ys)
            p_chunks.append(np.ones(len(ts), dtype=bool))
            if visit.spot == OUTSIDE:
                door_events.append(
                    SensorEvent(sensor_id=door_id, timestamp=arrival, status=ON)
                )
                door_events.append(
                    SensorEvent(sensor_id=door_id, timestamp=arrival + DOOR_HOLD, status=OFF)
                )
                # One absent sample releases any sensor left active.
                t_chunks.append(np.array([arrival + DOOR_HOLD]))
                x_chunks.append(np.array([target[0]]))
                y_chunks.append(np.array([target[1]]))
                p_chunks.append(np.zeros(1, dtype=bool))
            else:
                t_chunks.append(arrival + head_offsets)
                x_chunks.append(np.full(len(head_offsets), target[0]))
                y_chunks.append(np.full(len(head_offsets), target[1]))
                p_chunks.append(np.ones(len(head_offsets), dtype=bool))
            current_xy = target
            current_anchor = visit.spot

    events = fire_sensors(
        np.concatenate(t_chunks),
        np.concatenate(x_chunks),
        np.concatenate(y_chunks),
        np.concatenate(p_chunks),
        plan,
        scenario.body_radius,
        still_window=still_window,
        still_eps=still_eps,
    )
    events.extend(door_events)
    events.sort(key=lambda e: e.timestamp)
    log = EventLog(events=events, day_length=scenario.day_length)
    truth = GroundTruth(num_days=scenario.num_days, onset_day=scenario.onset_day)
    return log, truth
