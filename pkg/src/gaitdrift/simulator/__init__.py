"""Synthetic single-resident smart home: floor plans, routines, sensors."""

from .engine import (
    SimulationError,
    fire_sensors,
    sample_walk,
    simulate,
)
from .floorplan import (
    BUILTIN_LAYOUTS,
    ActivitySpot,
    FloorPlan,
    LayoutError,
    SensorKind,
    SensorSpec,
    floor_plan_from_dict,
    load_floor_plan,
)
from .geometry import Rect, point_clear, polyline_length, segment_clear
from .pathfind import OccupancyGrid, PathError, plan_on_grid, plan_path
from .scenario import (
    SPEED_RANGE,
    GroundTruth,
    Scenario,
    read_ground_truth,
    write_ground_truth,
)
from .schedule import OUTSIDE, Visit, generate_schedule, home_spot, walk_budget

__all__ = [
    "BUILTIN_LAYOUTS",
    "OUTSIDE",
    "SPEED_RANGE",
    "ActivitySpot",
    "FloorPlan",
    "GroundTruth",
    "LayoutError",
    "OccupancyGrid",
    "PathError",
    "Rect",
    "Scenario",
    "SensorKind",
    "SensorSpec",
    "SimulationError",
    "Visit",
    "fire_sensors",
    "floor_plan_from_dict",
    "generate_schedule",
    "home_spot",
    "load_floor_plan",
    "plan_on_grid",
    "plan_path",
    "point_clear",
    "polyline_length",
    "read_ground_truth",
    "sample_walk",
    "segment_clear",
    "simulate",
    "walk_budget",
    "write_ground_truth",
]
