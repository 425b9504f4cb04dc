"""Floor plan model: room geometry, sensor placements, activity spots.

Plans are plain data loaded from YAML. Validation enforces the geometric
invariants the rest of the simulator relies on (everything inside bounds,
sensors and spots outside furniture, exactly one door on the boundary).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Any

import yaml

from .geometry import Rect

BUILTIN_LAYOUTS = ("a", "b", "c", "d")

DEFAULT_PIR_RADIUS = 1.0
DEFAULT_SPOT_JITTER = 0.3


class LayoutError(ValueError):
    """Raised for structurally invalid floor plan definitions."""


class SensorKind(enum.Enum):
    PIR = "pir"
    PRESSURE = "pressure"
    DOOR = "door"


@dataclass(frozen=True, slots=True)
class SensorSpec:
    """One ambient sensor.

    PIR and door sensors are points; pressure mats are rectangles. PIR
    sensors carry the radius of their detection field.
    """

    sensor_id: str
    kind: SensorKind
    x: float = 0.0
    y: float = 0.0
    radius: float = DEFAULT_PIR_RADIUS
    rect: Rect | None = None

    def __post_init__(self):
        if not self.sensor_id:
            raise LayoutError("sensor_id must be non-empty")
        if "," in self.sensor_id or "\n" in self.sensor_id:
            raise LayoutError(f"sensor_id {self.sensor_id!r} contains reserved characters")
        if self.kind is SensorKind.PRESSURE:
            if self.rect is None:
                raise LayoutError(f"pressure sensor {self.sensor_id} needs a rect")
        elif self.kind is SensorKind.PIR and self.radius <= 0:
            raise LayoutError(f"PIR sensor {self.sensor_id} needs a positive radius")


@dataclass(frozen=True, slots=True)
class ActivitySpot:
    """A location the agent visits, with a typical dwell duration.

    ``weight`` biases how often the spot is chosen; ``jitter`` is the radius
    of the disc around the nominal position where each visit actually ends.
    """

    name: str
    x: float
    y: float
    dwell_mean: float = 300.0
    weight: float = 1.0
    jitter: float = DEFAULT_SPOT_JITTER

    def __post_init__(self):
        if not self.name:
            raise LayoutError("spot name must be non-empty")
        if self.dwell_mean <= 0 or self.weight <= 0 or self.jitter < 0:
            raise LayoutError(f"invalid spot parameters for {self.name!r}")


@dataclass(frozen=True)
class FloorPlan:
    name: str
    width: float
    height: float
    obstacles: tuple[Rect, ...] = ()
    sensors: tuple[SensorSpec, ...] = ()
    spots: tuple[ActivitySpot, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "spots", tuple(self.spots))
        self._validate()

    def _validate(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise LayoutError("floor plan dimensions must be positive")
        if len(self.sensors) < 2:
            raise LayoutError("floor plan needs at least two sensors")
        if len(self.spots) < 2:
            raise LayoutError("floor plan needs at least two activity spots")
        ids = [s.sensor_id for s in self.sensors]
        if len(set(ids)) != len(ids):
            raise LayoutError("duplicate sensor ids")
        names = [s.name for s in self.spots]
        if len(set(names)) != len(names):
            raise LayoutError("duplicate spot names")
        if "outside" in names:
            raise LayoutError("'outside' is a reserved spot name")
        for rect in self.obstacles:
            if rect.x0 < 0 or rect.y0 < 0 or rect.x1 > self.width or rect.y1 > self.height:
                raise LayoutError(f"obstacle {rect} extends outside the room")
        doors = [s for s in self.sensors if s.kind is SensorKind.DOOR]
        if len(doors) != 1:
            raise LayoutError("floor plan needs exactly one door sensor")
        door = doors[0]
        if not self._on_boundary(door.x, door.y):
            raise LayoutError("door sensor must sit on the room boundary")
        for sensor in self.sensors:
            if sensor.kind is SensorKind.PRESSURE:
                r = sensor.rect
                if r.x0 < 0 or r.y0 < 0 or r.x1 > self.width or r.y1 > self.height:
                    raise LayoutError(f"mat {sensor.sensor_id} extends outside the room")
                for obs in self.obstacles:
                    if not (
                        r.x1 <= obs.x0 or obs.x1 <= r.x0 or r.y1 <= obs.y0 or obs.y1 <= r.y0
                    ):
                        raise LayoutError(
                            f"mat {sensor.sensor_id} overlaps an obstacle"
                        )
            else:
                self._check_point_free(sensor.x, sensor.y, f"sensor {sensor.sensor_id}")
        for spot in self.spots:
            self._check_point_free(spot.x, spot.y, f"spot {spot.name}")

    def _on_boundary(self, x: float, y: float, tol: float = 1e-9) -> bool:
        on_x = abs(x) <= tol or abs(x - self.width) <= tol
        on_y = abs(y) <= tol or abs(y - self.height) <= tol
        in_x = -tol <= x <= self.width + tol
        in_y = -tol <= y <= self.height + tol
        return (on_x and in_y) or (on_y and in_x)

    def _check_point_free(self, x: float, y: float, label: str) -> None:
        if not (0 <= x <= self.width and 0 <= y <= self.height):
            raise LayoutError(f"{label} lies outside the room")
        for rect in self.obstacles:
            if rect.x0 < x < rect.x1 and rect.y0 < y < rect.y1:
                raise LayoutError(f"{label} lies inside an obstacle")

    @property
    def door(self) -> SensorSpec:
        return next(s for s in self.sensors if s.kind is SensorKind.DOOR)

    def door_inner_point(self, inset: float) -> tuple[float, float]:
        """Point just inside the room in front of the door."""
        d = self.door
        x, y = d.x, d.y
        if abs(x) <= 1e-9:
            x = inset
        elif abs(x - self.width) <= 1e-9:
            x = self.width - inset
        if abs(y) <= 1e-9:
            y = inset
        elif abs(y - self.height) <= 1e-9:
            y = self.height - inset
        return (min(max(x, inset), self.width - inset), min(max(y, inset), self.height - inset))

    def spot(self, name: str) -> ActivitySpot:
        for s in self.spots:
            if s.name == name:
                return s
        raise KeyError(name)


def _as_rect(value: Any) -> Rect:
    if isinstance(value, dict):
        return Rect(float(value["x0"]), float(value["y0"]), float(value["x1"]), float(value["y1"]))
    x0, y0, x1, y1 = value
    return Rect(float(x0), float(y0), float(x1), float(y1))


def floor_plan_from_dict(data: dict[str, Any]) -> FloorPlan:
    try:
        sensors = []
        for item in data.get("sensors", []):
            kind = SensorKind(str(item["kind"]).lower())
            rect = _as_rect(item["rect"]) if "rect" in item else None
            if "position" in item:
                x, y = (float(v) for v in item["position"])
            elif rect is not None:
                x, y = (rect.x0 + rect.x1) / 2.0, (rect.y0 + rect.y1) / 2.0
            else:
                raise LayoutError(f"sensor {item.get('id')!r} needs a position or rect")
            sensors.append(
                SensorSpec(
                    sensor_id=str(item["id"]),
                    kind=kind,
                    x=x,
                    y=y,
                    radius=float(item.get("radius", DEFAULT_PIR_RADIUS)),
                    rect=rect,
                )
            )
        spots = []
        for item in data.get("spots", []):
            x, y = (float(v) for v in item["position"])
            spots.append(
                ActivitySpot(
                    name=str(item["name"]),
                    x=x,
                    y=y,
                    dwell_mean=float(item.get("dwell_mean", 300.0)),
                    weight=float(item.get("weight", 1.0)),
                    jitter=float(item.get("jitter", DEFAULT_SPOT_JITTER)),
                )
            )
        return FloorPlan(
            name=str(data.get("name", "unnamed")),
            width=float(data["width"]),
            height=float(data["height"]),
            obstacles=tuple(_as_rect(o) for o in data.get("obstacles", [])),
            sensors=tuple(sensors),
            spots=tuple(spots),
        )
    except (KeyError, TypeError) as exc:
        raise LayoutError(f"malformed floor plan definition: {exc}") from exc


def load_floor_plan(source: str | Path | IO[str]) -> FloorPlan:
    """Load a plan from a YAML file path, a built-in layout name (``a``..``d``),
    or an open text stream."""
    if isinstance(source, (str, Path)):
        name = str(source).lower()
        if name in BUILTIN_LAYOUTS:
            ref = resources.files("gaitdrift.simulator") / "layouts" / f"layout_{name}.yaml"
            data = yaml.safe_load(ref.read_text(encoding="utf-8"))
        elif isinstance(source, str) and "/" not in source and not Path(source).exists():
            raise LayoutError(
                f"unknown layout {source!r}: pass a YAML path or one of "
                + ", ".join(BUILTIN_LAYOUTS)
            )
        else:
            with open(source, "r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
    else:
        data = yaml.safe_load(source)
    if not isinstance(data, dict):
        raise LayoutError("floor plan YAML must contain a mapping")
    return floor_plan_from_dict(data)
