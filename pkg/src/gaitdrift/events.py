"""Sensor event data model and raw event log ingestion.

An event log is a flat CSV stream of ``timestamp,sensor_id,status``
records with timestamps in seconds since the log epoch. Both ON and OFF
events are retained; downstream processing treats them uniformly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

SECONDS_PER_DAY = 86400.0

ON = "ON"
OFF = "OFF"
_STATUSES = {ON, OFF}

CSV_COLUMNS = ("timestamp", "sensor_id", "status")


class EventLogError(ValueError):
    """Record-level ingestion failure, carrying the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True, slots=True)
class SensorEvent:
    sensor_id: str
    timestamp: float
    status: str

    def __post_init__(self):
        if not self.sensor_id:
            raise ValueError("sensor_id must be non-empty")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"timestamp must be finite and >= 0, got {self.timestamp}")
        if self.status not in _STATUSES:
            raise ValueError(f"status must be ON or OFF, got {self.status!r}")


@dataclass
class EventLog:
    """Time-sorted sensor events plus the day-partitioning parameters."""

    events: list[SensorEvent] = field(default_factory=list)
    day_length: float = SECONDS_PER_DAY
    epoch: float = 0.0

    def __post_init__(self):
        if self.day_length <= 0:
            raise ValueError("day_length must be positive")
        self.events = sorted(self.events, key=lambda e: e.timestamp)

    def __len__(self) -> int:
        return len(self.events)

    def day_index(self, t: float) -> int:
        return day_index(t, self.day_length, self.epoch)

    def last_day(self) -> int:
        """Day of the final event; 0 for an empty log."""
        if not self.events:
            return 0
        return self.day_index(self.events[-1].timestamp)


def day_index(t: float, day_length: float = SECONDS_PER_DAY, epoch: float = 0.0) -> int:
    """1-based day of instant ``t``; day 1 starts at the epoch."""
    if t < epoch:
        raise ValueError(f"t={t} precedes the log epoch {epoch}")
    return int(math.floor((t - epoch) / day_length)) + 1


def parse_event_record(line: str, line_number: int = 1) -> SensorEvent:
    """Parse one ``timestamp,sensor_id,status`` record.

    Status is case-insensitive and normalized to uppercase ON/OFF.
    """
    fields = next(csv.reader([line]))
    if len(fields) != 3:
        raise EventLogError(line_number, f"expected 3 fields, got {len(fields)}")
    raw_t, sensor_id, raw_status = (f.strip() for f in fields)
    try:
        timestamp = float(raw_t)
    except ValueError:
        raise EventLogError(line_number, f"unparsable timestamp {raw_t!r}") from None
    if not math.isfinite(timestamp) or timestamp < 0:
        raise EventLogError(line_number, f"timestamp out of range: {raw_t}")
    status = raw_status.upper()
    if status not in _STATUSES:
        raise EventLogError(line_number, f"unknown status token {raw_status!r}")
    if not sensor_id:
        raise EventLogError(line_number, "empty sensor_id")
    return SensorEvent(sensor_id, timestamp, status)


def load_event_log(
    source: Union[str, IO[str], IO[bytes]],
    day_length: float = SECONDS_PER_DAY,
    header: bool = False,
) -> EventLog:
    """Read an event log from a path or open stream.

    Records are stably sorted by timestamp, so equal-timestamp events keep
    their input order. The first malformed record aborts ingestion.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_event_log(fh, day_length=day_length, header=header)
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    events = []
    for line_number, line in enumerate(io.StringIO(raw), start=1):
        line = line.strip()
        if not line:
            continue
        if header and line_number == 1:
            continue
        events.append(parse_event_record(line, line_number))
    return EventLog(events=events, day_length=day_length)


def write_event_log(events: Iterable[SensorEvent], target: Union[str, IO[str]]) -> None:
    """Write events as headerless ``timestamp,sensor_id,status`` CSV."""
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            write_event_log(events, fh)
            return
    for e in events:
        target.write(f"{e.timestamp!r},{e.sensor_id},{e.status}\n")
