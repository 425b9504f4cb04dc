"""Simulation scenario parameters and per-day ground truth labels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import IO

SPEED_RANGE = (0.4, 1.2)

TRUTH_COLUMNS = ("day", "label")


@dataclass(frozen=True, slots=True)
class Scenario:
    """Everything besides the floor plan that defines one simulation run.

    ``onset_day`` is 1-based; days at or after it use ``drifted_speed``.
    Setting ``onset_day = num_days + 1`` yields a stationary run.
    """

    num_days: int
    baseline_speed: float = 1.2
    drifted_speed: float = 1.2
    onset_day: int | None = None
    seed: int = 0
    sample_rate: float = 10.0
    body_radius: float = 0.5
    day_length: float = 86400.0

    def __post_init__(self):
        if self.num_days < 1:
            raise ValueError("num_days must be at least 1")
        if self.onset_day is None:
            object.__setattr__(self, "onset_day", self.num_days + 1)
        lo, hi = SPEED_RANGE
        for label, speed in (
            ("baseline_speed", self.baseline_speed),
            ("drifted_speed", self.drifted_speed),
        ):
            if not lo <= speed <= hi:
                raise ValueError(
                    f"{label}={speed} outside supported range [{lo}, {hi}]"
                )
        if not 1 <= self.onset_day <= self.num_days + 1:
            raise ValueError("onset_day must lie in [1, num_days + 1]")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.body_radius <= 0:
            raise ValueError("body_radius must be positive")
        if self.day_length < 7200.0:
            raise ValueError("day_length must be at least 7200 seconds")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def speed_for_day(self, day: int) -> float:
        return self.drifted_speed if day >= self.onset_day else self.baseline_speed


@dataclass(frozen=True, slots=True)
class GroundTruth:
    """Per-day drift labels: 0 before onset, 1 from onset onwards."""

    num_days: int
    onset_day: int

    def label(self, day: int) -> int:
        if not 1 <= day <= self.num_days:
            raise ValueError(f"day {day} outside 1..{self.num_days}")
        return 1 if day >= self.onset_day else 0

    def labels(self) -> dict[int, int]:
        return {day: self.label(day) for day in range(1, self.num_days + 1)}


def write_ground_truth(truth: GroundTruth, target: str | Path | IO[str]) -> None:
    def emit(fh: IO[str]) -> None:
        fh.write(",".join(TRUTH_COLUMNS) + "\n")
        for day in range(1, truth.num_days + 1):
            fh.write(f"{day},{truth.label(day)}\n")

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(target)


def read_ground_truth(source: str | Path | IO[str]) -> GroundTruth:
    def parse(fh: IO[str]) -> GroundTruth:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRUTH_COLUMNS:
            raise ValueError(f"expected header {','.join(TRUTH_COLUMNS)!r}")
        labels: dict[int, int] = {}
        for row in reader:
            if not row:
                continue
            day, label = int(row[0]), int(row[1])
            if label not in (0, 1):
                raise ValueError(f"label for day {day} must be 0 or 1")
            labels[day] = label
        if not labels:
            raise ValueError("ground truth file has no rows")
        num_days = max(labels)
        if sorted(labels) != list(range(1, num_days + 1)):
            raise ValueError("ground truth days must cover 1..num_days")
        positive = [d for d, v in labels.items() if v == 1]
        onset = min(positive) if positive else num_days + 1
        for day in range(1, num_days + 1):
            if labels[day] != (1 if day >= onset else 0):
                raise ValueError("labels must be 0 up to a single onset, then 1")
        return GroundTruth(num_days=num_days, onset_day=onset)

    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return parse(fh)
    return parse(source)
