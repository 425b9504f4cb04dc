"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator


class EventModel(BaseModel):
    timestamp: float = Field(ge=0)
    sensor_id: str = Field(min_length=1)
    status: Literal["ON", "OFF"]


class TruthDayModel(BaseModel):
    day: int = Field(ge=1)
    label: Literal[0, 1]


class FilterParams(BaseModel):
    t_min: float = 1.0
    t_max: float = 60.0
    percentile_k: float = 0.0


class DetectorParams(BaseModel):
    window_len: int = 7
    alpha: float = 0.05
    min_support: int = 0
    weighting: Literal["unweighted", "support-weighted"] = "unweighted"
    decision_threshold: float = 0.5
    alternative: Literal["two-sided", "greater", "less"] = "two-sided"


class ScenarioParams(BaseModel):
    num_days: int = Field(ge=1)
    baseline_speed: float = 1.2
    drifted_speed: float = 1.2
    onset_day: int | None = None
    seed: int = 0
    sample_rate: float = 10.0
    body_radius: float = 0.5
    day_length: float = 86400.0


class SimulateRequest(BaseModel):
    layout: str = "a"
    plan: dict[str, Any] | None = None
    scenario: ScenarioParams

class SimulateResponse(BaseModel):
    events: list[EventModel]
    truth: list[TruthDayModel]
    num_events: int


class DetectRequest(BaseModel):
    events: list[EventModel] | None = None
    events_csv: str | None = None
    day_length: float = 86400.0
    filter: FilterParams = FilterParams()
    detector: DetectorParams = DetectorParams()

    @model_validator(mode="after")
    def _one_event_source(self):
        if (self.events is None) == (self.events_csv is None):
            raise ValueError("provide exactly one of events or events_csv")
        return self


class DecisionModel(BaseModel):
    day: int
    score: float
    decision: Literal[0, 1]


class DetectResponse(BaseModel):
    decisions: list[DecisionModel]


class EvaluateRequest(BaseModel):
    decisions: list[DecisionModel]
    truth: list[TruthDayModel]
    include_warmup: bool = False


class EvaluateResponse(BaseModel):
    accuracy: float
    precision: float
    recall: float
    f1: float
    detection_delay: int | None


class SweepRequest(BaseModel):
    layouts: list[str] = ["a"]
    speed_pairs: list[tuple[float, float]] = [(1.2, 0.4)]
    percentile_ks: list[float] = [0.0]
    t_mins: list[float] = [1.0]
    t_maxes: list[float] = [60.0]
    min_supports: list[int] = [0]
    weightings: list[Literal["unweighted", "support-weighted"]] = ["unweighted"]
    seeds: list[int] = [0]
    num_days: int = 200
    onset_day: int = 100
    window_len: int = 7
    alpha: float = 0.05
    day_length: float = Field(default=86400.0, ge=7200.0)
    jobs: int = Field(default=1, ge=1, le=16)


class SweepResponse(BaseModel):
    csv: str
    num_rows: int


class HealthResponse(BaseModel):
    status: Literal["ok"]


class VersionResponse(BaseModel):
    version: str


class LayoutsResponse(BaseModel):
    layouts: list[str]
