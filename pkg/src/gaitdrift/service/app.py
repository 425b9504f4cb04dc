"""HTTP service exposing the simulate / detect / evaluate / sweep loop.

The endpoints wrap the library functions one-to-one so any HTTP client
can drive the same workflows as the command line. All state lives in the
request; the service itself is stateless.
"""

from __future__ import annotations

import io

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..detector import DayDecision, DetectorConfig, DriftSeries, Weighting, detect
from ..events import EventLog, SensorEvent, load_event_log
from ..evaluation import SweepSpec, run_sweep, score, write_sweep_csv
from ..mwu import Alternative
from ..simulator import (
    BUILTIN_LAYOUTS,
    GroundTruth,
    LayoutError,
    Scenario,
    SimulationError,
    floor_plan_from_dict,
    load_floor_plan,
    simulate,
)
from ..transitions import FilterConfig
from .schemas import (
    DecisionModel,
    DetectorParams,
    DetectRequest,
    DetectResponse,
    EvaluateRequest,
    EvaluateResponse,
    EventModel,
    FilterParams,
    HealthResponse,
    LayoutsResponse,
    ScenarioParams,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
    TruthDayModel,
    VersionResponse,
)


def _filter_config(params: FilterParams) -> FilterConfig:
    return FilterConfig(
        t_min=params.t_min, t_max=params.t_max, percentile_k=params.percentile_k
    )


def _detector_config(params: DetectorParams) -> DetectorConfig:
    return DetectorConfig(
        window_len=params.window_len,
        alpha=params.alpha,
        min_support=params.min_support,
        weighting=Weighting(params.weighting),
        decision_threshold=params.decision_threshold,
        alternative=Alternative(params.alternative),
    )


def _scenario(params: ScenarioParams) -> Scenario:
    return Scenario(
        num_days=params.num_days,
        baseline_speed=params.baseline_speed,
        drifted_speed=params.drifted_speed,
        onset_day=params.onset_day,
        seed=params.seed,
        sample_rate=params.sample_rate,
        body_radius=params.body_radius,
        day_length=params.day_length,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="gaitdrift", version=__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok")

    @app.get("/version", response_model=VersionResponse)
    def version() -> VersionResponse:
        return VersionResponse(version=__version__)

    @app.get("/layouts", response_model=LayoutsResponse)
    def layouts() -> LayoutsResponse:
        return LayoutsResponse(layouts=list(BUILTIN_LAYOUTS))

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_endpoint(request: SimulateRequest) -> SimulateResponse:
        try:
            if request.plan is not None:
                plan = floor_plan_from_dict(request.plan)
            else:
                plan = load_floor_plan(request.layout.lower())
            log, truth = simulate(plan, _scenario(request.scenario))
        except (LayoutError, SimulationError, ValueError, FileNotFoundError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        events = [
            EventModel(timestamp=e.timestamp, sensor_id=e.sensor_id, status=e.status)
            for e in log.events
        ]
        truth_rows = [
            TruthDayModel(day=day, label=truth.label(day))
            for day in range(1, truth.num_days + 1)
        ]
        return SimulateResponse(events=events, truth=truth_rows, num_events=len(events))

    @app.post("/detect", response_model=DetectResponse)
    def detect_endpoint(request: DetectRequest) -> DetectResponse:
        try:
            if request.events_csv is not None:
                log = load_event_log(
                    io.StringIO(request.events_csv), day_length=request.day_length
                )
            else:
                log = EventLog(
                    events=[
                        SensorEvent(
                            sensor_id=e.sensor_id, timestamp=e.timestamp, status=e.status
                        )
                        for e in request.events
                    ],
                    day_length=request.day_length,
                )
            series = detect(
                log, _filter_config(request.filter), _detector_config(request.detector)
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return DetectResponse(
            decisions=[
                DecisionModel(day=d.day, score=d.score, decision=d.decision)
                for d in series.days
            ]
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate_endpoint(request: EvaluateRequest) -> EvaluateResponse:
        try:
            labels = {row.day: row.label for row in request.truth}
            if not labels:
                raise ValueError("truth must be non-empty")
            num_days = max(labels)
            if sorted(labels) != list(range(1, num_days + 1)):
                raise ValueError("truth days must cover 1..num_days")
            positive = [d for d, v in labels.items() if v == 1]
            onset = min(positive) if positive else num_days + 1
            if any(labels[d] != (1 if d >= onset else 0) for d in labels):
                raise ValueError("labels must be 0 up to a single onset, then 1")
            truth = GroundTruth(num_days=num_days, onset_day=onset)
            series = DriftSeries(
                days=[
                    DayDecision(day=d.day, score=d.score, decision=d.decision)
                    for d in sorted(request.decisions, key=lambda r: r.day)
                ]
            )
            result = score(series, truth, include_warmup=request.include_warmup)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return EvaluateResponse(
            accuracy=result.accuracy,
            precision=result.precision,
            recall=result.recall,
            f1=result.f1,
            detection_delay=result.detection_delay,
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(request: SweepRequest) -> SweepResponse:
        try:
            spec = SweepSpec(
                layouts=tuple(request.layouts),
                speed_pairs=tuple((b, d) for b, d in request.speed_pairs),
                percentile_ks=tuple(request.percentile_ks),
                t_mins=tuple(request.t_mins),
                t_maxes=tuple(request.t_maxes),
                min_supports=tuple(request.min_supports),
                weightings=tuple(Weighting(w) for w in request.weightings),
                seeds=tuple(request.seeds),
                num_days=request.num_days,
                onset_day=request.onset_day,
                window_len=request.window_len,
                alpha=request.alpha,
                day_length=request.day_length,
            )
            rows = run_sweep(spec, jobs=request.jobs)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        return SweepResponse(csv=buf.getvalue(), num_rows=len(rows))

    return app


app = create_app()
