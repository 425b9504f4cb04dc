"""Gait-speed drift detection from ambient binary sensor streams.

The package covers the full loop: simulate a sensorized home, extract
transition durations from the event log, test recent days against a
baseline window with an exact Mann-Whitney U test, and score the daily
drift decisions against ground truth.
"""

from .detector import (
    DayDecision,
    DetectorConfig,
    DriftSeries,
    PairVerdict,
    Weighting,
    detect,
    detect_from_stats,
)
from .evaluation import (
    ConfusionCounts,
    EvalResult,
    SweepSpec,
    run_experiment,
    run_sweep,
    score,
    write_sweep_csv,
)
from .events import EventLog, EventLogError, SensorEvent, load_event_log, write_event_log
from .mwu import Alternative, Method, MwuResult, exact_p, mann_whitney_u
from .simulator import (
    FloorPlan,
    GroundTruth,
    Scenario,
    load_floor_plan,
    simulate,
)
from .transitions import (
    DailyPairStat,
    FilterConfig,
    PairKey,
    Transition,
    aggregate_daily,
    extract_transitions,
    filter_transitions,
)

__version__ = "0.1.0"

__all__ = [
    "Alternative",
    "ConfusionCounts",
    "DailyPairStat",
    "DayDecision",
    "DetectorConfig",
    "DriftSeries",
    "EvalResult",
    "EventLog",
    "EventLogError",
    "FilterConfig",
    "FloorPlan",
    "GroundTruth",
    "Method",
    "MwuResult",
    "PairKey",
    "PairVerdict",
    "Scenario",
    "SensorEvent",
    "SweepSpec",
    "Transition",
    "Weighting",
    "aggregate_daily",
    "detect",
    "detect_from_stats",
    "exact_p",
    "extract_transitions",
    "filter_transitions",
    "load_event_log",
    "load_floor_plan",
    "mann_whitney_u",
    "run_experiment",
    "run_sweep",
    "score",
    "simulate",
    "write_event_log",
    "write_sweep_csv",
    "__version__",
]
