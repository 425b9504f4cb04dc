"""Scoring and experiment harness.

Scores a drift decision series against per-day ground truth as a daily
binary classification task, and runs seeded parameter sweeps that emit a
flat CSV for external plotting. Metrics use single-division integer
arithmetic (for example f1 = 2tp / (2tp + fp + fn)) so hand-computed
fractions reproduce bit-for-bit.
"""

from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .detector import DetectorConfig, DriftSeries, Weighting, detect
from .simulator import FloorPlan, GroundTruth, Scenario, load_floor_plan, simulate
from .transitions import FilterConfig

SWEEP_COLUMNS = (
    "layout",
    "baseline_speed",
    "drifted_speed",
    "percentile_k",
    "t_min",
    "t_max",
    "min_support",
    "weighting",
    "seed",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "detection_delay",
)

MEAN_SEED = "MEAN"
STD_SEED = "STD"


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True, slots=True)
class EvalResult:
    accuracy: float
    precision: float
    recall: float
    f1: float
    detection_delay: int | None = None

    def __post_init__(self):
        for name in ("accuracy", "precision", "recall", "f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.detection_delay is not None and self.detection_delay < 0:
            raise ValueError("detection_delay must be non-negative")


def metrics_from_confusion(counts: ConfusionCounts, delay: int | None = None) -> EvalResult:
    """Accuracy, precision, recall, f1 with zero denominators scored as 0."""
    total = counts.total
    accuracy = (counts.tp + counts.tn) / total if total else 0.0
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1_den = 2 * counts.tp + counts.fp + counts.fn
    f1 = 2 * counts.tp / f1_den if f1_den else 0.0
    return EvalResult(
        accuracy=accuracy, precision=precision, recall=recall, f1=f1, detection_delay=delay
    )


def confusion(
    series: DriftSeries, truth: GroundTruth, include_warmup: bool = False
) -> ConfusionCounts:
    """Confusion counts over decided days, or over all days with undecided
    days counted as predicted-negative when ``include_warmup`` is set."""
    decided = series.decided_days()
    for day in decided:
        if not 1 <= day <= truth.num_days:
            raise ValueError(f"decided day {day} has no ground-truth label")
    if include_warmup:
        days = range(1, truth.num_days + 1)
    else:
        days = decided
    decisions = {d: series.decision_for(d).decision for d in decided}
    tp = tn = fp = fn = 0
    for day in days:
        predicted = decisions.get(day, 0)
        actual = truth.label(day)
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def detection_delay(series: DriftSeries, truth: GroundTruth) -> int | None:
    """Days from true onset to the first alert at or after onset; None when
    no such alert exists. Pre-onset alerts do not count."""
    for day in series.decided_days():
        if day >= truth.onset_day and series.decision_for(day).decision:
            return day - truth.onset_day
    return None


def score(series: DriftSeries, truth: GroundTruth, include_warmup: bool = False) -> EvalResult:
    counts = confusion(series, truth, include_warmup=include_warmup)
    return metrics_from_confusion(counts, delay=detection_delay(series, truth))


def run_experiment(
    plan: FloorPlan,
    scenario: Scenario,
    filter_cfg: FilterConfig | None = None,
    detector_cfg: DetectorConfig | None = None,
    include_warmup: bool = False,
) -> EvalResult:
    """simulate -> detect -> score, deterministic per seed."""
    log, truth = simulate(plan, scenario)
    series = detect(log, filter_cfg or FilterConfig(), detector_cfg or DetectorConfig())
    return score(series, truth, include_warmup=include_warmup)


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid of experiment settings.

    ``layouts`` holds built-in layout names or YAML paths; ``speed_pairs``
    holds (baseline, drifted) tuples. Every axis must be non-empty.
    """

    layouts: tuple[str, ...] = ("a",)
    speed_pairs: tuple[tuple[float, float], ...] = ((1.2, 0.4),)
    percentile_ks: tuple[float, ...] = (0.0,)
    t_mins: tuple[float, ...] = (1.0,)
    t_maxes: tuple[float, ...] = (60.0,)
    min_supports: tuple[int, ...] = (0,)
    weightings: tuple[Weighting, ...] = (Weighting.UNWEIGHTED,)
    seeds: tuple[int, ...] = (0,)
    num_days: int = 200
    onset_day: int = 100
    window_len: int = 7
    alpha: float = 0.05
    day_length: float = 86400.0

    def __post_init__(self):
        for name in (
            "layouts",
            "speed_pairs",
            "percentile_ks",
            "t_mins",
            "t_maxes",
            "min_supports",
            "weightings",
            "seeds",
        ):
            values = getattr(self, name)
            object.__setattr__(self, name, tuple(values))
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} must be non-empty")

    def cells(self) -> list[dict]:
        """Grid cells in canonical order (sorted keys, then seed)."""
        out = []
        for layout in sorted(self.layouts):
            for baseline, drifted in sorted(self.speed_pairs):
                for k in sorted(self.percentile_ks):
                    for t_min in sorted(self.t_mins):
                        for t_max in sorted(self.t_maxes):
                            for min_support in sorted(self.min_supports):
                                for weighting in sorted(self.weightings, key=lambda w: w.value):
                                    for seed in sorted(self.seeds):
                                        out.append(
                                            {
                                                "layout": layout,
                                                "baseline_speed": baseline,
                                                "drifted_speed": drifted,
                                                "percentile_k": k,
                                                "t_min": t_min,
                                                "t_max": t_max,
                                                "min_support": min_support,
                                                "weighting": weighting,
                                                "seed": seed,
                                            }
                                        )
        return out


def _group_key(cell: dict) -> tuple:
    return (
        cell["layout"],
        cell["baseline_speed"],
        cell["drifted_speed"],
        cell["percentile_k"],
        cell["t_min"],
        cell["t_max"],
        cell["min_support"],
        cell["weighting"].value,
    )


def _run_cell(args: tuple[dict, "SweepSpec"]) -> dict:
    cell, spec = args
    out = dict(cell)
    try:
        plan = load_floor_plan(cell["layout"])
        scenario = Scenario(
            num_days=spec.num_days,
            baseline_speed=cell["baseline_speed"],
            drifted_speed=cell["drifted_speed"],
            onset_day=spec.onset_day,
            seed=cell["seed"],
            day_length=spec.day_length,
        )
        filter_cfg = FilterConfig(
            t_min=cell["t_min"], t_max=cell["t_max"], percentile_k=cell["percentile_k"]
        )
        detector_cfg = DetectorConfig(
            window_len=spec.window_len,
            alpha=spec.alpha,
            min_support=cell["min_support"],
            weighting=cell["weighting"],
        )
        result = run_experiment(plan, scenario, filter_cfg, detector_cfg)
    except Exception as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    out["result"] = result
    return out


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """Run every grid cell x seed; failures are recorded in the row and do
    not stop the sweep. Row order is canonical regardless of ``jobs``."""
    args = [(cell, spec) for cell in spec.cells()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, args))
    else:
        rows = [_run_cell(a) for a in args]
    return rows


def _format_metric(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _aggregate(rows: list[dict], attr: str) -> tuple[float | None, float | None]:
    values = [getattr(r["result"], attr) for r in rows if "result" in r]
    if attr == "detection_delay":
        values = [v for v in values if v is not None]
    if not values:
        return None, None
    mean = math.fsum(values) / len(values)
    std = statistics.stdev(values) if len(values) >= 2 else None
    return mean, std


def write_sweep_csv(rows: list[dict], target: str | Path | IO[str]) -> None:
    """Serialize sweep rows plus per-cell seed aggregates.

    Rows for one grid cell are grouped: each seed's row, then a MEAN row
    and a STD row computed over the cell's successful member rows.
    """

    def emit(fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)

        def cell_prefix(row: dict) -> list[str]:
            return [
                str(row["layout"]),
                repr(float(row["baseline_speed"])),
                repr(float(row["drifted_speed"])),
                repr(float(row["percentile_k"])),
                repr(float(row["t_min"])),
                repr(float(row["t_max"])),
                str(row["min_support"]),
                row["weighting"].value,
            ]

        groups: dict[tuple, list[dict]] = {}
        order: list[tuple] = []
        for row in rows:
            key = _group_key(row)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(row)

        for key in order:
            members = sorted(groups[key], key=lambda r: r["seed"])
            for row in members:
                prefix = cell_prefix(row) + [str(row["seed"])]
                if "result" in row:
                    res = row["result"]
                    delay = "" if res.detection_delay is None else str(res.detection_delay)
                    writer.writerow(
                        prefix
                        + [
                            repr(res.accuracy),
                            repr(res.precision),
                            repr(res.recall),
                            repr(res.f1),
                            delay,
                        ]
                    )
                else:
                    writer.writerow(prefix + ["", "", "", "", row.get("error", "error")])
            for label, idx in ((MEAN_SEED, 0), (STD_SEED, 1)):
                agg = [
                    _format_metric(_aggregate(members, attr)[idx])
                    for attr in ("accuracy", "precision", "recall", "f1", "detection_delay")
                ]
                writer.writerow(cell_prefix(members[0]) + [label] + agg)

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(target)
