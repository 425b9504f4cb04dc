"""Windowed per-pair drift tests and the daily ensemble decision.

For each day from 2*window_len onward, every sensor pair's recent daily
percentile values (query window) are tested against its values from the
fixed initial reference window with a Mann-Whitney U test. Per-pair flags
are then averaged, optionally weighted by the pair's support on the
decision day, and thresholded into a single daily drift verdict.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import IO, Optional, Union

from .events import EventLog
from .mwu import Alternative, mann_whitney_u
from .transitions import (
    DailyStats,
    FilterConfig,
    PairKey,
    aggregate_daily,
    extract_transitions,
    filter_transitions,
)

DECISIONS_COLUMNS = ("day", "score", "decision")
DIAGNOSTICS_COLUMNS = ("day", "pair_a", "pair_b", "p_value", "flag", "weight", "tested")

# A window side with fewer than this many values cannot reach significance
# at conventional alpha; such pairs are reported untested.
MIN_TESTABLE = 2


class Weighting(enum.Enum):
    UNWEIGHTED = "unweighted"
    SUPPORT_WEIGHTED = "support-weighted"


@dataclass(frozen=True)
class DetectorConfig:
    window_len: int = 7
    alpha: float = 0.05
    min_support: int = 0
    weighting: Weighting = Weighting.UNWEIGHTED
    decision_threshold: float = 0.5
    alternative: Alternative = Alternative.TWO_SIDED

    def __post_init__(self):
        if self.window_len < 2:
            raise ValueError("window_len must be >= 2")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.min_support < 0:
            raise ValueError("min_support must be >= 0")
        if not 0 < self.decision_threshold <= 1:
            raise ValueError("decision_threshold must be in (0, 1]")


@dataclass(frozen=True, slots=True)
class PairVerdict:
    pair: PairKey
    day: int
    flag: int
    p_value: Optional[float]
    weight: float
    tested: bool


@dataclass(frozen=True, slots=True)
class DayDecision:
    day: int
    score: float
    decision: int
    verdicts: tuple[PairVerdict, ...] = ()


@dataclass
class DriftSeries:
    """Per-day ensemble decisions plus per-pair diagnostics."""

    days: list[DayDecision] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.days)

    def decided_days(self) -> list[int]:
        return [d.day for d in self.days]

    def decision_for(self, day: int) -> Optional[DayDecision]:
        for d in self.days:
            if d.day == day:
                return d
        return None


def build_windows(
    stats: DailyStats, pair: PairKey, day: int, cfg: DetectorConfig
) -> tuple[list[float], list[float]]:
    """Query (day-window_len+1 .. day) and reference (1 .. window_len) values.

    A day contributes its percentile value only when the pair's support on
    that day exceeds min_support; other days are simply absent.
    """

    def window(lo: int, hi: int) -> list[float]:
        out = []
        for d in range(lo, hi + 1):
            stat = stats.get((pair, d))
            if stat is not None and stat.support > cfg.min_support:
                out.append(stat.percentile_value)
        return out

    query = window(day - cfg.window_len + 1, day)
    reference = window(1, cfg.window_len)
    return query, reference


def pair_verdict(
    query: list[float],
    reference: list[float],
    day: int,
    pair: PairKey,
    cfg: DetectorConfig,
    weight: float = 0.0,
) -> PairVerdict:
    """Test one pair's query window against its reference window.

    Insufficient data on either side yields an untested, unflagged verdict.
    """
    if min(len(query), len(reference)) < MIN_TESTABLE:
        return PairVerdict(pair, day, flag=0, p_value=None, weight=weight, tested=False)
    res = mann_whitney_u(query, reference, cfg.alternative)
    flag = 1 if res.p_value < cfg.alpha else 0
    return PairVerdict(pair, day, flag=flag, p_value=res.p_value, weight=weight, tested=True)


def ensemble_decision(
    verdicts: list[PairVerdict],
    last_day_supports: dict[PairKey, int],
    cfg: DetectorConfig,
) -> tuple[float, int]:
    """Aggregate per-pair flags into the day's (score, decision).

    Support weighting uses each pair's support on the decision day; pairs
    absent that day get weight zero. The unweighted variant averages flags
    over tested pairs. No usable pair defaults to no-drift.
    """
    if cfg.weighting is Weighting.SUPPORT_WEIGHTED:
        total = sum(last_day_supports.get(v.pair, 0) for v in verdicts)
        if total == 0:
            return 0.0, 0
        flagged = sum(
            last_day_supports.get(v.pair, 0) for v in verdicts if v.flag
        )
        score = flagged / total
    else:
        tested = [v for v in verdicts if v.tested]
        if not tested:
            return 0.0, 0
        score = sum(v.flag for v in tested) / len(tested)
    return score, 1 if score >= cfg.decision_threshold else 0


def _verdict_weights(
    verdicts: list[PairVerdict],
    last_day_supports: dict[PairKey, int],
    cfg: DetectorConfig,
) -> list[PairVerdict]:
    """Fill in the diagnostic per-pair weights used by the ensemble."""
    if cfg.weighting is Weighting.SUPPORT_WEIGHTED:
        total = sum(last_day_supports.get(v.pair, 0) for v in verdicts)
        if total == 0:
            return verdicts
        return [
            PairVerdict(
                v.pair, v.day, v.flag, v.p_value,
                last_day_supports.get(v.pair, 0) / total, v.tested,
            )
            for v in verdicts
        ]
    n_tested = sum(1 for v in verdicts if v.tested)
    if n_tested == 0:
        return verdicts
    return [
        PairVerdict(
            v.pair, v.day, v.flag, v.p_value,
            1.0 / n_tested if v.tested else 0.0, v.tested,
        )
        for v in verdicts
    ]


def decide_day(stats: DailyStats, day: int, cfg: DetectorConfig) -> DayDecision:
    """Full per-day evaluation over all pairs observed in either window."""
    window_days = set(range(1, cfg.window_len + 1)) | set(
        range(day - cfg.window_len + 1, day + 1)
    )
    pairs = sorted({pair for (pair, d) in stats if d in window_days})
    last_day_supports = {
        pair: stats[(pair, day)].support for pair in pairs if (pair, day) in stats
    }
    verdicts = []
    for pair in pairs:
        query, reference = build_windows(stats, pair, day, cfg)
        verdicts.append(pair_verdict(query, reference, day, pair, cfg))
    score, decision = ensemble_decision(verdicts, last_day_supports, cfg)
    verdicts = _verdict_weights(verdicts, last_day_supports, cfg)
    return DayDecision(day=day, score=score, decision=decision, verdicts=tuple(verdicts))


def detect_from_stats(
    stats: DailyStats, last_day: int, cfg: DetectorConfig
) -> DriftSeries:
    """Decisions for every day from 2*window_len through last_day."""
    first = 2 * cfg.window_len
    return DriftSeries(
        days=[decide_day(stats, day, cfg) for day in range(first, last_day + 1)]
    )


def detect(
    log: EventLog,
    filter_cfg: FilterConfig = FilterConfig(),
    cfg: DetectorConfig = DetectorConfig(),
) -> DriftSeries:
    """End-to-end pipeline: transitions -> daily stats -> daily decisions."""
    filtered = filter_transitions(extract_transitions(log), filter_cfg)
    stats = aggregate_daily(filtered, filter_cfg)
    return detect_from_stats(stats, log.last_day(), cfg)


def write_decisions(series: DriftSeries, target: Union[str, IO[str]]) -> None:
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            write_decisions(series, fh)
            return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(DECISIONS_COLUMNS)
    for d in series.days:
        writer.writerow([d.day, repr(d.score), d.decision])


def write_diagnostics(series: DriftSeries, target: Union[str, IO[str]]) -> None:
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            write_diagnostics(series, fh)
            return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(DIAGNOSTICS_COLUMNS)
    for d in series.days:
        for v in d.verdicts:
            writer.writerow(
                [
                    d.day,
                    v.pair.a,
                    v.pair.b,
                    "" if v.p_value is None else repr(v.p_value),
                    v.flag,
                    repr(v.weight),
                    "true" if v.tested else "false",
                ]
            )


def read_decisions(source: Union[str, IO[str]]) -> DriftSeries:
    """Load a ``day,score,decision`` CSV back into a DriftSeries."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_decisions(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(header) != DECISIONS_COLUMNS:
        raise ValueError(f"expected header {','.join(DECISIONS_COLUMNS)!r}")
    days = [
        DayDecision(day=int(row[0]), score=float(row[1]), decision=int(row[2]))
        for row in reader
        if row
    ]
    return DriftSeries(days=days)
