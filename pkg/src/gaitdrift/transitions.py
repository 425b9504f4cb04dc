"""Sensor-to-sensor transitions and daily per-pair percentile statistics.

The pipeline turns a time-sorted event log into duration observations
between consecutive events of *different* sensors, filters them to a
plausible walking-duration band, and aggregates both directions of each
sensor pair into order-invariant daily percentile/support statistics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Optional, Sequence, Union

from .events import EventLog

DAILY_STATS_COLUMNS = ("pair_a", "pair_b", "day", "percentile_value", "support")


@dataclass(frozen=True, slots=True)
class Transition:
    """Consecutive-event hop between two distinct sensors."""

    from_sensor: str
    to_sensor: str
    duration: float
    day: int

    def __post_init__(self):
        if self.from_sensor == self.to_sensor:
            raise ValueError("transition endpoints must differ")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


class PairKey(NamedTuple):
    """Canonical unordered sensor pair (lexicographically smaller id first)."""

    a: str
    b: str

    @classmethod
    def of(cls, s1: str, s2: str) -> "PairKey":
        return cls(s1, s2) if s1 <= s2 else cls(s2, s1)


@dataclass(frozen=True, slots=True)
class DailyPairStat:
    pair: PairKey
    day: int
    percentile_value: Optional[float]
    support: int

    def __post_init__(self):
        if (self.support == 0) != (self.percentile_value is None):
            raise ValueError("percentile_value must be present iff support > 0")


@dataclass(frozen=True)
class FilterConfig:
    """Duration band and percentile used for the daily aggregation."""

    t_min: float = 1.0
    t_max: float = 60.0
    percentile_k: float = 0.0

    def __post_init__(self):
        if not 0 <= self.t_min < self.t_max:
            raise ValueError(f"need 0 <= t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if not 0 <= self.percentile_k <= 100:
            raise ValueError(f"percentile_k must be in [0, 100], got {self.percentile_k}")


DailyStats = dict[tuple[PairKey, int], DailyPairStat]


def extract_transitions(log: EventLog) -> list[Transition]:
    """One transition per adjacent event pair with differing sensor ids.

    Same-sensor adjacencies emit nothing but keep the chain alive: the
    repeated event stays the predecessor for the next comparison.
    """
    out = []
    for prev, cur in zip(log.events, log.events[1:]):
        if prev.sensor_id == cur.sensor_id:
            continue
        out.append(
            Transition(
                from_sensor=prev.sensor_id,
                to_sensor=cur.sensor_id,
                duration=cur.timestamp - prev.timestamp,
                day=log.day_index(cur.timestamp),
            )
        )
    return out


def filter_transitions(
    ts: Iterable[Transition], cfg: FilterConfig
) -> list[Transition]:
    """Keep transitions with t_min <= duration <= t_max (both inclusive)."""
    return [t for t in ts if cfg.t_min <= t.duration <= cfg.t_max]


def percentile(values: Sequence[float], k: float) -> float:
    """Linear-interpolation (inclusive) percentile of a non-empty multiset.

    k = 0 gives the minimum and k = 100 the maximum.
    """
    if not values:
        raise ValueError("percentile of an empty multiset is undefined")
    if not 0 <= k <= 100:
        raise ValueError(f"k must be in [0, 100], got {k}")
    v = sorted(values)
    rank = k / 100.0 * (len(v) - 1)
    lo = math.floor(rank)
    frac = rank - lo
    if frac == 0.0:
        return v[lo]
    return v[lo] + frac * (v[lo + 1] - v[lo])


def aggregate_daily(ts: Iterable[Transition], cfg: FilterConfig) -> DailyStats:
    """Pool both directions of each pair per day; compute percentile and support."""
    pools: dict[tuple[PairKey, int], list[float]] = {}
    for t in ts:
        key = (PairKey.of(t.from_sensor, t.to_sensor), t.day)
        pools.setdefault(key, []).append(t.duration)
    return {
        (pair, day): DailyPairStat(
            pair=pair,
            day=day,
            percentile_value=percentile(durations, cfg.percentile_k),
            support=len(durations),
        )
        for (pair, day), durations in pools.items()
    }


def write_daily_stats(stats: DailyStats, target: Union[str, IO[str]]) -> None:
    """Export observed (pair, day) stats as CSV, canonically ordered."""
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            write_daily_stats(stats, fh)
            return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(DAILY_STATS_COLUMNS)
    for (pair, day) in sorted(stats):
        s = stats[(pair, day)]
        value = "" if s.percentile_value is None else repr(s.percentile_value)
        writer.writerow([pair.a, pair.b, day, value, s.support])
