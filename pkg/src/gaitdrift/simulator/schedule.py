"""Daily activity schedules.

A schedule is a list of visits: walk to a spot, dwell there, walk on. Walk
departures are planned with a fixed per-walk time budget that covers the
slowest supported gait, so planned times never depend on walking speed and
the same seed yields the same schedule for every speed. Idle gaps between
visits are drawn above 62 s so that, together with the walk budget, any
pair of events from different walks is separated by more than a minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .floorplan import ActivitySpot, FloorPlan
from .scenario import Scenario

OUTSIDE = "outside"

# Fraction of the day before which the agent sleeps, and after which the
# final rest begins.
WAKE_FRACTION = (0.24, 0.28)
DAY_END_FRACTION = 0.96

# Idle time appended after each dwell, seconds. The lower bound keeps
# cross-walk event gaps above common transition-duration cutoffs.
IDLE_RANGE = (62.0, 120.0)

MIN_DWELL = 1.0

MIN_VISITS = 20

VISIT_DRAW = (24, 49)
OUTING_DRAW = (1, 3)
OUTSIDE_DWELL_FRACTION = (0.01, 0.03)


@dataclass(frozen=True, slots=True)
class Visit:
    """One planned stop: depart at ``start``, dwell for ``dwell`` seconds
    after arrival. ``spot`` is an activity spot name or ``"outside"``."""

    spot: str
    start: float
    dwell: float


def walk_budget(plan: FloorPlan) -> float:
    """Planning allowance for one walk, generous enough for the slowest
    supported speed on any sane route across the plan."""
    return 4.0 * math.hypot(plan.width, plan.height)


def _pick_spot(
    spots: tuple[ActivitySpot, ...],
    rng: np.random.Generator,
    exclude: str,
    also_exclude: str | None = None,
) -> str:
    options = [s for s in spots if s.name != exclude and s.name != also_exclude]
    if not options:
        options = [s for s in spots if s.name != exclude]
    total = sum(s.weight for s in options)
    r = rng.random() * total
    acc = 0.0
    for s in options:
        acc += s.weight
        if r < acc:
            return s.name
    return options[-1].name


def home_spot(plan: FloorPlan) -> ActivitySpot:
    """Where each day begins and ends (the bed if the plan has one)."""
    for s in plan.spots:
        if s.name == "bed":
            return s
    return plan.spots[0]


def generate_schedule(
    plan: FloorPlan, scenario: Scenario, day: int, rng: np.random.Generator
) -> list[Visit]:
    """Plan one day of visits. Times are absolute seconds.

    The day starts at the home spot after a nightly rest, runs 20 to 60
    visits including at least one outside excursion, and ends back at the
    home spot. Raises ValueError when day_length cannot fit the minimum
    number of visits.
    """
    if not 1 <= day <= scenario.num_days:
        raise ValueError(f"day {day} outside 1..{scenario.num_days}")
    base = (day - 1) * scenario.day_length
    budget = walk_budget(plan)
    wake = base + rng.uniform(*WAKE_FRACTION) * scenario.day_length
    cap = base + DAY_END_FRACTION * scenario.day_length

    n_visits = int(rng.integers(*VISIT_DRAW))
    n_out = int(rng.integers(*OUTING_DRAW))
    out_lo = OUTSIDE_DWELL_FRACTION[0] * scenario.day_length
    out_hi = OUTSIDE_DWELL_FRACTION[1] * scenario.day_length
    worst_per_visit = budget + MIN_DWELL + IDLE_RANGE[1]
    max_fit = int((cap - wake - n_out * out_hi) // worst_per_visit)
    if max_fit < MIN_VISITS:
        raise ValueError(
            f"day_length {scenario.day_length} too short for {MIN_VISITS} visits"
        )
    n_visits = min(n_visits, max_fit)

    home = home_spot(plan).name
    sequence: list[str] = []
    current = home
    for i in range(n_visits - 1):
        avoid_home = home if i == n_visits - 2 else None
        nxt = _pick_spot(plan.spots, rng, exclude=current, also_exclude=avoid_home)
        sequence.append(nxt)
        current = nxt

    # Outings replace interior stops; keep them non-adjacent so the agent
    # never walks door-to-door.
    candidates = np.arange(1, len(sequence) - 1)
    n_out = min(n_out, len(candidates))
    out_idx = sorted(
        int(i) for i in rng.choice(candidates, size=n_out, replace=False)
    )
    kept = []
    for idx in out_idx:
        if kept and idx - kept[-1] == 1:
            continue
        kept.append(idx)
    for idx in kept:
        sequence[idx] = OUTSIDE
    outside_dwells = rng.uniform(out_lo, out_hi, size=len(kept))

    sequence.append(home)
    idles = rng.uniform(*IDLE_RANGE, size=len(sequence))

    spot_by_name = {s.name: s for s in plan.spots}
    raw = np.array(
        [
            rng.lognormal(math.log(spot_by_name[name].dwell_mean), 0.5)
            if name != OUTSIDE
            else 0.0
            for name in sequence[:-1]
        ]
    )
    indoor_mask = raw > 0.0
    indoor_budget = (
        (cap - wake)
        - len(sequence) * budget
        - float(np.sum(idles))
        - float(np.sum(outside_dwells))
    )
    raw_total = float(np.sum(raw[indoor_mask])) if indoor_mask.any() else 0.0
    scale = indoor_budget / raw_total if raw_total > 0 else 0.0

    visits: list[Visit] = []
    start = wake
    out_i = 0
    for k, name in enumerate(sequence):
        if k == len(sequence) - 1:
            dwell = max(MIN_DWELL, cap - (start + budget))
        elif name == OUTSIDE:
            dwell = float(outside_dwells[out_i])
            out_i += 1
        else:
            dwell = max(MIN_DWELL, float(raw[k]) * scale)
        visits.append(Visit(spot=name, start=start, dwell=dwell))
        start = start + budget + dwell + float(idles[k])
    return visits
