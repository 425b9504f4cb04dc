"""Acceptance gate: one test per release criterion, run with ``pytest -v``.

Each test prints a single ``CRITERION n PASS`` line with the measured
numbers once its assertions hold, so the verbose test listing doubles as
the acceptance report.
"""

import math
import time
from itertools import product

import numpy as np
import pytest

from gaitdrift.cli import main
from gaitdrift.detector import DetectorConfig, detect, detect_from_stats
from gaitdrift.evaluation import ConfusionCounts, detection_delay, metrics_from_confusion, score
from gaitdrift.mwu import Alternative, Method, mann_whitney_u
from gaitdrift.simulator import GroundTruth, Scenario, SensorKind, load_floor_plan, simulate
from gaitdrift.transitions import (
    DailyPairStat,
    FilterConfig,
    PairKey,
    Transition,
    aggregate_daily,
    extract_transitions,
    filter_transitions,
    percentile,
)

from .oracles import enumerate_u_counts, u_by_pair_counting
from .test_evaluation import series_of

SEEDS = range(10)
PROTOCOL_DAYS = 200
PROTOCOL_ONSET = 100


def report(criterion: int, detail: str) -> None:
    print(f"CRITERION {criterion} PASS: {detail}")


@pytest.fixture(scope="module")
def protocol_runs():
    """Every 200-day drift experiment the scenario criteria share.

    Returns (results, timings): results maps (layout, drifted_speed, t_min)
    to the ten per-seed EvalResults; timings maps (layout, drifted_speed)
    to the wall time of its ten simulate+detect runs.
    """
    results: dict[tuple, list] = {}
    timings: dict[tuple, float] = {}
    for layout in ("a", "b", "c", "d"):
        plan = load_floor_plan(layout)
        for drifted in (0.4, 1.1):
            t_mins = (1.0, 0.0) if layout == "d" and drifted == 0.4 else (1.0,)
            per_t: dict[float, list] = {t: [] for t in t_mins}
            started = time.monotonic()
            for seed in SEEDS:
                scenario = Scenario(
                    num_days=PROTOCOL_DAYS,
                    baseline_speed=1.2,
                    drifted_speed=drifted,
                    onset_day=PROTOCOL_ONSET,
                    seed=seed,
                )
                log, truth = simulate(plan, scenario)
                for t_min in t_mins:
                    series = detect(log, FilterConfig(t_min=t_min), DetectorConfig())
                    per_t[t_min].append(score(series, truth))
            timings[(layout, drifted)] = time.monotonic() - started
            for t_min, scored in per_t.items():
                results[(layout, drifted, t_min)] = scored
    return results, timings


def mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def test_criterion_01_rank_test_matches_enumeration():
    rng = np.random.default_rng(20260814)
    started = time.monotonic()
    worst = 0.0
    checked = 0
    for n1, n2 in product(range(1, 8), repeat=2):
        counts = enumerate_u_counts(n1, n2)
        total = math.comb(n1 + n2, n1)
        for _ in range(200):
            pooled = rng.normal(size=n1 + n2)
            while len(set(pooled)) < n1 + n2:
                pooled = rng.normal(size=n1 + n2)
            a, b = list(pooled[:n1]), list(pooled[n1:])
            u = u_by_pair_counting(a, b)
            lower = sum(c for v, c in counts.items() if v <= u) / total
            upper = sum(c for v, c in counts.items() if v >= u) / total
            expected = {
                Alternative.LESS: lower,
                Alternative.GREATER: upper,
                Alternative.TWO_SIDED: min(1.0, 2.0 * min(lower, upper)),
            }
            for alternative, want in expected.items():
                got = mann_whitney_u(a, b, alternative)
                assert got.method is Method.EXACT
                assert got.u_statistic == u
                assert abs(got.p_value - want) <= 1e-12, (n1, n2, alternative)
                worst = max(worst, abs(got.p_value - want))
                checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    report(1, f"{checked} p-values within {worst:.2e} of enumeration in {elapsed:.1f}s")


def test_criterion_02_rank_test_invariants():
    rng = np.random.default_rng(404)
    cases = 10_000
    for _ in range(cases):
        n1 = int(rng.integers(1, 11))
        n2 = int(rng.integers(1, 11))
        if rng.random() < 0.5:
            a = list(rng.integers(0, 6, n1).astype(float))  # forces ties
            b = list(rng.integers(0, 6, n2).astype(float))
        else:
            a = list(rng.normal(size=n1))
            b = list(rng.normal(size=n2))
        fwd = mann_whitney_u(a, b)
        rev = mann_whitney_u(b, a)
        assert fwd.u_statistic + rev.u_statistic == n1 * n2
        assert fwd.p_value == rev.p_value  # two-sided swap symmetry
        transformed = mann_whitney_u([3.0 * x + 1.0 for x in a], [3.0 * x + 1.0 for x in b])
        assert transformed.u_statistic == fwd.u_statistic
        assert transformed.p_value == fwd.p_value
        shifted = mann_whitney_u(a, b, Alternative.GREATER)
        cubed = mann_whitney_u([x**3 for x in a], [x**3 for x in b], Alternative.GREATER)
        assert cubed.u_statistic == shifted.u_statistic
        assert cubed.p_value == shifted.p_value
    report(2, f"U complement, swap symmetry, monotone invariance over {cases} cases")


def test_criterion_03_pipeline_invariants():
    rng = np.random.default_rng(77)
    started = time.monotonic()
    sensors = [f"s{i}" for i in range(5)]

    from gaitdrift.events import EventLog, SensorEvent

    for _ in range(300):
        length = int(rng.integers(2, 120))
        ids = [sensors[i] for i in rng.integers(0, len(sensors), length)]
        times = np.cumsum(rng.uniform(0.01, 30.0, length))
        log = EventLog(
            events=[
                SensorEvent(sensor_id=s, timestamp=float(t), status="ON")
                for s, t in zip(ids, times)
            ],
            day_length=600.0,
        )
        transitions = extract_transitions(log)
        assert len(transitions) == sum(x != y for x, y in zip(ids, ids[1:]))

        cfg = FilterConfig(t_min=1.0, t_max=20.0, percentile_k=float(rng.uniform(0, 100)))
        kept = filter_transitions(transitions, cfg)
        assert filter_transitions(kept, cfg) == kept  # idempotent
        stats = aggregate_daily(kept, cfg)
        assert sum(s.support for s in stats.values()) == len(kept)  # support conserved

        flipped = [
            Transition(
                from_sensor=t.to_sensor,
                to_sensor=t.from_sensor,
                duration=t.duration,
                day=t.day,
            )
            for t in kept
        ]
        assert aggregate_daily(flipped, cfg) == stats  # direction symmetry

    for _ in range(300):
        values = list(rng.uniform(0, 50, int(rng.integers(1, 40))))
        assert percentile(values, 0.0) == min(values)
        assert percentile(values, 100.0) == max(values)

    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    report(3, f"count, symmetry, idempotence, support, percentile endpoints in {elapsed:.1f}s")


def test_criterion_04_stationary_flag_rate():
    trials = 500
    flags = 0
    pair = PairKey.of("pir_a", "pir_b")
    cfg = DetectorConfig()
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((915, trial)))
        stats = {}
        for day in range(1, 22):
            value = float(rng.lognormal(math.log(4.0), 0.35))
            stats[(pair, day)] = DailyPairStat(
                pair=pair, day=day, percentile_value=value, support=25
            )
        series = detect_from_stats(stats, 21, cfg)
        verdicts = series.decision_for(21).verdicts
        assert len(verdicts) == 1 and verdicts[0].tested
        flags += verdicts[0].flag
    rate = flags / trials
    assert rate <= 0.10
    report(4, f"per-pair flag rate {rate:.3f} <= 0.10 over {trials} stationary trials")


def test_criterion_05_large_gap_detection(protocol_runs):
    results, timings = protocol_runs
    scored = results[("a", 0.4, 1.0)]
    delays = [r.detection_delay for r in scored]
    assert None not in delays, "a 0.8 m/s drop must always be detected"
    mean_f1 = mean(r.f1 for r in scored)
    mean_delay = mean(delays)
    elapsed = timings[("a", 0.4)]
    assert mean_f1 >= 0.80
    assert mean_delay <= 14.0
    assert elapsed < 120.0
    report(
        5,
        f"layout a 1.2->0.4: mean F1 {mean_f1:.3f} >= 0.80, "
        f"mean delay {mean_delay:.1f} <= 14, {elapsed:.0f}s for 10 seeds",
    )


def test_criterion_06_gap_monotonicity(protocol_runs):
    results, _ = protocol_runs
    summary = []
    for layout in ("a", "b", "c", "d"):
        large = mean(r.f1 for r in results[(layout, 0.4, 1.0)])
        small = mean(r.f1 for r in results[(layout, 1.1, 1.0)])
        assert large > small, f"layout {layout}: F1 {large:.3f} vs {small:.3f}"
        summary.append(f"{layout}: {large:.2f}>{small:.2f}")
    report(6, "gap 0.8 beats gap 0.1 on every layout (" + ", ".join(summary) + ")")


def test_criterion_07_t_min_ablation(protocol_runs):
    results, _ = protocol_runs
    with_floor = mean(r.f1 for r in results[("d", 0.4, 1.0)])
    without = mean(r.f1 for r in results[("d", 0.4, 0.0)])
    assert with_floor >= without
    report(
        7,
        f"overlapping-PIR layout: mean F1 {with_floor:.3f} at t_min=1 >= "
        f"{without:.3f} at t_min=0",
    )


def test_criterion_08_speed_duration_law():
    cfg = FilterConfig(t_min=0.0, t_max=60.0, percentile_k=0.0)
    num_days = 6
    ratios = []
    pair_count = 0
    for layout in ("a", "b"):
        plan = load_floor_plan(layout)
        pirs = {s.sensor_id: s for s in plan.sensors if s.kind is SensorKind.PIR}
        daily_min: dict[float, dict] = {}
        for speed in (1.2, 0.6):
            scenario = Scenario(
                num_days=num_days, baseline_speed=speed, drifted_speed=speed, seed=0
            )
            log, _ = simulate(plan, scenario)
            mins: dict[tuple[PairKey, int], float] = {}
            for t in filter_transitions(extract_transitions(log), cfg):
                key = (PairKey.of(t.from_sensor, t.to_sensor), t.day)
                mins[key] = min(mins.get(key, math.inf), t.duration)
            daily_min[speed] = mins
        # Fixed-path pairs: disjoint PIR fields separated by a real walk, so
        # every adjacency between them is timed mid-stride on a planned route.
        body = 0.5
        for a, b in product(sorted(pirs), repeat=2):
            if a >= b:
                continue
            sa, sb = pirs[a], pirs[b]
            gap = (
                math.hypot(sa.x - sb.x, sa.y - sb.y)
                - (sa.radius + body)
                - (sb.radius + body)
            )
            if gap < 1.2:
                continue
            pair = PairKey.of(a, b)
            keys = [(pair, day) for day in range(1, num_days + 1)]
            if not all(k in daily_min[0.6] and k in daily_min[1.2] for k in keys):
                continue
            pair_count += 1
            for k in keys:
                ratios.append(daily_min[0.6][k] / daily_min[1.2][k])
    assert pair_count >= 3, "need several well-separated PIR pairs to exercise the law"
    assert ratios and all(1.8 <= r <= 2.2 for r in ratios), ratios
    report(
        8,
        f"{len(ratios)} daily min-duration ratios from {pair_count} pairs all in "
        f"[1.8, 2.2] (span {min(ratios):.2f}..{max(ratios):.2f})",
    )


def test_criterion_09_byte_identical_reruns(tmp_path):
    flags = [
        "--baseline", "1.2", "--drifted", "0.4", "--onset", "8",
        "--days", "16", "--seed", "3", "--day-length", "14400",
    ]
    outputs = {}
    for attempt in ("first", "second"):
        root = tmp_path / attempt
        assert main(["simulate", "--layout", "a", *flags, "--out", str(root / "sim")]) == 0
        assert main([
            "detect", "--events", str(root / "sim" / "events.csv"),
            "--day-length", "14400", "--out", str(root / "dec"),
        ]) == 0
        assert main([
            "sweep", "--layouts", "a", "--speeds", "1.2:0.4,1.2:1.1", "--seeds", "0,1",
            "--days", "16", "--onset", "8", "--day-length", "14400",
            "--out", str(root / "sweep.csv"),
        ]) == 0
        outputs[attempt] = {
            name: (root / name).read_bytes()
            for name in ("sim/events.csv", "sim/truth.csv", "dec/decisions.csv", "sweep.csv")
        }
    assert outputs["first"] == outputs["second"]
    sizes = sum(len(v) for v in outputs["first"].values())
    report(9, f"simulate+detect+sweep reruns byte-identical ({sizes} bytes compared)")


def test_criterion_10_metric_arithmetic():
    r = metrics_from_confusion(ConfusionCounts(tp=2, tn=5, fp=1, fn=2))
    assert r.f1 == 4 / 7
    assert r.accuracy == 0.7
    assert r.precision == 2 / 3
    assert r.recall == 0.5

    truth = GroundTruth(num_days=30, onset_day=20)
    base = {d: 0 for d in range(14, 31)}
    assert detection_delay(series_of({**base, 20: 1}), truth) == 0
    assert detection_delay(series_of({**base, 25: 1}), truth) == 5
    assert detection_delay(series_of(base), truth) is None
    assert detection_delay(series_of({**base, 15: 1}), truth) is None  # pre-onset only

    scored = score(series_of({**base, 25: 1, 26: 1}), truth)
    assert scored.detection_delay == 5
    assert scored.recall == 2 / 11
    report(10, "confusion arithmetic exact (f1=4/7) and delay edge cases per definition")
