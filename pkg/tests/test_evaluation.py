import csv
import io
import math
import statistics

import pytest

from gaitdrift.detector import DayDecision, DriftSeries, Weighting
from gaitdrift.evaluation import (
    MEAN_SEED,
    STD_SEED,
    SWEEP_COLUMNS,
    ConfusionCounts,
    SweepSpec,
    detection_delay,
    metrics_from_confusion,
    run_experiment,
    run_sweep,
    score,
    write_sweep_csv,
)
from gaitdrift.simulator import GroundTruth, Scenario, load_floor_plan


def series_of(decisions: dict[int, int], scores: dict[int, float] | None = None) -> DriftSeries:
    scores = scores or {}
    return DriftSeries(
        days=[
            DayDecision(day=d, score=scores.get(d, float(v)), decision=v)
            for d, v in sorted(decisions.items())
        ]
    )


class TestConfusionMetrics:
    def test_frozen_mixed_counts(self):
        r = metrics_from_confusion(ConfusionCounts(tp=2, tn=5, fp=1, fn=2))
        assert r.accuracy == 0.7
        assert r.precision == 2 / 3
        assert r.recall == 0.5
        assert r.f1 == 4 / 7  # single division, not the harmonic-mean detour

    def test_all_negative_days(self):
        r = metrics_from_confusion(ConfusionCounts(tp=0, tn=8, fp=0, fn=0))
        assert r.accuracy == 1.0
        assert r.precision == 0.0
        assert r.recall == 0.0
        assert r.f1 == 0.0

    def test_empty_counts_score_zero(self):
        r = metrics_from_confusion(ConfusionCounts(tp=0, tn=0, fp=0, fn=0))
        assert (r.accuracy, r.precision, r.recall, r.f1) == (0.0, 0.0, 0.0, 0.0)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(tp=-1, tn=0, fp=0, fn=0)


class TestScore:
    def test_perfect_detector(self):
        truth = GroundTruth(num_days=10, onset_day=6)
        series = series_of({d: (1 if d >= 6 else 0) for d in range(3, 11)})
        r = score(series, truth)
        assert (r.accuracy, r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0, 1.0)
        assert r.detection_delay == 0

    def test_delayed_alert(self):
        truth = GroundTruth(num_days=120, onset_day=100)
        decisions = {d: 0 for d in range(14, 121)}
        for d in range(103, 121):
            decisions[d] = 1
        assert detection_delay(series_of(decisions), truth) == 3

    def test_missed_drift_has_no_delay(self):
        truth = GroundTruth(num_days=12, onset_day=10)
        series = series_of({d: 0 for d in range(5, 13)})
        r = score(series, truth)
        assert r.detection_delay is None
        assert r.recall == 0.0

    def test_pre_onset_alert_does_not_count_as_detection(self):
        truth = GroundTruth(num_days=12, onset_day=10)
        series = series_of({4: 1, **{d: 0 for d in range(5, 13)}})
        r = score(series, truth)
        assert r.detection_delay is None
        assert r.precision == 0.0  # the early alert is a false positive

    def test_decided_day_outside_truth_rejected(self):
        truth = GroundTruth(num_days=5, onset_day=3)
        with pytest.raises(ValueError):
            score(series_of({6: 0}), truth)

    def test_warmup_days_count_as_negative_when_asked(self):
        truth = GroundTruth(num_days=6, onset_day=4)
        series = series_of({5: 1, 6: 1})
        narrow = score(series, truth)
        wide = score(series, truth, include_warmup=True)
        assert narrow.accuracy == 1.0
        # Days 1-3 become true negatives, day 4 a false negative.
        assert wide.accuracy == 5 / 6
        assert wide.recall == 2 / 3


class TestRunExperiment:
    def test_end_to_end_smoke(self):
        plan = load_floor_plan("a")
        scenario = Scenario(
            num_days=16, baseline_speed=1.2, drifted_speed=0.4, onset_day=8,
            seed=1, day_length=14400.0,
        )
        r = run_experiment(plan, scenario)
        assert 0.0 <= r.f1 <= 1.0
        assert r.recall > 0.0  # a 3x slowdown must be noticed at some point


def tiny_spec(**overrides) -> SweepSpec:
    fields = dict(
        layouts=("a",),
        speed_pairs=((1.2, 0.4),),
        percentile_ks=(0.0, 50.0),
        t_mins=(0.0, 1.0),
        t_maxes=(60.0,),
        min_supports=(0,),
        weightings=(Weighting.UNWEIGHTED,),
        seeds=(0, 1, 2),
        num_days=16,
        onset_day=8,
        window_len=7,
        alpha=0.05,
        day_length=14400.0,
    )
    fields.update(overrides)
    return SweepSpec(**fields)


@pytest.fixture(scope="module")
def sweep_rows():
    return run_sweep(tiny_spec())


def rows_from_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    assert tuple(header) == SWEEP_COLUMNS
    return [dict(zip(header, row)) for row in reader]


class TestSweep:
    def test_grid_cardinality(self, sweep_rows):
        # 2 percentiles x 2 t_min values x 3 seeds.
        assert len(sweep_rows) == 12
        assert all("result" in r for r in sweep_rows)

    def test_csv_layout_and_aggregates(self, sweep_rows):
        buf = io.StringIO()
        write_sweep_csv(sweep_rows, buf)
        rows = rows_from_csv(buf.getvalue())
        seeds = [r["seed"] for r in rows]
        # Each of the four cells contributes its seeds then MEAN then STD.
        assert seeds == ["0", "1", "2", MEAN_SEED, STD_SEED] * 4
        for base in range(0, len(rows), 5):
            members = rows[base : base + 3]
            mean_row, std_row = rows[base + 3], rows[base + 4]
            for metric in ("accuracy", "precision", "recall", "f1"):
                values = [float(r[metric]) for r in members]
                assert float(mean_row[metric]) == pytest.approx(
                    math.fsum(values) / len(values), abs=1e-12
                )
                assert float(std_row[metric]) == pytest.approx(
                    statistics.stdev(values), abs=1e-12
                )
            delays = [int(r["detection_delay"]) for r in members if r["detection_delay"]]
            if delays:
                assert float(mean_row["detection_delay"]) == pytest.approx(
                    math.fsum(delays) / len(delays), abs=1e-12
                )

    def test_rerun_is_byte_identical(self, sweep_rows):
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_sweep_csv(sweep_rows, buf_a)
        write_sweep_csv(run_sweep(tiny_spec()), buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_parallel_matches_serial(self, sweep_rows):
        spec = tiny_spec(percentile_ks=(0.0,), seeds=(0, 1))
        serial = run_sweep(spec, jobs=1)
        parallel = run_sweep(spec, jobs=2)
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_sweep_csv(serial, buf_a)
        write_sweep_csv(parallel, buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_canonical_order_ignores_axis_listing_order(self):
        a = tiny_spec(percentile_ks=(50.0, 0.0), seeds=(2, 0, 1))
        assert [c["percentile_k"] for c in a.cells()] == [c["percentile_k"] for c in tiny_spec().cells()]
        assert [c["seed"] for c in a.cells()] == [c["seed"] for c in tiny_spec().cells()]

    def test_failed_cells_are_recorded_not_raised(self, tmp_path):
        missing = str(tmp_path / "nope.yaml")
        spec = tiny_spec(
            layouts=("a", missing), percentile_ks=(0.0,), t_mins=(1.0,), seeds=(0,)
        )
        rows = run_sweep(spec)
        assert len(rows) == 2
        good = [r for r in rows if "result" in r]
        bad = [r for r in rows if "error" in r]
        assert len(good) == 1 and len(bad) == 1
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        parsed = rows_from_csv(buf.getvalue())
        failed_rows = [r for r in parsed if r["layout"] == missing and r["seed"] == "0"]
        assert len(failed_rows) == 1
        assert failed_rows[0]["accuracy"] == ""
        assert failed_rows[0]["detection_delay"] != ""  # carries the error text
        # Aggregates over a group with no successes stay empty.
        failed_mean = [r for r in parsed if r["layout"] == missing and r["seed"] == MEAN_SEED]
        assert failed_mean[0]["f1"] == ""

    def test_empty_axis_rejected(self):
        with pytest.raises(ValueError):
            tiny_spec(seeds=())
