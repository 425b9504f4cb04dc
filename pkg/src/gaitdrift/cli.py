"""Command-line entry point.

One binary with subcommands covering the whole loop: ``simulate`` writes
event and truth CSVs, ``detect`` turns an event CSV into daily decisions,
``evaluate`` scores decisions against truth, ``sweep`` runs a seeded
parameter grid, ``selftest`` cross-checks the rank test against brute
force, and ``serve`` starts the HTTP service.

Exit codes: 0 success, 1 usage error, 2 data error. Logs go to stderr;
data goes to files or stdout only. Flag values override config-file
values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import yaml

from . import __version__
from .detector import (
    DetectorConfig,
    Weighting,
    detect_from_stats,
    read_decisions,
    write_decisions,
    write_diagnostics,
)
from .events import EventLogError, load_event_log, write_event_log
from .evaluation import SweepSpec, run_sweep, score, write_sweep_csv
from .mwu import Alternative, exact_p
from .simulator import (
    LayoutError,
    PathError,
    Scenario,
    SimulationError,
    load_floor_plan,
    read_ground_truth,
    simulate,
    write_ground_truth,
)
from .transitions import (
    FilterConfig,
    aggregate_daily,
    extract_transitions,
    filter_transitions,
    write_daily_stats,
)

log = logging.getLogger("gaitdrift")

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits with code 1 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-min", type=float, default=None, help="minimum transition duration, s (default 1.0)")
    p.add_argument("--t-max", type=float, default=None, help="maximum transition duration, s (default 60.0)")
    p.add_argument("--percentile", type=float, default=None, help="daily percentile k in [0,100] (default 0)")


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, default=None, help="reference/query window length, days (default 7)")
    p.add_argument("--alpha", type=float, default=None, help="significance level (default 0.05)")
    p.add_argument("--min-support", type=int, default=None, help="support needed for a day to enter a window (default 0)")
    p.add_argument(
        "--weighting",
        choices=[w.value for w in Weighting],
        default=None,
        help="ensemble weighting (default unweighted)",
    )
    p.add_argument("--threshold", type=float, default=None, help="ensemble decision threshold (default 0.5)")
    p.add_argument(
        "--alternative",
        choices=[a.value for a in Alternative],
        default=None,
        help="test alternative (default two-sided)",
    )


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--baseline", type=float, default=None, help="baseline gait speed, m/s (default 1.2)")
    p.add_argument("--drifted", type=float, default=None, help="post-onset gait speed, m/s (default: baseline)")
    p.add_argument("--onset", type=int, default=None, help="first drifted day, 1-based (default: days+1, no drift)")
    p.add_argument("--days", type=int, default=None, help="number of simulated days (default 200)")
    p.add_argument("--seed", type=int, default=None, help="simulation seed (default 0)")
    p.add_argument("--sample-rate", type=float, default=None, help="trajectory sampling rate, Hz (default 10)")
    p.add_argument("--body-radius", type=float, default=None, help="agent body radius, m (default 0.5)")
    p.add_argument("--day-length", type=float, default=None, help="seconds per day (default 86400)")


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="increase log verbosity (repeatable)"
    )
    common.add_argument("--config", type=Path, default=None, help="YAML file of flag defaults")

    parser = _Parser(prog="gaitdrift", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"gaitdrift {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    p_sim = add_command("simulate", "generate an event log for a scenario")
    p_sim.add_argument("--layout", default=None, help="built-in layout name (a-d) or YAML path (default a)")
    _add_scenario_flags(p_sim)
    p_sim.add_argument("--out", type=Path, required=True, help="output directory for events.csv and truth.csv")

    p_det = add_command("detect", "run drift detection over an event CSV")
    p_det.add_argument("--events", type=Path, required=True, help="event CSV (timestamp,sensor_id,status)")
    p_det.add_argument("--header", action="store_true", help="event CSV has a header row")
    p_det.add_argument("--day-length", type=float, default=None, help="seconds per day (default 86400)")
    _add_filter_flags(p_det)
    _add_detector_flags(p_det)
    p_det.add_argument("--out", type=Path, required=True, help="output directory for decisions.csv")
    p_det.add_argument("--stats-out", type=Path, default=None, help="also write daily pair stats CSV here")
    p_det.add_argument("--diagnostics", type=Path, default=None, help="also write per-pair diagnostics CSV here")

    p_eval = add_command("evaluate", "score decisions against ground truth")
    p_eval.add_argument("--decisions", type=Path, required=True, help="decisions CSV from detect")
    p_eval.add_argument("--truth", type=Path, required=True, help="ground-truth CSV (day,label)")
    p_eval.add_argument("--include-warmup", action="store_true", help="score undecided warm-up days as negative")
    p_eval.add_argument("--out", type=Path, default=None, help="also write the result as CSV here")

    p_sweep = add_command("sweep", "run a parameter grid of experiments")
    p_sweep.add_argument("--layouts", default=None, help="comma list of layout names/paths (default a)")
    p_sweep.add_argument(
        "--speeds", default=None, help="comma list of baseline:drifted pairs (default 1.2:0.4)"
    )
    p_sweep.add_argument("--percentiles", default=None, help="comma list of percentile k values (default 0)")
    p_sweep.add_argument("--t-mins", default=None, help="comma list of t_min values (default 1)")
    p_sweep.add_argument("--t-maxes", default=None, help="comma list of t_max values (default 60)")
    p_sweep.add_argument("--min-supports", default=None, help="comma list of min_support values (default 0)")
    p_sweep.add_argument(
        "--weightings", default=None, help="comma list of weightings (default unweighted)"
    )
    p_sweep.add_argument("--seeds", default=None, help="comma list of seeds (default 0)")
    p_sweep.add_argument("--days", type=int, default=None, help="days per run (default 200)")
    p_sweep.add_argument("--onset", type=int, default=None, help="onset day per run (default 100)")
    p_sweep.add_argument("--day-length", type=float, default=None, help="seconds per day (default 86400)")
    p_sweep.add_argument("--window", type=int, default=None, help="window length (default 7)")
    p_sweep.add_argument("--alpha", type=float, default=None, help="significance level (default 0.05)")
    p_sweep.add_argument("--jobs", type=int, default=None, help="parallel workers (default 1)")
    p_sweep.add_argument("--out", type=Path, required=True, help="results CSV path")

    add_command("selftest", "verify the exact rank test against brute-force enumeration")

    p_serve = add_command("serve", "start the HTTP service")
    p_serve.add_argument("--host", default=None, help="bind address (default 127.0.0.1)")
    p_serve.add_argument("--port", type=int, default=None, help="port (default 8000)")

    return parser


def _load_config(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError("config file must contain a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


class _Options:
    """Flag > config > default resolution for one subcommand."""

    def __init__(self, args: argparse.Namespace, config: dict[str, Any]):
        self.args = args
        self.config = config

    def get(self, name: str, default: Any = None) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.config:
            return self.config[name]
        return default


def _parse_list(raw: Any, convert) -> tuple:
    if isinstance(raw, (list, tuple)):
        return tuple(convert(v) for v in raw)
    return tuple(convert(part) for part in str(raw).split(",") if part != "")


def _parse_speed_pairs(raw: Any) -> tuple[tuple[float, float], ...]:
    if isinstance(raw, (list, tuple)):
        return tuple((float(b), float(d)) for b, d in raw)
    pairs = []
    for part in str(raw).split(","):
        if not part:
            continue
        baseline, _, drifted = part.partition(":")
        if not drifted:
            raise ValueError(f"speed pair {part!r} must look like baseline:drifted")
        pairs.append((float(baseline), float(drifted)))
    return tuple(pairs)


def _scenario_from(opts: _Options) -> Scenario:
    baseline = float(opts.get("baseline", 1.2))
    drifted = opts.get("drifted")
    days = int(opts.get("days", 200))
    return Scenario(
        num_days=days,
        baseline_speed=baseline,
        drifted_speed=float(drifted) if drifted is not None else baseline,
        onset_day=opts.get("onset"),
        seed=int(opts.get("seed", 0)),
        sample_rate=float(opts.get("sample_rate", 10.0)),
        body_radius=float(opts.get("body_radius", 0.5)),
        day_length=float(opts.get("day_length", 86400.0)),
    )


def _filter_from(opts: _Options) -> FilterConfig:
    return FilterConfig(
        t_min=float(opts.get("t_min", 1.0)),
        t_max=float(opts.get("t_max", 60.0)),
        percentile_k=float(opts.get("percentile", 0.0)),
    )


def _detector_from(opts: _Options) -> DetectorConfig:
    return DetectorConfig(
        window_len=int(opts.get("window", 7)),
        alpha=float(opts.get("alpha", 0.05)),
        min_support=int(opts.get("min_support", 0)),
        weighting=Weighting(opts.get("weighting", Weighting.UNWEIGHTED.value)),
        decision_threshold=float(opts.get("threshold", 0.5)),
        alternative=Alternative(opts.get("alternative", Alternative.TWO_SIDED.value)),
    )


def _cmd_simulate(opts: _Options) -> int:
    plan = load_floor_plan(str(opts.get("layout", "a")).lower())
    scenario = _scenario_from(opts)
    out_dir: Path = opts.args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    event_log, truth = simulate(plan, scenario)
    write_event_log(event_log.events, str(out_dir / "events.csv"))
    write_ground_truth(truth, out_dir / "truth.csv")
    log.info("wrote %d events over %d days to %s", len(event_log), scenario.num_days, out_dir)
    return 0


def _cmd_detect(opts: _Options) -> int:
    day_length = float(opts.get("day_length", 86400.0))
    event_log = load_event_log(
        str(opts.args.events), day_length=day_length, header=bool(opts.args.header)
    )
    filter_cfg = _filter_from(opts)
    detector_cfg = _detector_from(opts)
    transitions = filter_transitions(extract_transitions(event_log), filter_cfg)
    stats = aggregate_daily(transitions, filter_cfg)
    series = detect_from_stats(stats, event_log.last_day(), detector_cfg)
    out_dir: Path = opts.args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    write_decisions(series, str(out_dir / "decisions.csv"))
    if opts.args.stats_out is not None:
        opts.args.stats_out.parent.mkdir(parents=True, exist_ok=True)
        write_daily_stats(stats, str(opts.args.stats_out))
    if opts.args.diagnostics is not None:
        opts.args.diagnostics.parent.mkdir(parents=True, exist_ok=True)
        write_diagnostics(series, str(opts.args.diagnostics))
    log.info("decided %d days", len(series))
    return 0


def _cmd_evaluate(opts: _Options) -> int:
    series = read_decisions(str(opts.args.decisions))
    truth = read_ground_truth(opts.args.truth)
    result = score(series, truth, include_warmup=bool(opts.args.include_warmup))
    delay = "" if result.detection_delay is None else str(result.detection_delay)
    for name in ("accuracy", "precision", "recall", "f1"):
        sys.stdout.write(f"{name}={getattr(result, name)!r}\n")
    sys.stdout.write(f"detection_delay={delay}\n")
    if opts.args.out is not None:
        opts.args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(opts.args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("accuracy,precision,recall,f1,detection_delay\n")
            fh.write(
                f"{result.accuracy!r},{result.precision!r},{result.recall!r},"
                f"{result.f1!r},{delay}\n"
            )
    return 0


def _cmd_sweep(opts: _Options) -> int:
    spec = SweepSpec(
        layouts=_parse_list(opts.get("layouts", "a"), str),
        speed_pairs=_parse_speed_pairs(opts.get("speeds", "1.2:0.4")),
        percentile_ks=_parse_list(opts.get("percentiles", "0"), float),
        t_mins=_parse_list(opts.get("t_mins", "1"), float),
        t_maxes=_parse_list(opts.get("t_maxes", "60"), float),
        min_supports=_parse_list(opts.get("min_supports", "0"), int),
        weightings=_parse_list(opts.get("weightings", "unweighted"), Weighting),
        seeds=_parse_list(opts.get("seeds", "0"), int),
        num_days=int(opts.get("days", 200)),
        onset_day=int(opts.get("onset", 100)),
        window_len=int(opts.get("window", 7)),
        alpha=float(opts.get("alpha", 0.05)),
        day_length=float(opts.get("day_length", 86400.0)),
    )
    rows = run_sweep(spec, jobs=int(opts.get("jobs", 1)))
    out: Path = opts.args.out
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, out)
    failures = sum(1 for r in rows if "result" not in r)
    log.info("sweep wrote %d rows (%d failed) to %s", len(rows), failures, out)
    return 0


def _cmd_selftest(_opts: _Options) -> int:
    """Compare exact_p against direct enumeration on small sample sizes."""
    checked = 0
    for n1 in range(1, 5):
        for n2 in range(1, 5):
            values = list(range(n1 + n2))
            total = 0
            counts: dict[float, int] = {}
            for combo in itertools.combinations(values, n1):
                ranks = [v + 1 for v in combo]
                u = sum(ranks) - n1 * (n1 + 1) / 2.0
                counts[u] = counts.get(u, 0) + 1
                total += 1
            for u in counts:
                expected = sum(c for v, c in counts.items() if v <= u) / total
                got = exact_p(u, n1, n2, Alternative.LESS)
                if abs(got - expected) > 1e-12:
                    sys.stderr.write(
                        f"selftest FAILED at n1={n1} n2={n2} u={u}: {got} != {expected}\n"
                    )
                    return DATA_ERROR
                checked += 1
    sys.stdout.write(f"selftest ok: {checked} tail probabilities match enumeration\n")
    return 0


def _cmd_serve(opts: _Options) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(
        app,
        host=str(opts.get("host", "127.0.0.1")),
        port=int(opts.get("port", 8000)),
        log_level="info",
    )
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "detect": _cmd_detect,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "selftest": _cmd_selftest,
    "serve": _cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](_Options(args, config))
    except (
        EventLogError,
        LayoutError,
        SimulationError,
        PathError,
        OSError,
        ValueError,
    ) as exc:
        sys.stderr.write(f"gaitdrift {args.command}: error: {exc}\n")
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
