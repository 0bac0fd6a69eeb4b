"""Command-line front end.

Subcommands wire the pipeline end to end: ``gen`` writes a synthetic event
and truth file, ``ingest`` turns events into per-series minute CSVs,
``detect`` runs a detector over the series and writes the anomaly report,
``eval`` scores a report against truth, ``sweep`` runs the full comparison
grid, and ``expect`` prints the cold-start occurrence expectation.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .baseline_ar import detect_series_ar
from .coldstart import ColdStartParams, expected_matches
from .detector import AnomalyEvent, DetectorConfig, detect_series, score_aggregate
from .evalharness import confusion, metrics, sweep, sweep_rows_to_csv
from .ingest import (
    ParseError,
    parse_events,
    parse_ground_truth,
    aggregate_all,
    write_events,
    write_ground_truth,
)
from .model import MinuteSeries, SeriesKey
from .synth import AttackSpec, SynthProfile, iter_events, truth_intervals

DEFAULT_LOOKBACK_DAYS = "0.04,0.08,0.25,0.5,0.75,1,2,3,4,5"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this artifact reserves 2
    # for data errors.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=24, help="pattern length in minutes")
    p.add_argument("--h", type=int, default=None, help="prediction horizon in minutes (default: k)")
    p.add_argument("--lookback", type=int, default=1440, help="history length in minutes")
    p.add_argument("--epsilon", type=float, default=0.1, help="log-base adjustment in [0,1)")
    p.add_argument("--cos-threshold", type=float, default=0.9, help="similarity cutoff in (0,1]")
    p.add_argument("--score-threshold", type=int, default=4, help="feature score must exceed this")
    p.add_argument("--stride", type=int, default=None, help="minutes between evaluations (default: h)")
    p.add_argument("--cold-start-factor", type=float, default=10.0, help="order-of-magnitude factor")
    p.add_argument(
        "--restart-multiple",
        type=float,
        default=2.0,
        help="growth bound for incremental matching state",
    )


def _config_from_args(args: argparse.Namespace, lookback: Optional[int] = None) -> DetectorConfig:
    return DetectorConfig(
        k=args.k,
        h=args.h,
        lookback=args.lookback if lookback is None else lookback,
        epsilon=args.epsilon,
        cos_threshold=args.cos_threshold,
        score_threshold=args.score_threshold,
        stride=args.stride,
        cold_start_factor=args.cold_start_factor,
        restart_multiple=args.restart_multiple,
    )


def _parse_attack(text: str) -> AttackSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"attack must be start:duration:multiplier, got {text!r}"
        )
    try:
        return AttackSpec(int(parts[0]), int(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _profile_from_args(args: argparse.Namespace) -> SynthProfile:
    if args.attack:
        attacks = tuple(args.attack)
    else:
        horizon = args.days * 1440
        attacks = tuple(
            a for a in SynthProfile().attacks if a.start_minute + a.duration_minutes <= horizon
        )
    return SynthProfile(
        days=args.days,
        high_rate=args.high_rate,
        low_rate=args.low_rate,
        noise_fraction=args.noise,
        attacks=attacks,
        seed=args.seed,
    )


def _cmd_gen(args: argparse.Namespace) -> int:
    profile = _profile_from_args(args)
    with open(args.out_events, "w", newline="") as fh:
        count = write_events(fh, iter_events(profile))
    with open(args.out_truth, "w", newline="") as fh:
        write_ground_truth(fh, truth_intervals(profile))
    print(f"wrote {count} events to {args.out_events}, {len(profile.attacks)} truth intervals")
    return 0


def _series_filename(key: SeriesKey) -> str:
    return key.label().replace(":", "_") + ".csv"


def _key_from_filename(name: str) -> SeriesKey:
    stem = name[:-4] if name.endswith(".csv") else name
    return SeriesKey.from_label(stem.replace("_", ":", 1))


def _cmd_ingest(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.events, newline="") as fh:
        series = aggregate_all(parse_events(fh))
    for key in sorted(series):
        s = series[key]
        path = out_dir / _series_filename(key)
        with open(path, "w", newline="") as fh:
            fh.write("minute,value\n")
            for i, v in enumerate(s.values):
                fh.write(f"{s.start_minute + i},{v!r}\n")
    print(f"wrote {len(series)} series to {out_dir}")
    return 0


def _load_series_dir(path: str) -> dict[SeriesKey, MinuteSeries]:
    series: dict[SeriesKey, MinuteSeries] = {}
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise ParseError(f"no series CSVs found in {path}")
    for f in files:
        key = _key_from_filename(f.name)
        minutes: list[int] = []
        values: list[float] = []
        with open(f, newline="") as fh:
            header = fh.readline().strip()
            if header != "minute,value":
                raise ParseError(f"{f}: bad series header {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                m_raw, _, v_raw = line.partition(",")
                try:
                    minutes.append(int(m_raw))
                    values.append(float(v_raw))
                except ValueError:
                    raise ParseError(f"{f} line {lineno}: bad row {line!r}") from None
        if not values:
            raise ParseError(f"{f}: empty series")
        if minutes != list(range(minutes[0], minutes[0] + len(minutes))):
            raise ParseError(f"{f}: minutes are not contiguous")
        series[key] = MinuteSeries(key, minutes[0], tuple(values))
    return series


def _event_to_json(ev: AnomalyEvent) -> dict:
    return {
        "key": ev.key,
        "start_minute": ev.start_minute,
        "end_minute": ev.end_minute,
        "mse": ev.mse,
        "cosine": ev.cosine,
        "features": sorted(f.value for f in ev.features),
        "score": ev.score,
    }


def _cmd_detect(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    series = _load_series_dir(args.series_dir)
    detect = detect_series if args.method == "asm" else detect_series_ar
    flags = {key: detect(series[key], cfg) for key in sorted(series)}
    events = score_aggregate(flags, cfg.h, cfg.score_threshold)
    with open(args.report, "w") as fh:
        json.dump([_event_to_json(ev) for ev in events], fh, indent=2)
        fh.write("\n")
    if args.emit_windows:
        with open(args.emit_windows, "w", newline="") as fh:
            fh.write("series_key,window_start,flagged,mse,cosine,cold_start\n")
            for key in sorted(flags):
                for w in flags[key]:
                    mse_s = "" if w.mse is None else repr(w.mse)
                    cos_s = "" if w.cosine is None else repr(w.cosine)
                    fh.write(
                        f"{key.label()},{w.window_start},{int(w.flagged)},"
                        f"{mse_s},{cos_s},{int(w.cold_start)}\n"
                    )
    print(f"wrote {len(events)} events to {args.report}")
    return 0


def _load_report(path: str) -> list[AnomalyEvent]:
    from .model import FeatureKind

    with open(path) as fh:
        raw = json.load(fh)
    by_value = {k.value: k for k in FeatureKind}
    events = []
    for item in raw:
        feats = frozenset(by_value[v] for v in item["features"])
        events.append(
            AnomalyEvent(
                key=item["key"],
                start_minute=item["start_minute"],
                end_minute=item["end_minute"],
                mse=item["mse"],
                cosine=item["cosine"],
                features=feats,
                score=item["score"],
            )
        )
    return events


def _cmd_eval(args: argparse.Namespace) -> int:
    events = _load_report(args.report)
    with open(args.truth, newline="") as fh:
        truth = parse_ground_truth(fh)
    bounds = [iv.start_minute for iv in truth] + [ev.start_minute for ev in events]
    ends = [iv.end_minute for iv in truth] + [ev.end_minute for ev in events]
    start = args.timeline_start if args.timeline_start is not None else (min(bounds) if bounds else 0)
    end = args.timeline_end if args.timeline_end is not None else (max(ends) + 1 if ends else 1)
    counts = confusion(events, truth, (start, end), args.window)
    m = metrics(counts)
    payload = {
        "tp": counts.tp,
        "fp": counts.fp,
        "fn": counts.fn,
        "tn": counts.tn,
        "tpr": m["tpr"],
        "fnr": m["fnr"],
        "precision": m["precision"],
        "f1": m["f1"],
    }
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(",".join(payload))
        print(",".join(repr(v) for v in payload.values()))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    with open(args.events, newline="") as fh:
        series = aggregate_all(parse_events(fh))
    with open(args.truth, newline="") as fh:
        truth = parse_ground_truth(fh)
    lookbacks = [round(float(d) * 1440) for d in args.lookbacks_days.split(",")]
    thresholds = [int(s) for s in args.score_thresholds.split(",")]
    methods = args.methods.split(",")
    cfg = _config_from_args(args, lookback=max(lookbacks))
    rows = sweep(series, truth, cfg, lookbacks, thresholds, methods)
    with open(args.out, "w", newline="") as fh:
        fh.write(sweep_rows_to_csv(rows))
    print(f"wrote {len(rows)} sweep rows to {args.out}")
    return 0


def _cmd_expect(args: argparse.Namespace) -> int:
    params = ColdStartParams(l=args.l, k=args.k, d=args.d, alpha=args.alpha, beta=args.beta)
    value = expected_matches(params, args.mode)
    print(f"{float(value):.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dnswatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("gen", help="generate synthetic events and ground truth", formatter_class=fmt)
    p.add_argument("--days", type=int, default=10)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--high-rate", type=float, default=20000.0, help="busy-window packets per hour")
    p.add_argument("--low-rate", type=float, default=7500.0, help="off-hours packets per hour")
    p.add_argument("--noise", type=float, default=0.05, help="multiplicative noise fraction")
    p.add_argument(
        "--attack",
        action="append",
        type=_parse_attack,
        default=None,
        metavar="START:DUR:MULT",
        help="inject an attack (repeatable; default: built-in schedule)",
    )
    p.add_argument("--out-events", required=True)
    p.add_argument("--out-truth", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("ingest", help="aggregate events into per-series minute CSVs", formatter_class=fmt)
    p.add_argument("--events", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("detect", help="run a detector over ingested series", formatter_class=fmt)
    p.add_argument("--series-dir", required=True)
    p.add_argument("--method", choices=["asm", "ar"], default="asm")
    p.add_argument("--report", required=True, help="output JSON report path")
    p.add_argument("--emit-windows", default=None, help="also write per-window flag CSV here")
    _add_detector_flags(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("eval", help="score a report against ground truth", formatter_class=fmt)
    p.add_argument("--report", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--window", type=int, default=24, help="true-negative bucket width in minutes")
    p.add_argument("--timeline-start", type=int, default=None)
    p.add_argument("--timeline-end", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="full method/lookback/threshold comparison grid", formatter_class=fmt)
    p.add_argument("--events", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lookbacks-days", default=DEFAULT_LOOKBACK_DAYS)
    p.add_argument("--score-thresholds", default="4,5")
    p.add_argument("--methods", default="asm,ar")
    _add_detector_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("expect", help="cold-start occurrence expectation", formatter_class=fmt)
    p.add_argument("--l", type=int, required=True, help="history length in letters")
    p.add_argument("--k", type=int, required=True, help="pattern length in letters")
    p.add_argument("--d", type=int, required=True, help="digits per letter")
    p.add_argument("--alpha", type=int, required=True, help="per-letter tolerance")
    p.add_argument("--beta", type=int, required=True, help="total tolerance")
    p.add_argument("--mode", choices=["lower", "inclusion_exclusion"], default="lower")
    p.set_defaults(func=_cmd_expect)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"dnswatch: {exc}", file=sys.stderr)
        return 2
