"""Score detections against labeled intervals and sweep configurations.

A detected event that overlaps at least one truth interval is a true
positive (each such event counts once, and every truth interval it touches
is marked hit).  A detected event touching no truth interval is a false
positive.  A truth interval hit by nothing is a false negative.  True
negatives are counted over fixed-width evaluation windows of the timeline
that contain neither a detection nor a truth interval; they affect no
reported rate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .baseline_ar import detect_series_ar
from .detector import AnomalyEvent, DetectorConfig, WindowFlag, detect_series, score_aggregate
from .ingest import GroundTruthInterval
from .model import MinuteSeries, SeriesKey

METHODS = ("asm", "ar")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int


def _overlaps(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    return a_start <= b_end and b_start <= a_end


def confusion(
    detected: Iterable[AnomalyEvent],
    truth: Sequence[GroundTruthInterval],
    timeline: tuple[int, int],
    window: int,
) -> ConfusionCounts:
    """Interval-overlap confusion counts; ``timeline`` is [start, end) in
    minutes and ``window`` the true-negative bucket width."""
    if window < 1:
        raise ValueError("window must be at least 1")
    events = list(detected)
    hit = [False] * len(truth)
    tp = fp = 0
    for ev in events:
        matched = False
        for idx, iv in enumerate(truth):
            if _overlaps(ev.start_minute, ev.end_minute, iv.start_minute, iv.end_minute):
                matched = True
                hit[idx] = True
        if matched:
            tp += 1
        else:
            fp += 1
    fn = hit.count(False)
    start, end = timeline
    tn = 0
    w = start
    while w < end:
        w_end = min(w + window, end) - 1
        busy = any(
            _overlaps(w, w_end, ev.start_minute, ev.end_minute) for ev in events
        ) or any(_overlaps(w, w_end, iv.start_minute, iv.end_minute) for iv in truth)
        if not busy:
            tn += 1
        w += window
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(c: ConfusionCounts) -> dict[str, float]:
    tpr = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else 0.0
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else 1.0
    f1 = 2 * precision * tpr / (precision + tpr) if precision + tpr > 0 else 0.0
    return {"tpr": tpr, "fnr": 1.0 - tpr, "precision": precision, "f1": f1}


@dataclass(frozen=True)
class SweepRow:
    method: str
    lookback_min: int
    score_gt: int
    tpr: float
    fnr: float
    precision: float
    f1: float
    mean_fp: float
    mean_fn: float


SWEEP_HEADER = "method,lookback_min,score_gt,tpr,fnr,precision,f1,mean_fp,mean_fn"


def sweep(
    series_by_key: Mapping[SeriesKey, MinuteSeries],
    truth: Sequence[GroundTruthInterval],
    base_cfg: DetectorConfig,
    lookbacks: Sequence[int],
    score_thresholds: Sequence[int],
    methods: Sequence[str] = METHODS,
) -> list[SweepRow]:
    """Evaluate the full (method, lookback, score threshold) grid.

    Detection runs once per method and lookback; the score thresholds only
    re-aggregate the cached per-window flags.  False counts are also reported
    as per-day means over the timeline span.
    """
    if not series_by_key:
        raise ValueError("no series to evaluate")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    any_series = next(iter(series_by_key.values()))
    timeline = (any_series.start_minute, any_series.start_minute + len(any_series))
    days = max(1.0, (timeline[1] - timeline[0]) / 1440.0)
    rows: list[SweepRow] = []
    for method in methods:
        detect = detect_series if method == "asm" else detect_series_ar
        for lookback in lookbacks:
            cfg = replace(base_cfg, lookback=lookback)
            flags: dict[SeriesKey, list[WindowFlag]] = {
                key: detect(series, cfg) for key, series in sorted(series_by_key.items())
            }
            for threshold in score_thresholds:
                events = score_aggregate(flags, cfg.h, threshold)
                counts = confusion(events, truth, timeline, cfg.stride)
                m = metrics(counts)
                rows.append(
                    SweepRow(
                        method=method,
                        lookback_min=lookback,
                        score_gt=threshold,
                        tpr=m["tpr"],
                        fnr=m["fnr"],
                        precision=m["precision"],
                        f1=m["f1"],
                        mean_fp=counts.fp / days,
                        mean_fn=counts.fn / days,
                    )
                )
    return rows


def sweep_rows_to_csv(rows: Iterable[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(
            f"{r.method},{r.lookback_min},{r.score_gt},{r.tpr!r},{r.fnr!r},"
            f"{r.precision!r},{r.f1!r},{r.mean_fp!r},{r.mean_fn!r}"
        )
    return "\n".join(lines) + "\n"
