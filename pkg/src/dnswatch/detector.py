"""Per-series detection loop and cross-feature score aggregation.

For each evaluation time the last ``k`` minutes form the pattern, the next
``h`` minutes form the observed window, and the preceding ``lookback``
minutes form the history searched for approximate occurrences of the
pattern.  The post-match average becomes the prediction; a window is flagged
when the prediction and the observation disagree on BOTH measures: mean
squared error above the adaptive threshold and cosine similarity below the
configured cutoff.  The two measures are deliberately complementary: the
squared error is scale dependent while the cosine is scale invariant, so
noise that inflates one rarely clears both.

Threshold adaptation: the error threshold is the squared logarithm, in base
``10 - epsilon``, of the largest count seen so far in the series; the search
tolerances scale from it with the pattern mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .matching import Tolerance, search
from .model import FeatureKind, MinuteSeries, SeriesKey, SeriesStats
from .predictor import cold_start_decision, predict


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable parameters of the detection loop.

    ``h`` defaults to ``k`` and ``stride`` defaults to ``h`` (non-overlapping
    observed windows).  ``lookback`` must leave room for one pattern plus one
    observed window.
    """

    k: int = 24
    h: Optional[int] = None
    lookback: int = 1440
    epsilon: float = 0.1
    cos_threshold: float = 0.9
    score_threshold: int = 4
    stride: Optional[int] = None
    cold_start_factor: float = 10.0
    restart_multiple: float = 2.0

    def __post_init__(self) -> None:
        if self.h is None:
            object.__setattr__(self, "h", self.k)
        if self.stride is None:
            object.__setattr__(self, "stride", self.h)
        if self.k < 1 or self.h < 1:
            raise ValueError("k and h must be at least 1")
        if self.lookback < self.k + self.h:
            raise ValueError("lookback must be at least k + h")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        if not 0.0 < self.cos_threshold <= 1.0:
            raise ValueError("cos_threshold must lie in (0, 1]")
        if self.cold_start_factor <= 0:
            raise ValueError("cold_start_factor must be positive")
        if self.restart_multiple < 1.0:
            raise ValueError("restart_multiple must be at least 1")


@dataclass(frozen=True)
class ThresholdSet:
    """Adaptive error threshold and the search tolerances derived from it."""

    error_threshold: float
    alpha: float
    beta: float


def mse(pred: Sequence[float], observed: Sequence[float]) -> float:
    """Mean squared error between two equal-length windows."""
    if len(pred) != len(observed) or len(pred) == 0:
        raise ValueError("windows must be non-empty and equally long")
    total = 0.0
    for p, e in zip(pred, observed):
        d = p - e
        total += d * d
    return total / len(pred)


def cosine(pred: Sequence[float], observed: Sequence[float]) -> float:
    """Cosine similarity; scale invariant.

    The prediction must not be the zero vector.  A zero observed window
    returns 0 by convention; callers are expected to short-circuit the
    all-zero observation case before consulting similarity.
    """
    if len(pred) != len(observed) or len(pred) == 0:
        raise ValueError("windows must be non-empty and equally long")
    if all(p == 0 for p in pred):
        raise ValueError("prediction must not be the zero vector")
    dot = 0.0
    pp = 0.0
    ee = 0.0
    for p, e in zip(pred, observed):
        dot += p * e
        pp += p * p
        ee += e * e
    if ee == 0.0:
        return 0.0
    return dot / math.sqrt(pp * ee)


def compute_thresholds(
    stats: SeriesStats, pattern: Sequence[float], epsilon: float, floor: float = 1.0
) -> ThresholdSet:
    """Error threshold from the running maximum, search tolerances from it.

    error_threshold = (log base (10 - epsilon) of maxvalue) squared, clamped
    below at ``floor`` while the maximum has not exceeded the base;
    alpha = error_threshold * (1 + epsilon) * mean(pattern) / len(pattern);
    beta  = error_threshold * mean(pattern).
    """
    if len(pattern) == 0:
        raise ValueError("pattern must be non-empty")
    base = 10.0 - epsilon
    if stats.maxvalue <= base:
        err = floor
    else:
        err = (math.log(stats.maxvalue) / math.log(base)) ** 2
    mean_p = sum(pattern) / len(pattern)
    return ThresholdSet(
        error_threshold=err,
        alpha=err * (1.0 + epsilon) * mean_p / len(pattern),
        beta=err * mean_p,
    )


@dataclass(frozen=True)
class WindowFlag:
    """Outcome of one evaluation window of one series.

    ``window_start`` is the epoch minute of the first observed minute.  On
    the cold-start path no prediction exists, so ``mse`` and ``cosine`` are
    absent.
    """

    window_start: int
    flagged: bool
    mse: Optional[float]
    cosine: Optional[float]
    cold_start: bool


WindowPredictor = Callable[[int, int, ThresholdSet], Optional[Sequence[float]]]


def _asm_predictor(values: list[float], cfg: DetectorConfig) -> WindowPredictor:
    def predict_window(lo: int, t: int, thr: ThresholdSet) -> Optional[Sequence[float]]:
        history = values[lo:t]
        pattern = values[t - cfg.k : t]
        starts = search(history, pattern, Tolerance(thr.alpha, thr.beta))
        pred = predict(history, starts, cfg.k, cfg.h)
        return pred.values

    return predict_window


def _detect_loop(
    series: MinuteSeries, cfg: DetectorConfig, predictor: WindowPredictor
) -> list[WindowFlag]:
    values = [float(v) for v in series.values]
    n = len(values)
    minimum = cfg.k + cfg.h + 1
    if n < minimum:
        raise ValueError(f"series must have at least {minimum} minutes, got {n}")
    flags: list[WindowFlag] = []
    maxvalue = 0.0
    scanned = 0
    for t in range(cfg.k, n - cfg.h + 1, cfg.stride):
        while scanned < t:
            if values[scanned] > maxvalue:
                maxvalue = values[scanned]
            scanned += 1
        pattern = values[t - cfg.k : t]
        observed = values[t : t + cfg.h]
        thr = compute_thresholds(SeriesStats(maxvalue, t), pattern, cfg.epsilon)
        minute = series.start_minute + t
        predicted = predictor(max(0, t - cfg.lookback), t, thr)
        if predicted is None:
            flagged = cold_start_decision(pattern, observed, cfg.cold_start_factor)
            flags.append(WindowFlag(minute, flagged, None, None, True))
            continue
        err = mse(predicted, observed)
        if any(p != 0 for p in predicted):
            cos = cosine(predicted, observed)
        else:
            cos = 0.0  # zero prediction carries no direction; treat as dissimilar
        if all(v == 0 for v in observed):
            flagged = False
        else:
            flagged = err > thr.error_threshold and cos < cfg.cos_threshold
        flags.append(WindowFlag(minute, flagged, err, cos, False))
    return flags


def detect_series(series: MinuteSeries, cfg: DetectorConfig) -> list[WindowFlag]:
    """Run match-predict-compare over every evaluation window of a series."""
    values = [float(v) for v in series.values]
    return _detect_loop(series, cfg, _asm_predictor(values, cfg))


@dataclass(frozen=True)
class AnomalyEvent:
    """A reported anomaly interval after cross-feature aggregation.

    ``end_minute`` is inclusive.  ``mse`` is the largest error among the
    contributing flagged windows (0 when all were cold-start flags) and
    ``cosine`` the smallest similarity (absent when all were cold-start).
    """

    key: str
    start_minute: int
    end_minute: int
    mse: float
    cosine: Optional[float]
    features: frozenset[FeatureKind]
    score: int


AGGREGATE_KEY = "aggregate"


def score_aggregate(
    flags_by_key: Mapping["SeriesKey", Iterable[WindowFlag]],
    h: int,
    score_threshold: int,
) -> list[AnomalyEvent]:
    """Merge per-series flags into scored anomaly events.

    A feature counts as triggered at a minute when any series of that feature
    is flagged in a window covering the minute.  Minutes whose summed feature
    scores exceed ``score_threshold`` are grouped into maximal consecutive
    runs, one event per run, carrying the union of triggered features.
    """
    triggered: dict[int, set[FeatureKind]] = {}
    worst_mse: dict[int, float] = {}
    worst_cos: dict[int, float] = {}
    for key in sorted(flags_by_key, key=lambda k: k.label()):
        for flag in flags_by_key[key]:
            if not flag.flagged:
                continue
            for minute in range(flag.window_start, flag.window_start + h):
                triggered.setdefault(minute, set()).add(key.feature)
                if flag.mse is not None:
                    worst_mse[minute] = max(worst_mse.get(minute, 0.0), flag.mse)
                if flag.cosine is not None:
                    worst_cos[minute] = min(worst_cos.get(minute, 1.0), flag.cosine)
    hot = sorted(
        m for m, feats in triggered.items() if sum(f.score for f in feats) > score_threshold
    )
    events: list[AnomalyEvent] = []
    run_start = None
    prev = None
    for minute in hot + [None]:
        if run_start is not None and (minute is None or minute != prev + 1):
            span = range(run_start, prev + 1)
            feats = frozenset().union(*(triggered[m] for m in span))
            mses = [worst_mse[m] for m in span if m in worst_mse]
            coses = [worst_cos[m] for m in span if m in worst_cos]
            events.append(
                AnomalyEvent(
                    key=AGGREGATE_KEY,
                    start_minute=run_start,
                    end_minute=prev,
                    mse=max(mses) if mses else 0.0,
                    cosine=min(coses) if coses else None,
                    features=feats,
                    score=sum(f.score for f in feats),
                )
            )
            run_start = None
        if minute is not None and run_start is None:
            run_start = minute
        prev = minute
    return events
