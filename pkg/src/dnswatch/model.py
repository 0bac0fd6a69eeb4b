"""Core value types shared across the pipeline.

A traffic feature is observed as one non-negative count per minute.  Each
stream of counts is identified by a :class:`SeriesKey` (a feature, plus an IP
address for the per-IP features) and stored as a gap-free
:class:`MinuteSeries`.  All types here are immutable after construction and
safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class FeatureKind(Enum):
    """Traffic features tracked per minute, with their aggregation scores."""

    A_TOTAL_PACKETS = "A"
    B_MALFORMED_RECEIVED = "B"
    C_TRANSMITTED = "C"

    @property
    def score(self) -> int:
        return _FEATURE_SCORES[self]

    @property
    def per_ip(self) -> bool:
        return self is not FeatureKind.A_TOTAL_PACKETS


_FEATURE_SCORES = {
    FeatureKind.A_TOTAL_PACKETS: 1,
    FeatureKind.B_MALFORMED_RECEIVED: 2,
    FeatureKind.C_TRANSMITTED: 4,
}

_BY_VALUE = {kind.value: kind for kind in FeatureKind}


@dataclass(frozen=True)
class SeriesKey:
    """Identity of one count stream: a feature and, where required, an IP."""

    feature: FeatureKind
    ip: Optional[str] = None

    def __post_init__(self) -> None:
        if self.feature.per_ip and not self.ip:
            raise ValueError(f"feature {self.feature.value} requires an ip")
        if not self.feature.per_ip and self.ip is not None:
            raise ValueError(f"feature {self.feature.value} takes no ip")

    def label(self) -> str:
        if self.ip is None:
            return self.feature.value
        return f"{self.feature.value}:{self.ip}"

    @classmethod
    def from_label(cls, label: str) -> "SeriesKey":
        name, sep, ip = label.partition(":")
        if name not in _BY_VALUE:
            raise ValueError(f"unknown feature in series label {label!r}")
        return cls(_BY_VALUE[name], ip if sep else None)

    def __lt__(self, other: "SeriesKey") -> bool:
        return self.label() < other.label()


@dataclass(frozen=True)
class MinuteSeries:
    """Contiguous per-minute counts for one key.

    ``values[i]`` is the count for epoch minute ``start_minute + i``.  Gaps
    must be zero-filled by the producer; values are stored as floats so that
    predictions and thresholds share one numeric domain.
    """

    key: SeriesKey
    start_minute: int
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValueError("minute counts must be non-negative")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def minute_of(self, index: int) -> int:
        return self.start_minute + index


@dataclass(frozen=True)
class WindowSlice:
    """A view over a contiguous run of minutes inside a parent series."""

    parent: MinuteSeries
    offset: int
    length: int

    @property
    def values(self) -> tuple[float, ...]:
        return self.parent.values[self.offset : self.offset + self.length]

    @property
    def start_minute(self) -> int:
        return self.parent.start_minute + self.offset

    def __len__(self) -> int:
        return self.length


def slice_series(series: MinuteSeries, offset: int, length: int) -> WindowSlice:
    """Window over ``values[offset:offset+length]``; bounds are checked."""
    if length < 0:
        raise ValueError("length must be non-negative")
    if offset < 0 or offset + length > len(series.values):
        raise IndexError(
            f"window [{offset}, {offset + length}) outside series of {len(series.values)} minutes"
        )
    return WindowSlice(series, offset, length)


@dataclass(frozen=True)
class SeriesStats:
    """Running statistics over the prefix of a series consumed so far."""

    maxvalue: float
    count: int


def running_stats(series: MinuteSeries, upto: int) -> SeriesStats:
    """Stats over ``values[:upto]``; the maximum of an empty prefix is 0."""
    if upto < 0 or upto > len(series.values):
        raise IndexError(f"prefix end {upto} outside series of {len(series.values)} minutes")
    prefix = series.values[:upto]
    return SeriesStats(maxvalue=max(prefix) if prefix else 0.0, count=upto)
