"""Parse event and ground-truth files, aggregate events into minute series.

Event files are CSV with header ``ts_epoch_s,src_ip,dst_ip,direction,malformed``
(direction ``tx`` or ``rx``, malformed ``0`` or ``1``).  Ground-truth files
are CSV with header ``start_minute,end_minute,label``.  Parsing is streaming
and single pass; malformed lines raise :class:`ParseError` naming the line.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, NamedTuple

from .model import FeatureKind, MinuteSeries, SeriesKey

EVENTS_HEADER = ["ts_epoch_s", "src_ip", "dst_ip", "direction", "malformed"]
TRUTH_HEADER = ["start_minute", "end_minute", "label"]

_DIRECTIONS = ("tx", "rx")


class ParseError(ValueError):
    """Input file violates the expected format."""


class DnsEventRecord(NamedTuple):
    ts: int  # epoch seconds
    src_ip: str
    dst_ip: str
    direction: str  # "tx" or "rx" relative to the monitored subnet
    malformed: bool


@dataclass(frozen=True)
class GroundTruthInterval:
    start_minute: int
    end_minute: int  # inclusive
    label: str = ""

    def __post_init__(self) -> None:
        if self.end_minute < self.start_minute:
            raise ValueError("interval end before start")


def parse_events(stream: IO[str]) -> Iterator[DnsEventRecord]:
    """Yield records in file order; raises on the first bad line."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != EVENTS_HEADER:
        raise ParseError(f"bad events header: expected {','.join(EVENTS_HEADER)}, got {header}")
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise ParseError(f"line {lineno}: expected 5 fields, got {len(row)}")
        ts_raw, src, dst, direction, malformed = row
        try:
            ts = int(float(ts_raw))
        except ValueError:
            raise ParseError(f"line {lineno}: unparsable timestamp {ts_raw!r}") from None
        if ts < 0:
            raise ParseError(f"line {lineno}: negative timestamp {ts_raw!r}")
        if direction not in _DIRECTIONS:
            raise ParseError(
                f"line {lineno}: field 'direction' must be tx or rx, got {direction!r}"
            )
        if malformed not in ("0", "1"):
            raise ParseError(f"line {lineno}: field 'malformed' must be 0 or 1, got {malformed!r}")
        yield DnsEventRecord(ts, src, dst, direction, malformed == "1")


def write_events(stream: IO[str], records: Iterable[DnsEventRecord]) -> int:
    writer = csv.writer(stream)
    writer.writerow(EVENTS_HEADER)
    count = 0
    for rec in records:
        writer.writerow([rec.ts, rec.src_ip, rec.dst_ip, rec.direction, int(rec.malformed)])
        count += 1
    return count


def parse_ground_truth(stream: IO[str]) -> list[GroundTruthInterval]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != TRUTH_HEADER:
        raise ParseError(f"bad truth header: expected {','.join(TRUTH_HEADER)}, got {header}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            start, end = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"line {lineno}: unparsable minute bounds {row[:2]}") from None
        if end < start:
            raise ParseError(f"line {lineno}: end_minute {end} before start_minute {start}")
        out.append(GroundTruthInterval(start, end, row[2]))
    return out


def write_ground_truth(stream: IO[str], intervals: Iterable[GroundTruthInterval]) -> None:
    writer = csv.writer(stream)
    writer.writerow(TRUTH_HEADER)
    for iv in intervals:
        writer.writerow([iv.start_minute, iv.end_minute, iv.label])


def _zero_filled(counts: dict[int, int], lo: int, hi: int) -> tuple[float, ...]:
    return tuple(float(counts.get(m, 0)) for m in range(lo, hi + 1))


def aggregate_all(
    records: Iterable[DnsEventRecord],
    *,
    malformed_key: str = "dst_ip",
    transmit_key: str = "src_ip",
) -> dict[SeriesKey, MinuteSeries]:
    """Aggregate one pass of records into all three feature families.

    Feature A counts every record per minute globally; feature B counts
    received malformed records per minute keyed by ``malformed_key`` (the
    receiver by default); feature C counts transmitted records per minute
    keyed by ``transmit_key`` (the sender by default).  Every produced series
    is zero-filled over the minute span of the whole record set.
    """
    if malformed_key not in ("src_ip", "dst_ip") or transmit_key not in ("src_ip", "dst_ip"):
        raise ValueError("keying fields must be src_ip or dst_ip")
    b_from_dst = malformed_key == "dst_ip"
    c_from_src = transmit_key == "src_ip"
    total: dict[int, int] = {}
    malformed_rx: dict[str, dict[int, int]] = {}
    transmitted: dict[str, dict[int, int]] = {}
    lo = hi = None
    for rec in records:
        minute = rec.ts // 60
        if lo is None or minute < lo:
            lo = minute
        if hi is None or minute > hi:
            hi = minute
        total[minute] = total.get(minute, 0) + 1
        if rec.direction == "rx" and rec.malformed:
            per = malformed_rx.setdefault(rec.dst_ip if b_from_dst else rec.src_ip, {})
            per[minute] = per.get(minute, 0) + 1
        if rec.direction == "tx":
            per = transmitted.setdefault(rec.src_ip if c_from_src else rec.dst_ip, {})
            per[minute] = per.get(minute, 0) + 1
    if lo is None:
        return {}
    out: dict[SeriesKey, MinuteSeries] = {}
    key_a = SeriesKey(FeatureKind.A_TOTAL_PACKETS)
    out[key_a] = MinuteSeries(key_a, lo, _zero_filled(total, lo, hi))
    for ip in sorted(malformed_rx):
        key = SeriesKey(FeatureKind.B_MALFORMED_RECEIVED, ip)
        out[key] = MinuteSeries(key, lo, _zero_filled(malformed_rx[ip], lo, hi))
    for ip in sorted(transmitted):
        key = SeriesKey(FeatureKind.C_TRANSMITTED, ip)
        out[key] = MinuteSeries(key, lo, _zero_filled(transmitted[ip], lo, hi))
    return out


def aggregate(
    records: Iterable[DnsEventRecord], feature: FeatureKind
) -> dict[SeriesKey, MinuteSeries]:
    """Aggregate a single feature family; see :func:`aggregate_all`."""
    full = aggregate_all(records)
    return {key: series for key, series in full.items() if key.feature is feature}
