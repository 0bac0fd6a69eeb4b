"""Deterministic synthetic traffic with diurnal shape and injected attacks.

The generator emits one event record per packet.  Baseline traffic is
client-to-server transmissions whose hourly rate follows a two-level daily
profile (a busy window at ``high_rate`` packets per hour, ``low_rate``
otherwise).  Hourly totals are distributed over minutes by integer quota so a
noise-free profile produces exactly its arithmetic packet count.  During an
attack the per-minute rate is multiplied; the extra packets come from a
dedicated attacker address as clean transmissions and/or malformed receptions
at a victim address, depending on which features the attack targets.

Everything is driven by one seeded generator, so identical profiles produce
byte-identical event streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .ingest import DnsEventRecord, GroundTruthInterval
from .model import FeatureKind

CLIENT_IPS = ("10.0.0.11", "10.0.0.12", "10.0.0.13", "10.0.0.14")
SERVER_IPS = ("10.0.1.53", "10.0.2.53")
ATTACKER_IP = "198.51.100.66"
VICTIM_IP = SERVER_IPS[0]

ALL_FEATURES = frozenset(FeatureKind)


@dataclass(frozen=True)
class AttackSpec:
    start_minute: int
    duration_minutes: int
    magnitude_multiplier: float
    targets: frozenset[FeatureKind] = ALL_FEATURES

    def covers(self, minute: int) -> bool:
        return self.start_minute <= minute < self.start_minute + self.duration_minutes


def _default_attacks() -> tuple[AttackSpec, ...]:
    # Five half-hour bursts at ten times the base rate, spread over a ten-day
    # horizon and deliberately offset from round half-hours.
    starts = (3490, 5320, 7400, 10970, 13360)
    return tuple(AttackSpec(s, 30, 10.0) for s in starts)


@dataclass(frozen=True)
class SynthProfile:
    days: int = 10
    high_rate: float = 20000.0  # packets per hour inside the busy window
    low_rate: float = 7500.0
    high_window: tuple[int, int] = (14, 24)  # daily hours [start, end)
    noise_fraction: float = 0.05
    attacks: tuple[AttackSpec, ...] = field(default_factory=_default_attacks)
    seed: int = 1234

    def __post_init__(self) -> None:
        if self.days < 1:
            raise ValueError("days must be at least 1")
        if self.high_rate <= 0 or self.low_rate <= 0:
            raise ValueError("rates must be positive")
        if not 0.0 <= self.noise_fraction < 1.0:
            raise ValueError("noise_fraction must lie in [0, 1)")
        lo, hi = self.high_window
        if not (0 <= lo < hi <= 24):
            raise ValueError("high_window must be an hour range within a day")
        horizon = self.days * 1440
        for attack in self.attacks:
            if attack.start_minute < 0 or attack.start_minute + attack.duration_minutes > horizon:
                raise ValueError(f"attack at minute {attack.start_minute} outside the horizon")
            if attack.magnitude_multiplier <= 0 or attack.duration_minutes < 1:
                raise ValueError("attack magnitude and duration must be positive")

    @property
    def total_minutes(self) -> int:
        return self.days * 1440


class SynthResult(NamedTuple):
    events: list[DnsEventRecord]
    truth: list[GroundTruthInterval]


def truth_intervals(profile: SynthProfile) -> list[GroundTruthInterval]:
    return [
        GroundTruthInterval(a.start_minute, a.start_minute + a.duration_minutes - 1, "attack")
        for a in profile.attacks
    ]


def _minute_quota(rate_per_hour: float, minute_in_hour: int) -> int:
    # Integer quota per minute; the 60 quotas of an hour sum to round(rate).
    return round(rate_per_hour * (minute_in_hour + 1) / 60.0) - round(
        rate_per_hour * minute_in_hour / 60.0
    )


def iter_events(profile: SynthProfile) -> Iterator[DnsEventRecord]:
    """Stream records in time order without materializing them."""
    rng = np.random.default_rng(profile.seed)
    clients = CLIENT_IPS
    n_clients = len(clients)
    share = np.full(n_clients, 1.0 / n_clients)
    lo_hour, hi_hour = profile.high_window
    nf = profile.noise_fraction
    for minute in range(profile.total_minutes):
        hour = (minute % 1440) // 60
        rate = profile.high_rate if lo_hour <= hour < hi_hour else profile.low_rate
        quota = _minute_quota(rate, minute % 60)
        noise = rng.uniform(1.0 - nf, 1.0 + nf)
        base_count = round(quota * noise)
        ts = minute * 60
        per_client = rng.multinomial(base_count, share)
        for idx in range(n_clients):
            server = SERVER_IPS[idx % len(SERVER_IPS)]
            client = clients[idx]
            for _ in range(per_client[idx]):
                yield DnsEventRecord(ts, client, server, "tx", False)
        attack = next((a for a in profile.attacks if a.covers(minute)), None)
        if attack is None:
            continue
        extra = round(quota * noise * (attack.magnitude_multiplier - 1.0))
        tx_part = 0
        rx_part = 0
        if FeatureKind.C_TRANSMITTED in attack.targets:
            tx_part = extra
        if FeatureKind.B_MALFORMED_RECEIVED in attack.targets:
            if tx_part:
                tx_part = extra // 2
                rx_part = extra - tx_part
            else:
                rx_part = extra
        plain = extra - tx_part - rx_part  # targets without B or C: scale baseline only
        for _ in range(tx_part):
            yield DnsEventRecord(ts, ATTACKER_IP, VICTIM_IP, "tx", False)
        for _ in range(rx_part):
            yield DnsEventRecord(ts, ATTACKER_IP, VICTIM_IP, "rx", True)
        if plain:
            per_client = rng.multinomial(plain, share)
            for idx in range(n_clients):
                server = SERVER_IPS[idx % len(SERVER_IPS)]
                for _ in range(per_client[idx]):
                    yield DnsEventRecord(ts, clients[idx], server, "tx", False)


def generate(profile: SynthProfile) -> SynthResult:
    """Materialized events plus the attack intervals as ground truth."""
    return SynthResult(events=list(iter_events(profile)), truth=truth_intervals(profile))
