"""How often should the tolerant search find anything at all?

For uniform random letter streams, these routines estimate the expected
number of times a random pattern occurs approximately in a random history,
which shows the detector rarely lacks a prediction.  Two counting modes for
the per-window choices are provided: a coarse product bound and an exact
inclusion-exclusion count of bounded compositions.  All counting is exact
big-integer arithmetic; only the final expectation is a ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np


@dataclass(frozen=True)
class ColdStartParams:
    """Model parameters: history length ``l``, pattern length ``k``, letters
    with ``d`` digits (alphabet size ``10**d``), and integer tolerances."""

    l: int
    k: int
    d: int
    alpha: int
    beta: int

    def __post_init__(self) -> None:
        if not (self.l >= self.k >= 1):
            raise ValueError("need l >= k >= 1")
        if self.d < 1:
            raise ValueError("need d >= 1")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("tolerances must be non-negative")


def choice_count_lower(k: int, alpha: int, beta: int) -> int:
    """Coarse count of windows within tolerance of a fixed pattern:
    ``C(k, beta//alpha) * (2*alpha + 1)**(beta//alpha) * max(1, beta % alpha)``.

    This is a product estimate, not an exact enumeration; treat it as the
    low-side mode of :func:`expected_matches`.
    """
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    shifts = beta // alpha
    return comb(k, shifts) * (2 * alpha + 1) ** shifts * max(1, beta % alpha)


def choice_count_ie(k: int, alpha: int, beta: int) -> int:
    """Exact number of ways to write ``beta`` as ``k`` ordered parts, each
    between 1 and ``alpha``, by inclusion-exclusion:
    ``sum_i (-1)**i * C(k, i) * C(beta - i*alpha - 1, k - 1)``.

    ``comb`` with an undersized or negative upper argument counts as 0, which
    is what truncates the alternating sum correctly.
    """
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if k < 1:
        raise ValueError("k must be at least 1")
    total = 0
    for i in range(beta // alpha + 1):
        upper = beta - i * alpha - 1
        if upper < 0:
            term = 0
        else:
            term = comb(k, i) * comb(upper, k - 1)
        total += term if i % 2 == 0 else -term
    return total


_MODES = ("lower", "inclusion_exclusion")


def expected_matches(params: ColdStartParams, mode: str = "lower") -> Fraction:
    """Expected number of approximate occurrences of a random pattern in a
    random history, as an exact rational.

    The count of admissible windows per alignment comes from the selected
    mode, multiplied by the ``l - k + 1`` possible alignments; each
    admissible window is weighted by a letter-collision probability of
    ``10**-(d-1)`` per aligned position.  That exponent convention is fixed
    by the reference arithmetic this estimate reproduces; the simulation in
    :func:`monte_carlo_matches` deliberately does not share it, so the two
    are not comparable.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if mode == "lower":
        choices = choice_count_lower(params.k, params.alpha, params.beta)
    else:
        choices = choice_count_ie(params.k, params.alpha, params.beta)
    alignments = params.l - params.k + 1
    return Fraction(alignments * choices, 10 ** ((params.d - 1) * params.k))


def monte_carlo_matches(params: ColdStartParams, trials: int, seed: int) -> float:
    """Simulate the analysis model directly: draw a uniform pattern and
    history, count alignments accepted under the per-position bound and the
    signed total bound, and average over trials.

    Acceptance at an alignment: every aligned difference has magnitude at
    most ``alpha`` and the SIGNED differences sum to at most ``beta`` (the
    total is taken on original values, not absolute ones, unlike the
    production search).  Overlapping alignments all count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    letters = 10**params.d
    k, l = params.k, params.l
    total = 0
    for _ in range(trials):
        pattern = rng.integers(0, letters, size=k)
        history = rng.integers(0, letters, size=l)
        stacked = np.lib.stride_tricks.sliding_window_view(history, k)
        diffs = stacked - pattern
        ok = (np.abs(diffs) <= params.alpha).all(axis=1) & (diffs.sum(axis=1) <= params.beta)
        total += int(ok.sum())
    return total / trials
