import random

import pytest

from dnswatch.matching import (
    Tolerance,
    incremental_advance,
    incremental_new,
    incremental_search,
    prefix_function,
    search,
)


class TestConstruction:
    def test_initial_state(self):
        m = incremental_new([1, 2, 3], Tolerance(0, 0))
        assert m.effective_pattern == (1.0, 2.0, 3.0)
        assert m.ignored_prefix == 0
        assert len(m.grown_pattern) - m.ignored_prefix == m.initial_length == 3
        assert list(m.prefix_table) == prefix_function([1, 2, 3], 0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            incremental_new([], Tolerance(0, 0))


class TestAdvance:
    def test_effective_length_is_invariant(self):
        m = incremental_new([1, 2, 3, 4], Tolerance(1, 3))
        for v in range(20):
            m = incremental_advance(m, float(v))
            assert len(m.grown_pattern) - m.ignored_prefix == 4
            assert len(m.grown_pattern) < 2 * m.initial_length

    def test_k_advances_trigger_exactly_one_restart(self):
        k = 5
        m = incremental_new([1, 2, 3, 4, 5], Tolerance(0, 0))
        restarts = 0
        for v in range(k):
            before = m.ignored_prefix
            m = incremental_advance(m, float(v + 10))
            if m.ignored_prefix == 0 and before == k - 1:
                restarts += 1
        assert restarts == 1

    def test_restart_state_equals_fresh_matcher(self):
        tol = Tolerance(1, 2)
        k = 4
        values = [3.0, 1.0, 4.0, 1.0]
        m = incremental_new(values, tol)
        fed = list(values)
        for v in [5.0, 9.0, 2.0, 6.0]:
            m = incremental_advance(m, v)
            fed.append(v)
        # after k advances the matcher restarted on the last k values
        assert m == incremental_new(fed[-k:], tol)

    def test_table_extended_by_one_entry(self):
        m = incremental_new([1, 2, 3], Tolerance(0, 0))
        m2 = incremental_advance(m, 4.0)
        assert len(m2.prefix_table) == len(m.prefix_table) + 1
        assert m2.prefix_table[:-1] == m.prefix_table


class TestIncrementalSearch:
    def test_no_wildcards_matches_plain_search(self):
        text = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0]
        m = incremental_new([1, 2], Tolerance(0, 0))
        assert incremental_search(m, text) == search(text, [1, 2], Tolerance(0, 0))

    def test_immediately_after_restart_matches_plain_search(self):
        tol = Tolerance(1, 4)
        m = incremental_new([5.0, 6.0, 7.0], tol)
        for v in [8.0, 9.0, 10.0]:  # third advance restarts
            m = incremental_advance(m, v)
        assert m.ignored_prefix == 0
        rng = random.Random(1)
        text = [float(rng.randint(4, 11)) for _ in range(60)]
        assert incremental_search(m, text) == search(text, list(m.effective_pattern), tol)

    def test_wildcards_contribute_nothing_to_total_error(self):
        # grown pattern [99, 1, 2] with the 99 ignored must match like [1, 2]
        m = incremental_new([99.0, 1.0, 2.0], Tolerance(0, 0))
        m = incremental_advance(m, 2.0)  # now ignores position 0
        assert m.ignored_prefix == 1
        text = [7.0, 1.0, 2.0, 2.0]
        starts = incremental_search(m, text)
        suffix = m.effective_pattern
        for s in starts:
            err = sum(abs(suffix[i] - text[s + i]) for i in range(len(suffix)))
            assert err == 0

    def test_soundness_spacing_fuzz_with_interleaved_advances(self):
        rng = random.Random(31337)
        for _ in range(500):
            k = rng.randint(2, 8)
            tol = Tolerance(rng.uniform(0, 5), rng.uniform(0, 20))
            m = incremental_new([float(rng.randint(0, 11)) for _ in range(k)], tol)
            for _ in range(rng.randint(0, 3 * k)):
                m = incremental_advance(m, float(rng.randint(0, 11)))
                assert len(m.grown_pattern) - m.ignored_prefix == k
            text = [float(rng.randint(0, 11)) for _ in range(rng.randint(k, 80))]
            starts = incremental_search(m, text)
            suffix = m.effective_pattern
            for s in starts:
                err = sum(abs(suffix[i] - text[s + i]) for i in range(k))
                assert err <= tol.beta + 1e-12
            assert all(b - a >= k for a, b in zip(starts, starts[1:]))
