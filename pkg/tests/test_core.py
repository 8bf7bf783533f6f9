import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saea.core import (incremental_leading_ones, leading_ones, make_rng,
                       mutate_k, random_bitvector, sample_binomial,
                       sample_binomial_positive)


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


class TestLeadingOnes:
    def test_all_ones(self):
        assert leading_ones(bits("1111")) == 4

    def test_leading_zero(self):
        assert leading_ones(bits("0101")) == 0

    def test_prefix(self):
        assert leading_ones(bits("1101")) == 2

    def test_empty_tail_patterns(self):
        assert leading_ones(bits("10")) == 1
        assert leading_ones(bits("0")) == 0


class TestIncremental:
    # spec positions are 1-based; indices here are 0-based
    def test_gap_closed(self):
        assert incremental_leading_ones(bits("1101"), 2, [2]) == 4

    def test_prefix_destroyed(self):
        assert incremental_leading_ones(bits("1101"), 2, [0]) == 0

    def test_tail_flip_no_change(self):
        assert incremental_leading_ones(bits("1101"), 2, [3]) == 2

    def test_empty_flip_set(self):
        assert incremental_leading_ones(bits("1101"), 2, []) == 2

    @given(st.data())
    @settings(max_examples=300, deadline=None)
    def test_matches_brute_force(self, data):
        n = data.draw(st.integers(1, 64))
        x = np.array(data.draw(st.lists(st.integers(0, 1),
                                        min_size=n, max_size=n)),
                     dtype=np.uint8)
        k = data.draw(st.integers(0, n))
        flips = sorted(data.draw(st.sets(st.integers(0, n - 1),
                                         min_size=k, max_size=k)))
        y = x.copy()
        for j in flips:
            y[j] ^= 1
        assert incremental_leading_ones(x, leading_ones(x), flips) == \
            leading_ones(y)


class TestSampleBinomial:
    def test_zero_rate(self):
        rng = make_rng(1)
        assert all(sample_binomial(8, 0.0, rng) == 0 for _ in range(50))

    def test_rate_one(self):
        rng = make_rng(1)
        assert all(sample_binomial(8, 1.0, rng) == 8 for _ in range(50))

    def test_mean(self):
        # exact binomial mean n*rho = 2
        rng = make_rng(42)
        draws = [sample_binomial(4, 0.5, rng) for _ in range(1_000_000)]
        assert abs(np.mean(draws) - 2.0) < 0.01

    def test_reproducible(self):
        a = [sample_binomial(10, 0.3, make_rng(7)) for _ in range(5)]
        b = [sample_binomial(10, 0.3, make_rng(7)) for _ in range(5)]
        assert a == b


class TestSampleBinomialPositive:
    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            sample_binomial_positive(4, 0.0, make_rng(1))

    def test_n_one(self):
        rng = make_rng(2)
        assert all(sample_binomial_positive(1, r, rng) == 1
                   for r in (1e-9, 0.3, 1.0) for _ in range(20))

    def test_two_bits_half(self):
        # Bin(2, 1/2) conditioned on k>=1: Pr[1]=2/3, Pr[2]=1/3
        rng = make_rng(3)
        draws = np.array([sample_binomial_positive(2, 0.5, rng)
                          for _ in range(200_000)])
        assert abs(np.mean(draws == 1) - 2 / 3) < 0.005
        assert abs(np.mean(draws == 2) - 1 / 3) < 0.005

    def test_tiny_rate_gives_single_flip(self):
        rng = make_rng(4)
        draws = np.array([sample_binomial_positive(4, 1e-6, rng)
                          for _ in range(100_000)])
        assert np.all(draws >= 1)
        assert np.mean(draws == 1) >= 0.999

    def test_never_zero_large_rate(self):
        rng = make_rng(5)
        assert all(sample_binomial_positive(50, 0.4, rng) >= 1
                   for _ in range(2000))


class TestMutateK:
    def test_k_zero_identity(self):
        x = bits("10110")
        y, flips = mutate_k(x, 0, make_rng(1))
        assert np.array_equal(x, y) and len(flips) == 0

    def test_k_n_complement(self):
        x = bits("10110")
        y, flips = mutate_k(x, 5, make_rng(1))
        assert np.array_equal(y, 1 - x) and len(flips) == 5

    def test_parent_unchanged(self):
        x = bits("111000")
        snapshot = x.copy()
        mutate_k(x, 3, make_rng(9))
        assert np.array_equal(x, snapshot)

    def test_involution(self):
        rng = make_rng(11)
        x = random_bitvector(40, rng)
        y, flips = mutate_k(x, 7, rng)
        z = y.copy()
        z[flips] ^= 1
        assert np.array_equal(z, x)

    def test_flip_count_exact(self):
        rng = make_rng(12)
        for k in (1, 3, 17, 40):
            x = random_bitvector(40, rng)
            y, flips = mutate_k(x, k, rng)
            assert int(np.sum(x != y)) == k
            assert len(set(flips.tolist())) == k

    def test_single_flip_uniform(self):
        # each of 3 positions hit with frequency 1/3 over 1e6 draws
        rng = make_rng(13)
        counts = np.zeros(3)
        x = bits("000")
        for _ in range(1_000_000):
            _, flips = mutate_k(x, 1, rng)
            counts[flips[0]] += 1
        freqs = counts / counts.sum()
        assert np.all(np.abs(freqs - 1 / 3) < 0.01)
