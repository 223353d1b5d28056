import math

import numpy as np
import pytest

from undominated import InputError, dependent_round, rounding_statistics, sample_iid
from undominated._util import sub_rng


class TestSampleIid:
    def test_point_mass(self, rng):
        for _ in range(20):
            c = sample_iid([1.0, 0.0, 0.0], 3, rng)
            assert c.members == (0,)

    def test_k_validation(self, rng):
        with pytest.raises(InputError):
            sample_iid([0.5, 0.5], 0, rng)

    def test_lottery_validation(self, rng):
        with pytest.raises(InputError):
            sample_iid([0.7, 0.7], 1, rng)
        with pytest.raises(InputError):
            sample_iid([-0.1, 1.1], 1, rng)

    def test_marginal_frequency(self):
        rng = sub_rng(5, 1)
        n = 20_000
        hits = sum(sample_iid([0.5, 0.5], 1, rng).members == (0,) for _ in range(n))
        sigma = math.sqrt(0.25 / n)
        assert abs(hits / n - 0.5) <= 4 * sigma

    def test_collision_probability(self):
        # two draws from uniform-4 collide with probability 1/4
        rng = sub_rng(6, 1)
        n = 20_000
        collisions = sum(len(sample_iid([0.25] * 4, 2, rng)) == 1 for _ in range(n))
        sigma = math.sqrt(0.25 * 0.75 / n)
        assert abs(collisions / n - 0.25) <= 4 * sigma


class TestDependentRound:
    def test_integral_passthrough(self, rng):
        out = dependent_round([1.0, 0.0, 1.0, 0.0], rng)
        assert np.array_equal(out.selected, [1, 0, 1, 0])

    def test_two_way_split(self):
        rng = sub_rng(7, 1)
        n = 20_000
        picks = np.zeros(2)
        for _ in range(n):
            out = dependent_round([0.5, 0.5], rng)
            assert out.size == 1  # exactly one of the two, every draw
            picks += out.selected
        sigma = math.sqrt(0.25 / n)
        assert abs(picks[0] / n - 0.5) <= 4 * sigma

    def test_cardinality_every_draw(self):
        rng = sub_rng(8, 1)
        y = np.array([0.7, 0.8, 0.8])
        for _ in range(2000):
            out = dependent_round(y, rng)
            assert out.size in (2, 3)

    def test_entry_above_one_rejected(self, rng):
        with pytest.raises(InputError):
            dependent_round([1.2, 0.3], rng)

    def test_determinism(self):
        a = dependent_round([0.3, 0.4, 0.8, 0.5], sub_rng(9, 1))
        b = dependent_round([0.3, 0.4, 0.8, 0.5], sub_rng(9, 1))
        assert np.array_equal(a.selected, b.selected)

    def test_statistics_helper(self):
        y = np.array([0.7, 0.8, 0.8])
        freqs, cards, zero_freqs = rounding_statistics(
            y, 20_000, sub_rng(10, 1), subsets=[[0, 1]])
        assert set(np.unique(cards)) <= {2, 3}
        for a in range(3):
            sigma = math.sqrt(y[a] * (1 - y[a]) / 20_000)
            assert abs(freqs[a] - y[a]) <= 4 * sigma
        # negative correlation: Pr[both zero] <= (1-0.7)(1-0.8)
        bound = 0.3 * 0.2
        sigma = math.sqrt(bound * (1 - bound) / 20_000)
        assert zero_freqs[0] <= bound + 4 * sigma
