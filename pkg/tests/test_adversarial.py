import numpy as np
import pytest
from fractions import Fraction

from undominated import (
    CyclicInstanceSpec,
    InputError,
    cyclic_instance,
    verify_lower_bound,
)

# hand-derived column v7 of the 20x20 instance (k=3, ell=5), best first
V7_RANKING = [7, 8, 9, 5, 6, 12, 13, 14, 10, 11, 17, 18, 19, 15, 16, 2, 3, 4, 0, 1]


class TestCyclicInstance:
    def test_sizes(self):
        e = cyclic_instance(CyclicInstanceSpec(3, 5))
        assert e.n == 20 and e.m == 20

    def test_voter_zero_identity_ranking(self):
        e = cyclic_instance(CyclicInstanceSpec(3, 5))
        assert list(e.rankings[0]) == list(range(20))

    def test_voter_seven_column(self):
        e = cyclic_instance(CyclicInstanceSpec(3, 5))
        assert list(e.rankings[7]) == V7_RANKING

    def test_small_instance_by_hand(self):
        # k=1, ell=2: voter (0,0) ranks 0,1,2,3
        e = cyclic_instance(CyclicInstanceSpec(1, 2))
        assert e.n == 4 and e.m == 4
        assert list(e.rankings[0]) == [0, 1, 2, 3]
        # voter (1,1) = index 3 shifts both coordinates: top is candidate (1,1)=3
        assert e.rankings[3][0] == 3

    def test_block_shift_symmetry(self):
        # voter (p+1, q) ranks candidate (x+1, y) exactly where voter
        # (p, q) ranks candidate (x, y)
        spec = CyclicInstanceSpec(2, 3)
        e = cyclic_instance(spec)
        k, ell = spec.k, spec.ell
        shift = np.array([((i // ell + 1) % (k + 1)) * ell + i % ell for i in range(e.m)])
        assert np.array_equal(e.rankings[shift], shift[e.rankings])

    def test_spec_validation(self):
        with pytest.raises(InputError):
            CyclicInstanceSpec(0, 5)
        with pytest.raises(InputError):
            CyclicInstanceSpec(2, 1)


class TestVerifyLowerBound:
    def test_tiny_instance(self):
        res = verify_lower_bound(CyclicInstanceSpec(1, 2), 1)
        assert res.worst_fraction >= Fraction(1, 2)
        assert res.certified
        assert len(res.witnesses) == 4

    def test_medium_instance_depths(self):
        spec = CyclicInstanceSpec(2, 3)
        for t in (1, 2):
            res = verify_lower_bound(spec, t)
            assert res.certified
            assert res.bound == Fraction((1 + t) * 2, 3 * 3)

    def test_depth_cannot_exceed_k(self):
        with pytest.raises(InputError):
            verify_lower_bound(CyclicInstanceSpec(2, 3), 3)

    def test_jobs_equivalent(self):
        spec = CyclicInstanceSpec(2, 3)
        a = verify_lower_bound(spec, 1, jobs=1)
        b = verify_lower_bound(spec, 1, jobs=4)
        assert a.worst_fraction == b.worst_fraction
        assert a.witnesses == b.witnesses
