import numpy as np
import pytest
from fractions import Fraction

from undominated import (
    BuilderOptions,
    Committee,
    InputError,
    NotConvergedError,
    SolverOptions,
    build_iterative,
    build_one_shot,
    build_t1,
    choose_params,
    coverage,
    make_threshold,
    omega,
    random_election,
    solve,
)
from undominated.bounds import alpha_k


class TestCoverage:
    def test_free_prices_cover_tops(self, e3):
        prices = np.zeros((3, 3))
        cm = coverage(e3, Committee.of([0]), prices, 1, 0.1)
        assert list(cm.boundary) == [0, 1, 2]
        assert list(cm.covered) == [True, False, False]

    def test_everything_expensive_covers_all(self, e3):
        prices = np.ones((3, 3))
        cm = coverage(e3, Committee.of([1]), prices, 1, 0.1)
        assert list(cm.boundary) == [-1, -1, -1]
        assert cm.covered.all()

    def test_depth_two_needs_two_better(self, e3):
        # boundary of voter 2 forced to candidate 2 (its top)
        prices = np.zeros((3, 3))
        cm = coverage(e3, Committee.of([0, 1]), prices, 2, 0.1)
        assert cm.boundary[2] == 2
        assert not cm.covered[2]  # no member of {a, b} beats c for voter 2

    def test_outside_mask_conservative(self, e3):
        prices = np.ones((3, 3))
        mask = np.array([True, False, False])
        cm = coverage(e3, Committee.of([0]), prices, 1, 0.1, outside_mask=mask)
        assert not cm.covered[0] and cm.covered[1]


class TestBuildT1:
    def test_e3_passes_three_quarters(self, e3):
        r = build_t1(e3, 2, 0.5, 1e-3, BuilderOptions(seed=1))
        assert r.report.passed
        assert r.report.alpha == Fraction(3, 4)
        assert r.committee.size <= 2

    def test_accepted_draw_meets_target(self, e3):
        r = build_t1(e3, 2, 0.5, 1e-3, BuilderOptions(seed=1))
        if r.accepted and r.accepted_seed >= 0:
            assert r.uncovered <= r.target

    def test_beta_zero_fast_path(self, e3):
        r = build_t1(e3, 1, 0.0)
        assert r.committee.size == 1
        assert r.report.passed  # alpha = 1 admits everything

    def test_k_bounds(self, e3):
        with pytest.raises(InputError):
            build_t1(e3, 0, 0.5)
        with pytest.raises(InputError):
            build_t1(e3, 4, 0.5)

    def test_propagates_solver_failure(self, e3):
        weak = SolverOptions(max_iters=2, restarts=1, scratch_polish_sigmas=(),
                             stall_window=10**9)
        with pytest.raises(NotConvergedError):
            build_t1(e3, 2, 0.5, 1e-3, BuilderOptions(seed=0, solver=weak))

    def test_determinism(self, rng):
        e = random_election(12, 8, rng)
        a = build_t1(e, 3, 0.4, 1e-3, BuilderOptions(seed=9))
        b = build_t1(e, 3, 0.4, 1e-3, BuilderOptions(seed=9))
        assert a.committee == b.committee
        assert a.accepted_seed == b.accepted_seed


class TestBuildOneShot:
    def test_feasible_parameters_accepted(self):
        # gamma=2, B=5: 0.8 + omega(2,2) ~ 0.999 <= 1
        assert 2 * 2 / 5 + omega(2, 2) <= 1.0
        e = random_election(20, 12, np.random.default_rng(1))
        r = build_one_shot(e, 2, 1, 2.0, 5, 1e-3, BuilderOptions(seed=4))
        assert r.report.passed  # alpha = 1 is vacuous
        assert r.committee.size <= 5

    def test_infeasible_parameters_refused(self):
        e = random_election(10, 8, np.random.default_rng(2))
        with pytest.raises(InputError) as exc:
            build_one_shot(e, 2, 1, 1.5, 4, 1e-3)
        assert "infeasible" in str(exc.value)

    def test_budget_leq_m(self):
        e = random_election(6, 4, np.random.default_rng(3))
        with pytest.raises(InputError):
            build_one_shot(e, 2, 1, 1.0, 5, 1e-3)

    def test_saturated_candidates_always_included(self):
        # budget == m saturates everyone: the committee must be all of A
        e = random_election(8, 5, np.random.default_rng(4))
        r = build_one_shot(e, 2, 1, 2.0, 5, 1e-3, BuilderOptions(seed=5))
        assert r.committee.members == (0, 1, 2, 3, 4)


class TestBuildIterative:
    def test_b0_formula(self):
        w = omega(2.0, 2)
        e = random_election(30, 24, np.random.default_rng(5))
        r = build_iterative(e, 2, 0.9, 2.0, 4.0, 1e-3, BuilderOptions(seed=6))
        assert r.params["b0"] == pytest.approx(2 * 2 / (0.9 * (1 - w * 4.0)))
        assert r.params["b0"] == pytest.approx(21.85, abs=0.1)

    def test_trace_invariants(self):
        e = random_election(40, 24, np.random.default_rng(6))
        r = build_iterative(e, 2, 0.9, 2.0, 4.0, 1e-3, BuilderOptions(seed=7))
        w = omega(2.0, 2)
        b0 = r.params["b0"]
        for rec in r.trace.rounds:
            assert rec.budget == pytest.approx(b0 / 4.0**rec.index)
            assert rec.uncovered_after <= w * rec.voters + 1
        total = sum(min(rec.budget, e.m) + 1 for rec in r.trace.rounds)
        assert r.committee.size <= total

    def test_parameter_checks(self):
        e = random_election(5, 6, np.random.default_rng(7))
        with pytest.raises(InputError):
            build_iterative(e, 2, 0.5, 2.0, 6.0)  # omega * tau > 1
        with pytest.raises(InputError):
            build_iterative(e, 2, 0.5, 2.0, 1.0)  # tau must exceed 1
        with pytest.raises(InputError):
            build_iterative(e, 1, 0.5, 2.0, 4.0)  # depth 1 has its own path

    def test_verifies_at_inflated_alpha(self):
        e = random_election(25, 24, np.random.default_rng(8))
        r = build_iterative(e, 2, 0.9, 2.0, 4.0, 1e-3, BuilderOptions(seed=8))
        assert r.effective_alpha == min(Fraction(1), Fraction(9, 10) / Fraction(999, 1000))
        assert r.report.passed


class TestChooseParams:
    def test_condorcet_five(self):
        s = choose_params(1, Fraction(1, 2))
        assert s.path == "t1" and s.params["k"] == 5
        assert s.params["beta"] == pytest.approx(alpha_k(5)[0])

    def test_one_shot_above_crossover(self):
        s = choose_params(2, "0.1")
        assert s.path == "one_shot"

    def test_iterative_below_crossover(self):
        s = choose_params(2, "0.02")
        assert s.path == "iterative"

    def test_alpha_validation(self):
        with pytest.raises(InputError):
            choose_params(2, 0)


def test_equilibrium_reuse_between_builder_and_coverage(e3):
    # the builder's boundary logic agrees with the public coverage() map
    res = solve(e3, make_threshold(0.5, 0.01), opts=SolverOptions(seed=2))
    cm = coverage(e3, Committee.of([0, 1]), res.prices, 1, 0.01)
    assert cm.covered.shape == (3,)


class TestTheoryBounds:
    def test_t1_dissent_bound_on_accepted_builds(self):
        # accepted draws obey: dissent <= floor((beta/(1-eps) + (1-beta)^k) n)
        import math
        from undominated._util import sub_rng

        rng = sub_rng(321, 0)
        eps = 1e-3
        checked = 0
        for i in range(12):
            n = int(rng.integers(8, 40))
            m = int(rng.integers(6, 16))
            k = int(rng.integers(2, min(6, m)))
            beta, _ = alpha_k(k)
            e = random_election(n, m, rng)
            r = build_t1(e, k, beta, eps, BuilderOptions(seed=i))
            if not (r.accepted and r.accepted_seed >= 0):
                continue
            checked += 1
            assert r.uncovered <= (1 - beta) ** k * n
            bound = math.floor((beta / (1 - eps) + (1 - beta) ** k) * n)
            assert r.report.max_dissent <= bound
        assert checked >= 8  # the sampling path should dominate

    def test_one_shot_includes_partially_saturated_allocations(self):
        rng = np.random.default_rng(77)
        found = 0
        for i in range(8):
            e = random_election(25, 9, rng)
            r = build_one_shot(e, 2, 1, 2.0, 5, 1e-3, BuilderOptions(seed=i))
            y = r.equilibrium.allocation.y
            saturated = np.nonzero(y >= 1 - 1e-9)[0]
            if saturated.size:
                found += 1
                for a in saturated:
                    assert int(a) in r.committee
        assert found >= 1
