import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from undominated import (
    Election,
    InputError,
    SolverOptions,
    boundary_candidate,
    demand_lottery,
    make_threshold,
    make_uniform_tail,
    producer_best_response,
    random_election,
    solve,
)


class TestDemand:
    def test_uniform_tail_split(self):
        x = demand_lottery([0, 1], [0.95, 0.0], make_uniform_tail(0.1))
        assert np.allclose(x, [0.5, 0.5, 0.0])

    def test_flat_region_leaks_to_outside(self):
        x = demand_lottery([0, 1], [0.9, 0.1], make_threshold(0.5, 0.01))
        assert np.allclose(x, [0.5, 0.0, 0.5])

    def test_all_free_takes_favorite(self):
        x = demand_lottery([2, 0, 1], [0.0, 0.0, 0.0], make_threshold(0.3, 0.05))
        assert np.allclose(x, [0.0, 0.0, 1.0, 0.0])

    def test_price_validation(self):
        with pytest.raises(InputError):
            demand_lottery([0, 1], [1.2, 0.0], make_uniform_tail(0.1))

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_lottery_normalization(self, data):
        m = data.draw(st.integers(1, 6))
        ranking = data.draw(st.permutations(range(m)))
        prices = [data.draw(st.floats(0, 1)) for _ in range(m)]
        d = make_threshold(data.draw(st.floats(0.05, 0.95)), 0.01)
        x = demand_lottery(ranking, prices, d)
        assert abs(float(x.sum()) - 1.0) <= 1e-12
        assert np.all(x >= 0)

    def test_monotone_in_own_price(self):
        d = make_threshold(0.5, 0.05)
        ranking = [0, 1, 2]
        base = [0.3, 0.5, 0.2]
        for a in range(3):
            last = None
            for p in np.linspace(0, 1, 41):
                prices = list(base)
                prices[a] = p
                xa = demand_lottery(ranking, prices, d)[a]
                if last is not None:
                    assert xa <= last + 1e-12
                last = xa


class TestProducer:
    def test_uncapped_argmax(self):
        a = producer_best_response([3, 1, 2], 1.0, False)
        assert np.allclose(a.y, [1, 0, 0])

    def test_capped_greedy_fill(self):
        a = producer_best_response([3, 1, 2], 2.5, True)
        assert np.allclose(a.y, [1.0, 0.5, 1.0])

    def test_tie_breaks_low_index(self):
        a = producer_best_response([2, 2, 0], 1.0, False)
        assert np.allclose(a.y, [1, 0, 0])

    def test_capped_needs_budget_at_most_m(self):
        with pytest.raises(InputError):
            producer_best_response([1, 1, 1], 4.0, True)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_attains_lp_optimum(self, data):
        m = data.draw(st.integers(1, 8))
        agg = np.array([data.draw(st.floats(0, 5)) for _ in range(m)])
        capped = data.draw(st.booleans())
        budget = data.draw(st.floats(0.5, m if capped else 3.0))
        y = producer_best_response(agg, budget, capped).y
        # independent optimum by sorting
        if capped:
            srt = np.sort(agg)[::-1]
            full = int(budget)
            best = srt[:full].sum() + (budget - full) * (srt[full] if full < m else 0.0)
        else:
            best = budget * agg.max()
        assert float(agg @ y) == pytest.approx(best, abs=1e-9)


class TestBoundary:
    def test_skips_expensive_favorite(self):
        assert boundary_candidate([0.95, 0.5], [0, 1], 0.1) == 1

    def test_takes_affordable_favorite(self):
        assert boundary_candidate([0.2, 0.0], [0, 1], 0.1) == 0

    def test_nothing_affordable(self):
        assert boundary_candidate([1.0, 1.0], [0, 1], 0.1) == -1

    def test_preferred_to_boundary_is_expensive(self, rng):
        # follows from the definition, with no tolerance
        for _ in range(20):
            m = 6
            prices = rng.random(m)
            ranking = rng.permutation(m)
            eps = 0.25
            b = boundary_candidate(prices, ranking, eps)
            for a in ranking:
                if a == b:
                    break
                assert prices[a] > 1 - eps


class TestSolve:
    def test_single_candidate_exact(self):
        e = Election([[0]] * 4)
        res = solve(e, make_uniform_tail(0.1))
        assert res.certificate.converged
        assert res.certificate.max_residual == 0.0
        assert np.allclose(res.allocation.y, [1.0])

    def test_e3_symmetric(self, e3):
        res = solve(e3, make_threshold(0.5, 0.01))
        cert = res.certificate
        assert cert.converged and cert.max_residual <= 1e-3
        assert np.all(np.abs(res.allocation.y - 1 / 3) < 0.02)

    def test_capped_budget_above_m_rejected(self, e3):
        with pytest.raises(InputError):
            solve(e3, make_uniform_tail(0.01), budget=4.0, scale=4.0, capped=True)

    def test_scale_below_one_rejected(self, e3):
        with pytest.raises(InputError):
            solve(e3, make_uniform_tail(0.01), scale=0.5)

    def test_revenue_bounded_by_income(self, rng):
        d = make_threshold(0.5, 1e-3)
        for i in range(5):
            e = random_election(int(rng.integers(3, 15)), int(rng.integers(2, 7)), rng)
            res = solve(e, d, opts=SolverOptions(seed=i))
            if not res.certificate.converged:
                continue
            m = e.m
            spend = float((res.prices * res.x[:, :m]).sum())
            assert spend <= e.n * d.expectation() + res.certificate.tol

    def test_b1_clearing_identity(self, rng):
        d = make_threshold(0.5, 1e-3)
        e = random_election(8, 5, rng)
        res = solve(e, d, opts=SolverOptions(seed=3))
        assert res.certificate.converged
        assert np.max(np.abs(res.x[:, : e.m] - res.allocation.y)) <= 1e-3

    def test_soft_failure_reports_residual(self, e3):
        opts = SolverOptions(max_iters=2, restarts=1, scratch_polish_sigmas=(),
                             stall_window=10**9)
        res = solve(e3, make_threshold(0.5, 1e-3), opts=opts)
        assert not res.certificate.converged
        assert res.certificate.max_residual > 1e-3

    def test_sleo_certificate(self, rng):
        e = random_election(12, 8, rng)
        res = solve(e, make_uniform_tail(1e-3), budget=5.0, scale=4.0, capped=True,
                    opts=SolverOptions(seed=1))
        cert = res.certificate
        assert cert.converged
        # price bound on unsaturated candidates
        agg = res.prices.sum(axis=0)
        bound = 4.0 * e.n * make_uniform_tail(1e-3).expectation() / 5.0
        for a in range(e.m):
            if res.allocation.y[a] < 1 - 1e-9:
                assert agg[a] <= bound + e.n * cert.tol


class TestSolverOptions:
    def test_from_file_round_trip(self, tmp_path):
        opts = SolverOptions(tol=5e-4, eta=0.1, seed=7)
        path = tmp_path / "solver.json"
        path.write_text(json.dumps(opts.to_dict()))
        loaded = SolverOptions.from_file(path)
        assert dataclasses.asdict(loaded) == dataclasses.asdict(opts)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "solver.json"
        path.write_text('{"bogus": 1}')
        with pytest.raises(InputError):
            SolverOptions.from_file(path)


def test_demand_matches_income_sampling():
    # independent oracle: simulate incomes, buy the best affordable item
    d = make_threshold(0.4, 0.05)
    ranking = np.array([2, 0, 3, 1])
    prices = np.array([0.3, 0.97, 0.5, 0.02])
    x = demand_lottery(ranking, prices, d)
    rng = np.random.default_rng(123)
    draws = 200_000
    # sample incomes by inverting the CDF at uniform heights
    u = rng.random(draws)
    incomes = np.interp(u, d.knots_f, d.knots_x)
    counts = np.zeros(5)
    for b in incomes:
        pick = 4  # outside option
        for a in ranking:
            if prices[a] <= b:
                pick = a
                break
        counts[pick] += 1
    freqs = counts / draws
    sigma = np.sqrt(np.maximum(x * (1 - x), 1e-9) / draws)
    assert np.all(np.abs(freqs - x) <= 5 * sigma + 1e-3)
