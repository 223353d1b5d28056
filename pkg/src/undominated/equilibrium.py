"""Approximate Lindahl equilibria with ordinal preferences.

Closed-form random demand, exact producer best response, and a damped
fixed-point solver producing approximate equilibria (plain at scale 1,
scaled with a per-candidate allocation cap otherwise) together with a
machine-checkable residual certificate.

The iteration is a heuristic: existence is guaranteed, computability is
not.  The solver therefore never trusts itself; it reports the residuals
of the best iterate found and sets ``converged`` only when all of them
meet the tolerance.  Downstream consumers must check that flag.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import _backend
from . import _kernels_numpy as _KNP
from ._util import InputError, sub_rng
from .election import Election
from .income import IncomeDistribution

_K = _backend.load_kernels()

__all__ = [
    "SolverOptions",
    "Allocation",
    "EquilibriumCertificate",
    "EquilibriumResult",
    "demand_lottery",
    "producer_best_response",
    "boundary_candidate",
    "solve",
]


@dataclasses.dataclass
class SolverOptions:
    """Knobs for the fixed-point iteration; all defaults are load-bearing.

    ``eta`` caps the per-coordinate price step and ``lam`` the producer
    inertia weight.  ``f_step_cap`` bounds how much CDF mass a single
    price move may traverse (annealed toward ``tol`` as the residual
    shrinks); ``producer_warmup`` rounds of constant inertia precede the
    doubling averaging windows.  A stalled B=1 run triggers the
    water-filling polish every ``stall_window`` iterations.
    """

    tol: float = 1e-3
    eta: float = 0.2
    lam: float = 0.3
    max_iters: int = 50_000
    restarts: int = 5
    seed: int = 0
    check_every: int = 25
    step_shrink: float = 0.5
    step_grow: float = 1.05
    producer_warmup: int = 500
    f_step_cap: float = 0.05
    stall_window: int = 1000
    polish_rounds: int = 1500
    polish_sigma: float = 2.0
    scratch_polish_rounds: int = 20_000
    scratch_polish_sigmas: tuple = (3.0, 2.0, 1.0, 0.5)

    @classmethod
    def from_file(cls, path) -> "SolverOptions":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InputError(f"unknown solver options: {sorted(unknown)}")
        if "scratch_polish_sigmas" in doc:
            doc["scratch_polish_sigmas"] = tuple(doc["scratch_polish_sigmas"])
        return cls(**doc)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["scratch_polish_sigmas"] = list(self.scratch_polish_sigmas)
        return d


@dataclasses.dataclass(frozen=True)
class Allocation:
    """Producer allocation y with its budget and scale context."""

    y: np.ndarray
    budget: float
    scale: float
    capped: bool

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        if abs(float(y.sum()) - self.budget) > 1e-9:
            raise InputError("allocation mass must equal the budget within 1e-9")
        if self.capped and float(y.max(initial=0.0)) > 1.0 + 1e-9:
            raise InputError("capped allocation exceeds the unit bound")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


@dataclasses.dataclass(frozen=True)
class EquilibriumCertificate:
    """Residuals of an approximate equilibrium, all non-negative.

    ``demand_residual``: worst gap between the reported consumption and
    the closed-form demand at the reported prices.
    ``clearing_residual``: worst violation of "scaled consumption never
    exceeds the allocation, and strict slack forces a zero price".
    ``producer_gap``: relative loss against the exact best response.
    ``lottery_residual``: worst gap between consumption and allocation in
    plain budget-1 runs (zero elsewhere): there the allocation must be
    every voter's demand lottery.
    ``price_bound_residual``: per-voter excess of any relevant
    candidate's aggregate price over ``scale * n * E[income] / budget``.
    ``converged`` holds iff every residual meets ``tol``.
    """

    demand_residual: float
    clearing_residual: float
    producer_gap: float
    lottery_residual: float
    price_bound_residual: float
    converged: bool
    tol: float
    iterations: int
    restarts_used: int
    outside_voters: tuple

    @property
    def max_residual(self) -> float:
        return max(
            self.demand_residual,
            self.clearing_residual,
            self.producer_gap,
            self.lottery_residual,
            self.price_bound_residual,
        )

    def to_dict(self) -> dict:
        return {
            "demand_residual": self.demand_residual,
            "clearing_residual": self.clearing_residual,
            "producer_gap": self.producer_gap,
            "lottery_residual": self.lottery_residual,
            "price_bound_residual": self.price_bound_residual,
            "max_residual": self.max_residual,
            "converged": self.converged,
            "tol": self.tol,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "outside_voters": list(self.outside_voters),
        }


@dataclasses.dataclass(frozen=True)
class EquilibriumResult:
    """Best iterate of a solve: consumption, prices, allocation, certificate.

    ``x`` has shape (n, m + 1); the last column is the outside option.
    """

    x: np.ndarray
    prices: np.ndarray
    allocation: Allocation
    certificate: EquilibriumCertificate
    income: IncomeDistribution
    budget: float
    scale: float
    capped: bool


def demand_lottery(ranking, prices, d: IncomeDistribution) -> np.ndarray:
    """Closed-form demand lottery of one voter; last entry is the outside option.

    The outside option absorbs the lottery remainder and is asserted to
    agree with its own closed form (the running CDF minimum) to 1e-12.
    """
    ranking = np.asarray(ranking, dtype=np.int64).reshape(1, -1)
    prices = np.asarray(prices, dtype=np.float64).reshape(1, -1)
    if ranking.shape != prices.shape:
        raise InputError("ranking and prices must have equal length")
    if np.any(prices < 0.0) or np.any(prices > 1.0):
        raise InputError("prices must lie in [0, 1]")
    x = _K.demand_profile(ranking, prices, d.knots_x, d.knots_f)[0]
    absorbed = 1.0 - float(x[:-1].sum())
    if abs(absorbed - float(x[-1])) > 1e-12:
        raise AssertionError(
            f"outside-option mismatch: absorbed {absorbed} vs closed form {x[-1]}")
    return x


def producer_best_response(aggregate_prices, budget: float, capped: bool) -> Allocation:
    """Exact revenue-maximizing allocation; ties break to the lowest index.

    Uncapped: the whole budget on the maximum aggregate price.  Capped:
    greedy fractional fill in descending aggregate price, one unit each.
    """
    agg = np.asarray(aggregate_prices, dtype=np.float64)
    if budget <= 0:
        raise InputError("budget must be positive")
    if capped and budget > agg.shape[0] + 1e-12:
        raise InputError(f"capped response needs budget <= m, got {budget} > {agg.shape[0]}")
    y = _K.best_response_alloc(agg, float(budget), bool(capped))
    return Allocation(y=y, budget=float(budget), scale=1.0, capped=bool(capped))


def boundary_candidate(prices, ranking, epsilon: float) -> int:
    """Most preferred candidate priced at most 1 - epsilon, or -1 for none.

    Candidates strictly preferred to the returned one are, by
    construction, priced strictly above 1 - epsilon.
    """
    prices = np.asarray(prices, dtype=np.float64)
    ranking = np.asarray(ranking, dtype=np.int64)
    cut = 1.0 - epsilon
    for a in ranking:
        if prices[a] <= cut:
            return int(a)
    return -1


def _renorm_capped(z: np.ndarray, budget: float) -> np.ndarray:
    """Scale z so that sum(min(c * z, 1)) equals the budget."""
    z = np.maximum(z, 1e-15)
    lo, hi = 0.0, None
    c = budget / float(z.sum())
    for _ in range(200):
        total = float(np.minimum(c * z, 1.0).sum())
        if abs(total - budget) < 1e-13:
            break
        if total < budget:
            lo = c
            c = c * 2.0 if hi is None else 0.5 * (c + hi)
        else:
            hi = c
            c = 0.5 * (lo + c)
    return np.minimum(c * z, 1.0)


def _capped_tatonnement(order, d, budget, scale, y, rounds, sigma, tol):
    """y-space search for capped scaled runs.

    Given an allocation, every voter's prices are forced by inverting the
    closed-form demand (consume y_a / scale down the ranking until the
    unit budget is spent), so the aggregate price vector is a continuous
    function of y alone; a multiplicative update with capped
    renormalization drives the fractional candidates' aggregates to a
    common level.  Backend-independent: plain numpy throughout.
    """
    n, m = order.shape
    kx, kf = d.knots_x, d.knots_f
    ei = d.expectation()
    best = (np.inf, None, None)
    for k in range(rounds):
        y = _renorm_capped(y, budget)
        ranked_y = y[order] / scale
        cum = np.minimum(np.cumsum(ranked_y, axis=1), 1.0)
        qreq = 1.0 - cum
        prev = np.concatenate([np.ones((n, 1)), qreq[:, :-1]], axis=1)
        lo_prev, _ = _KNP._preimage_span_vec(prev, kx, kf)
        lo_req, _ = _KNP._preimage_span_vec(qreq, kx, kf)
        consuming = (ranked_y > 0) & (prev > qreq + 1e-15)
        ranked_price = np.where(consuming, lo_req,
                                np.where(y[order] > 0, 0.0, lo_prev))
        p = np.zeros((n, m))
        np.put_along_axis(p, order, ranked_price, axis=1)
        agg = p.sum(axis=0)
        x = _KNP.demand_profile(order, p, kx, kf)
        clearing, gap, lottery, pb = _KNP._residuals(
            x, y, p, agg, budget, scale, True, ei, False)
        res = max(clearing, gap, lottery, pb)
        if res < best[0]:
            best = (res, p.copy(), y.copy())
            if res <= tol:
                break
        frac = (y > 1e-12) & (y < 1.0 - 1e-9)
        level = float(agg[frac].max()) if frac.any() else float(agg.max())
        sig = sigma / (1.0 + k / 200.0)
        y = y * np.exp(sig * (agg - level) / n)
    return best


def _certify(order, d, budget, scale, capped, p, y, opts, iterations, restarts_used):
    """Honest certificate for an iterate, trying the exact-BR projection too."""
    ei = d.expectation()
    x = _K.demand_profile(order, p, d.knots_x, d.knots_f)
    agg = p.sum(axis=0)
    candidates = [y]
    y_br = _K.best_response_alloc(agg, budget, capped)
    if not np.array_equal(y_br, y):
        candidates.append(y_br)
    best = None
    for cand in candidates:
        clearing, gap, lottery, pb = _K.residual_breakdown(
            order, d.knots_x, d.knots_f, p, cand, budget, scale, capped, ei)
        res = max(clearing, gap, lottery, pb)
        if best is None or res < best[0]:
            best = (res, cand, clearing, gap, lottery, pb)
    res, y_final, clearing, gap, lottery, pb = best
    x_check = _K.demand_profile(order, p, d.knots_x, d.knots_f)
    demand_res = float(np.max(np.abs(x - x_check)))
    outside = tuple(int(v) for v in np.nonzero(x[:, -1] > opts.tol)[0])
    cert = EquilibriumCertificate(
        demand_residual=demand_res,
        clearing_residual=float(clearing),
        producer_gap=float(gap),
        lottery_residual=float(lottery),
        price_bound_residual=float(pb),
        converged=bool(max(res, demand_res) <= opts.tol),
        tol=opts.tol,
        iterations=iterations,
        restarts_used=restarts_used,
        outside_voters=outside,
    )
    return x, y_final, cert


def solve(
    e: Election,
    d: IncomeDistribution,
    budget: float = 1.0,
    scale: float = 1.0,
    capped: bool = False,
    opts: SolverOptions | None = None,
) -> EquilibriumResult:
    """Compute an approximate equilibrium with a residual certificate.

    Iterates closed-form demand, an inertially smoothed exact producer
    response, and damped price updates along ``scale * x - y``.  Stalled
    runs fall back to deterministic allocation-space searches before
    jittered restarts: a water-filling polish for plain budget-1 runs, a
    capped tatonnement for capped ones.  Always returns the best
    iterate; ``converged`` may be False (soft failure, never a silent
    success).
    """
    opts = opts or SolverOptions()
    budget = float(budget)
    scale = float(scale)
    if budget <= 0:
        raise InputError("budget must be positive")
    if scale < 1.0:
        raise InputError("scale must be >= 1")
    if capped and budget > e.m + 1e-12:
        raise InputError(f"capped solve needs budget <= m, got {budget} > {e.m}")
    if float(d.cdf(0.0)) != 0.0:
        raise InputError("income distribution must satisfy F(0) = 0")
    order = e.rankings
    n, m = order.shape
    ei = d.expectation()
    b1_mode = (not capped) and budget == 1.0 and scale == 1.0
    rng = sub_rng(opts.seed, 11)

    best = None  # (res, p, y, iterations, restart_index)
    iterations = 0

    def consider(p, y, res, used_restart):
        nonlocal best
        if best is None or res < best[0]:
            best = (res, p, y, used_restart)

    for r in range(max(1, opts.restarts)):
        p0 = np.full((n, m), 0.5)
        if r > 0:
            p0 = np.clip(p0 + rng.uniform(-0.25, 0.25, size=(n, m)), 0.0, 1.0)
        y0 = np.full(m, budget / m)
        p, y, _brk, res, iters = _K.solve_loop(
            order, d.knots_x, d.knots_f, budget, scale, capped, p0, y0,
            opts.eta, opts.lam, opts.tol, opts.max_iters, opts.check_every,
            opts.step_shrink, opts.step_grow, opts.producer_warmup,
            opts.f_step_cap, ei, opts.stall_window, opts.polish_rounds,
            opts.polish_sigma)
        iterations += iters
        consider(p, y, res, r)
        if res <= opts.tol:
            break
        if b1_mode and r == 0:
            # deterministic fallback, worth one shot before jittered restarts
            done = False
            for sigma in opts.scratch_polish_sigmas:
                yp = np.full(m, 1.0 / m)
                pp = np.full((n, m), 0.5)
                pp, yp, pres, _rounds = _K.polish_waterfill(
                    order, d.knots_x, d.knots_f, yp, pp,
                    opts.scratch_polish_rounds, sigma, ei, opts.tol)
                consider(pp, yp, pres, r)
                if pres <= opts.tol:
                    done = True
                    break
            if done:
                break
        if capped and r == 0:
            # allocation-space fallback: warm start from the best iterate,
            # then from scratch, before jittered restarts
            done = False
            for sigma, y_init in ((0.5, best[2].copy()),
                                  (3.0, np.full(m, budget / m)),
                                  (1.0, best[2].copy())):
                pres, pp, yp = _capped_tatonnement(
                    order, d, budget, scale, y_init, 4000, sigma, opts.tol)
                if pp is not None:
                    consider(pp, yp, pres, r)
                if pres <= opts.tol:
                    done = True
                    break
            if done:
                break

    res, p, y, used_restart = best
    x, y_final, cert = _certify(order, d, budget, scale, capped, p, y, opts,
                                iterations, used_restart)
    alloc = Allocation(y=y_final, budget=budget, scale=scale, capped=capped)
    return EquilibriumResult(
        x=x,
        prices=p,
        allocation=alloc,
        certificate=cert,
        income=d,
        budget=budget,
        scale=scale,
        capped=capped,
    )
