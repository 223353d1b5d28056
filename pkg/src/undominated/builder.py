"""Committee constructions on top of approximate equilibria.

Three paths:

* depth 1: solve a budget-1 equilibrium under the threshold income,
  draw k candidates i.i.d. from the allocation lottery, keep a draw
  covering enough voters (greedy derandomization as the safety net);
* one shot (depth >= 2): solve a scaled, capped equilibrium under the
  uniform-tail income and dependent-round the allocation;
* iterative (depth >= 2): rounds of the one-shot step on the not yet
  t-covered voters with geometrically shrinking budgets.

Every returned committee is verified by the exhaustive checker, never by
the builder's own bookkeeping.  Builders require certified equilibria and
propagate soft failures as :class:`NotConvergedError`.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import numpy as np

from ._util import InputError, NotConvergedError, as_fraction, sub_rng
from .bounds import DEFAULT_GRID, GridSpec, alpha_k, omega, s1, s2
from .election import Committee, Election, UndominanceReport, undominance_check
from .equilibrium import EquilibriumResult, SolverOptions, solve
from .income import make_threshold, make_uniform_tail
from .rounding import dependent_round, sample_iid

__all__ = [
    "BuilderOptions",
    "CoverageMap",
    "IterationTrace",
    "RoundRecord",
    "BuildResult",
    "Strategy",
    "coverage",
    "build_t1",
    "build_one_shot",
    "build_iterative",
    "choose_params",
]

_SAT = 1.0 - 1e-9  # allocations this close to 1 count as saturated


@dataclasses.dataclass
class BuilderOptions:
    """Sampling budget and seeding for the randomized constructions."""

    samples: int = 256
    seed: int = 0
    solver: SolverOptions = dataclasses.field(default_factory=SolverOptions)

    def seeded_solver(self, *key: int) -> SolverOptions:
        opts = dataclasses.replace(self.solver)
        opts.seed = int(np.random.SeedSequence((self.seed,) + key).generate_state(1)[0])
        return opts


@dataclasses.dataclass(frozen=True)
class CoverageMap:
    """Per-voter boundary candidate (-1 for the outside option) and cover flag."""

    boundary: np.ndarray
    covered: np.ndarray

    @property
    def uncovered_count(self) -> int:
        return int(np.sum(~self.covered))


@dataclasses.dataclass(frozen=True)
class RoundRecord:
    index: int
    budget: float
    voters: int
    committee: Committee
    uncovered_after: int

    def to_dict(self) -> dict:
        return {
            "round": self.index,
            "budget": self.budget,
            "voters": self.voters,
            "committee": list(self.committee.members),
            "uncovered_after": self.uncovered_after,
        }


@dataclasses.dataclass(frozen=True)
class IterationTrace:
    """Per-round log of the iterative construction."""

    rounds: tuple
    params: dict

    def to_dict(self) -> dict:
        return {"params": self.params, "rounds": [r.to_dict() for r in self.rounds]}


@dataclasses.dataclass(frozen=True)
class BuildResult:
    committee: Committee
    report: UndominanceReport
    path: str
    params: dict
    nominal_alpha: Fraction | None
    effective_alpha: Fraction | None
    certificates: tuple
    accepted: bool
    accepted_seed: int
    uncovered: int
    target: float
    trace: IterationTrace | None = None
    equilibrium: EquilibriumResult | None = None

    def equilibrium_dump(self) -> dict | None:
        """Raw (x, y, p, certificate) of the last equilibrium solved."""
        if self.equilibrium is None:
            return None
        res = self.equilibrium
        return {
            "x": res.x.tolist(),
            "y": res.allocation.y.tolist(),
            "p": res.prices.tolist(),
            "certificate": res.certificate.to_dict(),
            "budget": res.budget,
            "scale": res.scale,
            "capped": res.capped,
            "income": res.income.to_dict(),
        }

    def to_dict(self) -> dict:
        return {
            "committee": list(self.committee.members),
            "path": self.path,
            "params": self.params,
            "nominal_alpha": None if self.nominal_alpha is None else str(self.nominal_alpha),
            "effective_alpha": None if self.effective_alpha is None else str(self.effective_alpha),
            "accepted": self.accepted,
            "accepted_seed": self.accepted_seed,
            "uncovered": self.uncovered,
            "target": self.target,
            "verifier": self.report.to_dict(),
            "certificates": [c.to_dict() for c in self.certificates],
            "trace": None if self.trace is None else self.trace.to_dict(),
        }


@dataclasses.dataclass(frozen=True)
class Strategy:
    """Dispatch decision of :func:`choose_params`."""

    path: str  # "t1" | "one_shot" | "iterative"
    params: dict


def _boundary_positions(e: Election, prices: np.ndarray, epsilon: float):
    """Boundary candidate per voter and its rank position (m for the outside option)."""
    cut = 1.0 - epsilon
    affordable = prices <= cut
    order = e.rankings
    aff_ranked = np.take_along_axis(affordable, order, axis=1)
    has = aff_ranked.any(axis=1)
    first = np.argmax(aff_ranked, axis=1)
    boundary = np.where(has, np.take_along_axis(order, first[:, None], axis=1)[:, 0], -1)
    bd_pos = np.where(has, first, e.m)
    return boundary.astype(np.int64), bd_pos.astype(np.int64)


def coverage(
    e: Election,
    c: Committee,
    prices: np.ndarray,
    t: int,
    epsilon: float,
    outside_mask: np.ndarray | None = None,
) -> CoverageMap:
    """Which voters the committee (t-)covers at these prices.

    A voter is covered when the committee is t-preferred to their
    boundary candidate; at depth 1 a member weakly preferred to the
    boundary suffices.  A missing boundary (everything priced above
    1 - epsilon) counts as covered whenever the committee has at least t
    members.  Voters in ``outside_mask`` are never covered.
    """
    if t < 1:
        raise InputError("t must be >= 1")
    prices = np.asarray(prices, dtype=np.float64)
    if prices.shape != (e.n, e.m):
        raise InputError("price matrix shape must be (n, m)")
    boundary, bd_pos = _boundary_positions(e, prices, epsilon)
    members = c.as_array()
    if members.size and int(members.max()) >= e.m:
        raise InputError("committee contains candidates outside the election")
    member_pos = e.positions[:, members] if members.size else np.empty((e.n, 0), dtype=np.int64)
    if t == 1:
        hits = (member_pos <= bd_pos[:, None]).any(axis=1)
    else:
        hits = (member_pos < bd_pos[:, None]).sum(axis=1) >= t
    covered = np.where(boundary < 0, c.size >= t, hits)
    if outside_mask is not None:
        covered = covered & ~np.asarray(outside_mask, dtype=bool)
    return CoverageMap(boundary=boundary, covered=covered.astype(bool))


def _tcover_flags(e, bd_pos, boundary, members, t, outside_mask):
    member_pos = e.positions[:, members] if members.size else np.empty((e.n, 0), dtype=np.int64)
    if t == 1:
        hits = (member_pos <= bd_pos[:, None]).any(axis=1)
    else:
        hits = (member_pos < bd_pos[:, None]).sum(axis=1) >= t
    covered = np.where(boundary < 0, members.size >= t, hits)
    return covered & ~outside_mask


def _require_converged(result: EquilibriumResult, context: str, trace=None):
    if not result.certificate.converged:
        err = NotConvergedError(
            f"{context}: equilibrium residual "
            f"{result.certificate.max_residual:.3e} exceeds tol {result.certificate.tol}",
            result=result,
        )
        err.trace = trace
        raise err


def _effective_alpha(alpha: Fraction, epsilon: float) -> Fraction:
    eff = alpha / (1 - as_fraction(epsilon))
    return min(eff, Fraction(1))


def build_t1(
    e: Election,
    k: int,
    beta: float,
    epsilon: float = 1e-3,
    opts: BuilderOptions | None = None,
    verify_alpha=None,
) -> BuildResult:
    """Size-k committee with dissent ratio about beta + (1 - beta)^k.

    Solves the budget-1 equilibrium under the threshold income, then
    draws k members i.i.d. from the allocation until a draw leaves at
    most (1 - beta)^k * n voters uncovered; greedy cover selection (plus
    lowest-index padding to k) is the deterministic fallback.  The
    degenerate beta = 0 call (k = 1's optimum, vacuous guarantee) skips
    the equilibrium and picks the k plurality leaders.
    """
    opts = opts or BuilderOptions()
    if not 1 <= k <= e.m:
        raise InputError(f"need 1 <= k <= m, got k={k}, m={e.m}")
    if not 0.0 <= beta < 1.0:
        raise InputError(f"beta must lie in [0, 1), got {beta}")
    guarantee = as_fraction(beta + (1.0 - beta) ** k)
    alpha = as_fraction(verify_alpha) if verify_alpha is not None else min(guarantee, Fraction(1))
    params = {"k": k, "beta": beta, "epsilon": epsilon}

    if beta == 0.0:
        firsts = np.bincount(e.rankings[:, 0], minlength=e.m)
        lead = np.lexsort((np.arange(e.m), -firsts))[:k]
        committee = Committee.of(lead.tolist())
        report = undominance_check(e, committee, 1, alpha)
        return BuildResult(
            committee=committee, report=report, path="t1", params=params,
            nominal_alpha=guarantee, effective_alpha=alpha, certificates=(),
            accepted=True, accepted_seed=-1, uncovered=0, target=float(e.n),
        )

    d = make_threshold(beta, epsilon)
    result = solve(e, d, budget=1.0, scale=1.0, capped=False,
                   opts=opts.seeded_solver(1))
    _require_converged(result, "t1 build")
    y = result.allocation.y
    boundary, bd_pos = _boundary_positions(e, result.prices, epsilon)
    # cover[a, v]: candidate a weakly beats v's boundary candidate
    cover = e.positions.T <= bd_pos[None, :]
    target = (1.0 - beta) ** k * e.n

    committee = None
    accepted_seed = -1
    uncovered = e.n
    for i in range(opts.samples):
        rng = sub_rng(opts.seed, 2, i)
        cand = sample_iid(y, k, rng)
        unc = e.n - int(cover[cand.as_array()].any(axis=0).sum())
        if unc < uncovered:
            uncovered = unc
        if unc <= target:
            committee = cand
            accepted_seed = i
            uncovered = unc
            break
    accepted = committee is not None
    if committee is None:
        chosen: list[int] = []
        covered = np.zeros(e.n, dtype=bool)
        for _ in range(k):
            gains = cover[:, ~covered].sum(axis=1)
            gains[chosen] = -1
            best = int(np.argmax(gains))
            if gains[best] <= 0 and len(chosen) > 0:
                break
            chosen.append(best)
            covered |= cover[best]
        for a in range(e.m):
            if len(chosen) >= k:
                break
            if a not in chosen:
                chosen.append(a)
        committee = Committee.of(chosen)
        uncovered = e.n - int(covered.sum())
        accepted = uncovered <= target
    report = undominance_check(e, committee, 1, alpha)
    return BuildResult(
        committee=committee, report=report, path="t1", params=params,
        nominal_alpha=guarantee, effective_alpha=_effective_alpha(guarantee, epsilon),
        certificates=(result.certificate,), accepted=accepted,
        accepted_seed=accepted_seed, uncovered=uncovered, target=target,
        equilibrium=result,
    )


def _round_committee(e, result, budget, t, epsilon, opts, seed_key, active_mask):
    """Dependent-round an allocation, keeping the draw covering most active voters.

    Returns (committee, uncovered_count, accepted, accepted_seed) where
    uncovered counts active voters the committee fails to t-cover; the
    acceptance target is omega * |active|.
    """
    y = result.allocation.y
    outside = np.asarray(result.x[:, e.m] > result.certificate.tol, dtype=bool)
    boundary, bd_pos = _boundary_positions(e, result.prices, epsilon)
    saturated = np.nonzero(y >= _SAT)[0]
    active = np.asarray(active_mask, dtype=bool)
    gamma = result.scale / t
    target = omega(gamma, t) * int(active.sum())
    best = None  # (uncovered, seed, committee)
    for i in range(opts.samples):
        rng = sub_rng(opts.seed, *seed_key, i)
        outcome = dependent_round(y, rng, seed=i)
        members = np.nonzero(outcome.selected)[0]
        if saturated.size and not np.all(outcome.selected[saturated] == 1):
            continue
        covered = _tcover_flags(e, bd_pos, boundary, members, t, outside)
        unc = int((active & ~covered).sum())
        if best is None or unc < best[0]:
            best = (unc, i, Committee.of(members.tolist()))
        if unc <= target:
            return best[2], unc, True, i, target
    if best is None:
        raise InputError("rounding produced no usable draw")
    return best[2], best[0], False, best[1], target


def build_one_shot(
    e: Election,
    t: int,
    alpha,
    gamma: float,
    budget: int,
    epsilon: float = 1e-3,
    opts: BuilderOptions | None = None,
    verify_alpha=None,
) -> BuildResult:
    """One-shot committee of size at most ceil(budget).

    Requires alpha >= gamma * t / budget + omega(gamma, t) (refused
    otherwise); solves the scaled capped equilibrium under the
    uniform-tail income and keeps a dependent-rounding draw that
    t-covers all but omega * n voters.  Sampling exhaustion returns the
    best draw with ``accepted=False``.
    """
    opts = opts or BuilderOptions()
    alpha = as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if gamma < 1.0:
        raise InputError("gamma must be >= 1")
    if t < 2:
        raise InputError("the one-shot path needs t >= 2")
    if budget < gamma * t:
        raise InputError(f"budget must be at least gamma * t = {gamma * t}")
    if budget > e.m:
        raise InputError(f"budget {budget} exceeds candidate count {e.m}")
    w = omega(gamma, t)
    if float(alpha) < gamma * t / budget + w:
        raise InputError(
            f"infeasible parameters: alpha {float(alpha):.6f} < "
            f"gamma*t/B + omega = {gamma * t / budget + w:.6f}")
    params = {"t": t, "alpha": str(alpha), "gamma": gamma, "budget": budget,
              "epsilon": epsilon}
    d = make_uniform_tail(epsilon)
    result = solve(e, d, budget=float(budget), scale=gamma * t, capped=True,
                   opts=opts.seeded_solver(3))
    _require_converged(result, "one-shot build")
    active = np.ones(e.n, dtype=bool)
    committee, uncovered, accepted, seed, target = _round_committee(
        e, result, budget, t, epsilon, opts, (4,), active)
    eff = _effective_alpha(alpha, epsilon)
    report = undominance_check(
        e, committee, t, as_fraction(verify_alpha) if verify_alpha is not None else eff)
    return BuildResult(
        committee=committee, report=report, path="one_shot", params=params,
        nominal_alpha=alpha, effective_alpha=eff,
        certificates=(result.certificate,), accepted=accepted,
        accepted_seed=seed, uncovered=uncovered, target=target,
        equilibrium=result,
    )


def build_iterative(
    e: Election,
    t: int,
    alpha,
    gamma: float,
    tau: float,
    epsilon: float = 1e-3,
    opts: BuilderOptions | None = None,
    verify_alpha=None,
) -> BuildResult:
    """Iterative committee: rounds of scaled equilibria on uncovered voters.

    Starts from B_0 = gamma * t / (alpha * (1 - omega * tau)) and shrinks
    the budget by tau each round while it stays at least gamma * t;
    every round dependent-rounds its allocation, union-ing the draws and
    dropping the voters already t-covered.  Budgets are capped at the
    candidate count (the regime of interest has B_0 well below m).
    Returns the committee, the verifier report, and the per-round trace.
    """
    opts = opts or BuilderOptions()
    alpha = as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if t < 2:
        raise InputError("the iterative path needs t >= 2")
    if gamma < 1.0:
        raise InputError("gamma must be >= 1")
    if tau <= 1.0:
        raise InputError("tau must be > 1")
    w = omega(gamma, t)
    if w * tau >= 1.0:
        raise InputError(f"requires omega * tau < 1, got {w * tau:.6f}")
    b0 = gamma * t / (float(alpha) * (1.0 - w * tau))
    if b0 < gamma * t:
        raise InputError(
            f"B_0 = {b0:.3f} < gamma*t = {gamma * t}: alpha too large for the "
            "iterative path; use the one-shot construction")
    params = {"t": t, "alpha": str(alpha), "gamma": gamma, "tau": tau,
              "epsilon": epsilon, "b0": b0}
    d = make_uniform_tail(epsilon)
    active = np.ones(e.n, dtype=bool)
    members: set[int] = set()
    rounds = []
    certificates = []
    all_accepted = True
    last_result = None
    i = 0
    while True:
        b_i = b0 / tau**i
        if b_i < gamma * t or int(active.sum()) == 0:
            break
        budget_i = min(b_i, float(e.m))
        sub = Election(e.rankings[active])
        result = solve(sub, d, budget=budget_i, scale=gamma * t, capped=True,
                       opts=opts.seeded_solver(5, i))
        trace_sofar = IterationTrace(rounds=tuple(rounds), params=params)
        _require_converged(result, f"iterative build round {i}", trace=trace_sofar)
        certificates.append(result.certificate)
        last_result = result
        sub_active = np.ones(sub.n, dtype=bool)
        c_i, unc, round_accepted, seed, _tgt = _round_committee(
            sub, result, budget_i, t, epsilon, opts, (6, i), sub_active)
        all_accepted = all_accepted and round_accepted
        boundary, bd_pos = _boundary_positions(sub, result.prices, epsilon)
        outside = np.asarray(result.x[:, sub.m] > result.certificate.tol, dtype=bool)
        covered_sub = _tcover_flags(sub, bd_pos, boundary, c_i.as_array(), t, outside)
        idx_active = np.nonzero(active)[0]
        active[idx_active[covered_sub]] = False
        members.update(c_i.members)
        rounds.append(RoundRecord(
            index=i, budget=b_i, voters=int(idx_active.size), committee=c_i,
            uncovered_after=int(active.sum())))
        i += 1
    committee = Committee.of(sorted(members))
    if committee.size < t:
        extra = [a for a in range(e.m) if a not in members][: t - committee.size]
        committee = Committee.of(sorted(members | set(extra)))
    trace = IterationTrace(rounds=tuple(rounds), params=params)
    eff = _effective_alpha(alpha, epsilon)
    report = undominance_check(
        e, committee, t, as_fraction(verify_alpha) if verify_alpha is not None else eff)
    return BuildResult(
        committee=committee, report=report, path="iterative", params=params,
        nominal_alpha=alpha, effective_alpha=eff,
        certificates=tuple(certificates), accepted=all_accepted, accepted_seed=-1,
        uncovered=int(active.sum()), target=0.0, trace=trace,
        equilibrium=last_result,
    )


def choose_params(t: int, alpha, grid: GridSpec = DEFAULT_GRID) -> Strategy:
    """Pick the construction path and its parameters for a (t, alpha) target.

    Depth 1 selects the smallest k whose guaranteed ratio meets alpha.
    Deeper targets compare the one-shot and iterative size bounds at
    alpha (equivalent to the crossover-threshold rule) and return the
    optimizing parameters.
    """
    alpha = as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if t < 1:
        raise InputError("t must be >= 1")
    if t == 1:
        af = float(alpha)
        for k in range(1, 513):
            beta, value = alpha_k(k)
            if value <= af or k == 512:
                return Strategy(path="t1", params={"k": k, "beta": beta})
    r2 = s2(alpha, t, grid)
    r1 = s1(alpha, t, grid)
    if r2.B is not None and r2.B <= r1.value:
        return Strategy(path="one_shot", params={"gamma": r2.gamma, "budget": r2.B, "t": t})
    if not math.isfinite(r1.value):
        raise InputError(f"no feasible construction found for t={t}, alpha={alpha}")
    return Strategy(path="iterative", params={"gamma": r1.gamma, "tau": r1.tau, "t": t})
