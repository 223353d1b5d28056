"""Numba kernel implementations.

Twin of :mod:`undominated._kernels_numpy`; same signatures, same
semantics, compiled with ``@njit(cache=True, nogil=True)`` so chunked
callers can fan out across threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND = "numba"

_JIT = dict(cache=True, nogil=True)


# ---------------------------------------------------------------------------
# preference counting


@njit(**_JIT)
def dissent_counts(pos, members, t):
    n, m = pos.shape
    k = members.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for v in range(n):
        for a in range(m):
            better = 0
            pa = pos[v, a]
            for j in range(k):
                if pos[v, members[j]] < pa:
                    better += 1
            if better < t:
                out[a] += 1
    return out


@njit(**_JIT)
def max_dissent(pos, members, t):
    n, m = pos.shape
    k = members.shape[0]
    best = -1
    arg = -1
    for a in range(m):
        inside = False
        for j in range(k):
            if members[j] == a:
                inside = True
                break
        if inside:
            continue
        cnt = 0
        for v in range(n):
            better = 0
            pa = pos[v, a]
            for j in range(k):
                if pos[v, members[j]] < pa:
                    better += 1
            if better < t:
                cnt += 1
        if cnt > best:
            best = cnt
            arg = a
    if arg < 0:
        return 0, -1
    return best, arg


@njit(**_JIT)
def _committee_passes(pos, members, t, thresh):
    n, m = pos.shape
    k = members.shape[0]
    for a in range(m):
        inside = False
        for j in range(k):
            if members[j] == a:
                inside = True
                break
        if inside:
            continue
        cnt = 0
        for v in range(n):
            better = 0
            pa = pos[v, a]
            for j in range(k):
                if pos[v, members[j]] < pa:
                    better += 1
            if better < t:
                cnt += 1
                if cnt > thresh:
                    break
        if cnt > thresh:
            return False
    return True


@njit(**_JIT)
def first_passing_committee(pos, combos, t, thresh):
    for i in range(combos.shape[0]):
        if _committee_passes(pos, combos[i], t, thresh):
            return i
    return -1


@njit(**_JIT)
def batch_max_dissent(pos, combos, t):
    rows = combos.shape[0]
    counts = np.empty(rows, dtype=np.int64)
    witnesses = np.empty(rows, dtype=np.int64)
    for i in range(rows):
        c, w = max_dissent(pos, combos[i], t)
        counts[i] = c
        witnesses[i] = w
    return counts, witnesses


# ---------------------------------------------------------------------------
# demand evaluation


@njit(**_JIT)
def _interp1(x, kx, kf):
    nk = kx.shape[0]
    if x <= kx[0]:
        return kf[0]
    if x >= kx[nk - 1]:
        return kf[nk - 1]
    for i in range(nk - 1):
        if x < kx[i + 1]:
            return kf[i] + (kf[i + 1] - kf[i]) * (x - kx[i]) / (kx[i + 1] - kx[i])
    return kf[nk - 1]


@njit(**_JIT)
def interp_cdf(x, knots_x, knots_f):
    out = np.empty(x.shape[0], dtype=np.float64)
    for i in range(x.shape[0]):
        out[i] = _interp1(x[i], knots_x, knots_f)
    return out


@njit(**_JIT)
def _demand_into(order, p, kx, kf, x):
    n, m = order.shape
    f0 = kf[0]
    for v in range(n):
        runmin = 1.0
        for j in range(m):
            a = order[v, j]
            fa = _interp1(p[v, a], kx, kf)
            if j == 0:
                x[v, a] = 1.0 - fa
                runmin = fa
            else:
                nm = fa if fa < runmin else runmin
                x[v, a] = runmin - nm
                runmin = nm
        d = runmin - f0
        x[v, m] = d if d > 0.0 else 0.0


@njit(**_JIT)
def demand_profile(order, prices, knots_x, knots_f):
    n, m = order.shape
    x = np.zeros((n, m + 1), dtype=np.float64)
    _demand_into(order, prices, knots_x, knots_f, x)
    return x


# ---------------------------------------------------------------------------
# producer response


@njit(**_JIT)
def producer_argsort(agg):
    """Indices by descending aggregate price, ties to the lowest index."""
    m = agg.shape[0]
    order = np.empty(m, dtype=np.int64)
    used = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        besti = -1
        for a in range(m):
            if used[a]:
                continue
            if besti < 0 or agg[a] > agg[besti]:
                besti = a
        order[i] = besti
        used[besti] = True
    return order


@njit(**_JIT)
def best_response_alloc(agg, budget, capped):
    m = agg.shape[0]
    y = np.zeros(m, dtype=np.float64)
    if not capped:
        besti = 0
        for a in range(1, m):
            if agg[a] > agg[besti]:
                besti = a
        y[besti] = budget
        return y
    remaining = budget
    order = producer_argsort(agg)
    for i in range(m):
        a = order[i]
        take = 1.0 if remaining > 1.0 else remaining
        y[a] = take
        remaining -= take
        if remaining <= 0.0:
            break
    return y


@njit(**_JIT)
def best_revenue(agg, budget, capped):
    m = agg.shape[0]
    if not capped:
        mx = agg[0]
        for a in range(1, m):
            if agg[a] > mx:
                mx = agg[a]
        return budget * mx
    srt = np.sort(agg)[::-1]
    full = int(budget)
    rev = 0.0
    for i in range(min(full, m)):
        rev += srt[i]
    if full < m:
        rev += (budget - full) * srt[full]
    return rev


# ---------------------------------------------------------------------------
# equilibrium residuals and fixed-point loop


@njit(**_JIT)
def _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode):
    n = x.shape[0]
    m = y.shape[0]
    clearing = 0.0
    lottery = 0.0
    for v in range(n):
        for a in range(m):
            sx = scale * x[v, a]
            over = sx - y[a]
            if over < 0.0:
                over = 0.0
            slack = y[a] - sx
            if slack < 0.0:
                slack = 0.0
            val = over + p[v, a] * slack
            if val > clearing:
                clearing = val
            if b1_mode:
                d = x[v, a] - y[a]
                if d < 0.0:
                    d = -d
                if d > lottery:
                    lottery = d
    best = best_revenue(agg, budget, capped)
    rev = 0.0
    for a in range(m):
        rev += agg[a] * y[a]
    gap = best - rev
    if gap < 0.0:
        gap = 0.0
    denom = 1.0 if best < 1.0 else best
    gap = gap / denom
    max_agg = -1.0
    for a in range(m):
        if capped and y[a] >= 1.0 - 1e-9:
            continue
        if agg[a] > max_agg:
            max_agg = agg[a]
    pb = 0.0
    if max_agg > 0.0:
        pb = max_agg - scale * n * ei / budget
        if pb < 0.0:
            pb = 0.0
        pb = pb / n
    return clearing, gap, lottery, pb


@njit(**_JIT)
def _dist_for_f_change(p, direction, kappa, kx, kf):
    """Distance from p (along +-1) at which F has moved by kappa."""
    nk = kx.shape[0]
    fcur = _interp1(p, kx, kf)
    if direction > 0:
        target = fcur + kappa
        if target >= kf[nk - 1]:
            return 2.0
        for i in range(1, nk):
            if kf[i] >= target and kx[i] > p:
                lo_x = kx[i - 1] if kx[i - 1] > p else p
                lo_f = kf[i - 1] if kx[i - 1] > p else fcur
                seg_slope = (kf[i] - kf[i - 1]) / (kx[i] - kx[i - 1])
                if seg_slope <= 0.0:
                    continue
                return (lo_x - p) + (target - lo_f) / seg_slope
        return 2.0
    else:
        target = fcur - kappa
        if target <= kf[0]:
            return 2.0
        for i in range(nk - 1, 0, -1):
            if kf[i - 1] <= target and kx[i - 1] < p:
                hi_x = kx[i] if kx[i] < p else p
                hi_f = kf[i] if kx[i] < p else fcur
                seg_slope = (kf[i] - kf[i - 1]) / (kx[i] - kx[i - 1])
                if seg_slope <= 0.0:
                    continue
                return (p - hi_x) + (hi_f - target) / seg_slope
        return 2.0


@njit(**_JIT)
def _preimage_span(q, kx, kf):
    """Price interval [lo, hi] on which F equals q exactly."""
    nk = kx.shape[0]
    if q <= kf[0]:
        hi = kx[0]
        for i in range(1, nk):
            if kf[i] == kf[0]:
                hi = kx[i]
            else:
                break
        return kx[0], hi
    if q >= kf[nk - 1]:
        lo = kx[nk - 1]
        for i in range(nk - 1, 0, -1):
            if kf[i - 1] == kf[nk - 1]:
                lo = kx[i - 1]
            else:
                break
        return lo, kx[nk - 1]
    lo = -1.0
    hi = -1.0
    for i in range(1, nk):
        if kf[i - 1] <= q <= kf[i]:
            if kf[i] > kf[i - 1]:
                w = (q - kf[i - 1]) / (kf[i] - kf[i - 1])
                xx = kx[i - 1] + w * (kx[i] - kx[i - 1])
                if lo < 0.0:
                    lo = xx
                hi = xx
                if kf[i] > q:
                    break
            else:
                if lo < 0.0:
                    lo = kx[i - 1]
                hi = kx[i]
    if lo < 0.0:
        return 0.0, 0.0
    return lo, hi


@njit(**_JIT)
def polish_waterfill(order, kx, kf, y, p, max_rounds, sigma, ei, tol):
    """Lottery search for B=1: exact demand inversion plus water-filling.

    For a candidate lottery ``y``, each voter's demand equals ``y``
    whenever their prices realize the cumulative CDF targets; targets are
    allowed to miss by ``0.45 * tol`` which widens the preimage interval
    near the CDF blocks.  Within those intervals prices are free, so a
    water-fill can push every supported candidate's aggregate price to a
    common level; the gap that remains drives a multiplicative update of
    ``y``.  Returns the best iterate found.
    """
    n, m = order.shape
    x = np.zeros((n, m + 1), dtype=np.float64)
    lo = np.zeros((n, m), dtype=np.float64)
    hi = np.zeros((n, m), dtype=np.float64)
    agg = np.zeros(m, dtype=np.float64)
    slack = 0.45 * tol
    best_res = np.inf
    best_p = p.copy()
    best_y = y.copy()
    rounds = 0
    for k in range(max_rounds):
        rounds = k + 1
        s = 0.0
        for a in range(m):
            if y[a] < 1e-14:
                y[a] = 1e-14
            s += y[a]
        for a in range(m):
            y[a] /= s
        for v in range(n):
            cum = 0.0
            for j in range(m):
                a = order[v, j]
                cum += y[a]
                tgt = 1.0 - cum
                if tgt < 0.0:
                    tgt = 0.0
                ql = tgt - slack
                if ql < 0.0:
                    ql = 0.0
                qh = tgt + slack
                if qh > 1.0:
                    qh = 1.0
                l1, _h1 = _preimage_span(ql, kx, kf)
                _l2, h2 = _preimage_span(qh, kx, kf)
                lo[v, a] = l1
                hi[v, a] = h2
        level = 0.0
        for a in range(m):
            base = 0.0
            for v in range(n):
                base += lo[v, a]
            agg[a] = base
            if base > level:
                level = base
        for v in range(n):
            for a in range(m):
                p[v, a] = lo[v, a]
        for a in range(m):
            if y[a] <= 2e-14:
                continue
            need = level - agg[a]
            if need <= 0.0:
                continue
            for v in range(n):
                room = hi[v, a] - lo[v, a]
                if room <= 0.0:
                    continue
                take = room if room < need else need
                p[v, a] += take
                need -= take
                if need <= 1e-15:
                    break
            rest = need if need > 0.0 else 0.0
            agg[a] = level - rest
        _demand_into(order, p, kx, kf, x)
        clearing, gap, lottery, pb = _residuals(x, y, p, agg, 1.0, 1.0, False, ei, True)
        res = max(max(clearing, gap), max(lottery, pb))
        if res < best_res:
            best_res = res
            best_p[:] = p
            best_y[:] = y
            if res <= tol:
                return best_p, best_y, best_res, rounds
        rev = 0.0
        for a in range(m):
            rev += agg[a] * y[a]
        sig = sigma / (1.0 + k / 100.0)
        for a in range(m):
            y[a] = y[a] * np.exp(sig * (agg[a] - rev) / n)
    return best_p, best_y, best_res, rounds


@njit(**_JIT)
def solve_loop(order, kx, kf, budget, scale, capped, p, y, eta, lam, tol,
               max_iters, check_every, step_shrink, step_grow, warmup,
               f_step_cap, ei, stall_window, polish_rounds, polish_sigma):
    """Damped fixed-point iteration on (x, y, p).

    Demand is the closed form at the current prices; the allocation blends
    the exact best response first with constant inertia ``lam`` and then,
    after ``warmup`` rounds, with doubling averaging windows; prices move
    along ``scale * x - y`` with per-coordinate steps that shrink on sign
    flips, each move capped so it crosses at most ``f_step_cap`` of CDF
    mass (annealed toward the tolerance as the residual improves).  On a
    stall in B=1 mode, a water-filling polish is attempted from the best
    iterate.  Returns the best iterate by max certificate residual.
    """
    n, m = order.shape
    b1_mode = (not capped) and budget == 1.0 and scale == 1.0
    x = np.zeros((n, m + 1), dtype=np.float64)
    step = np.full((n, m), eta, dtype=np.float64)
    prev_sign = np.zeros((n, m), dtype=np.float64)
    agg = np.zeros(m, dtype=np.float64)
    best_res = np.inf
    best_p = p.copy()
    best_y = y.copy()
    best_break = np.zeros(4, dtype=np.float64)
    window_start = warmup
    kappa_eff = f_step_cap
    last_improve = 0
    it = 0
    while it < max_iters:
        _demand_into(order, p, kx, kf, x)
        for a in range(m):
            s = 0.0
            for v in range(n):
                s += p[v, a]
            agg[a] = s
        if it % check_every == 0 or it == max_iters - 1:
            clearing, gap, lottery, pb = _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)
            res = max(max(clearing, gap), max(lottery, pb))
            if res < 0.9 * best_res:
                last_improve = it
            if res < best_res:
                best_res = res
                best_p[:] = p
                best_y[:] = y
                best_break[0] = clearing
                best_break[1] = gap
                best_break[2] = lottery
                best_break[3] = pb
            if res <= tol:
                return best_p, best_y, best_break, best_res, it + 1
            k2 = 2.0 * best_res
            if k2 < f_step_cap:
                kappa_eff = k2
            if kappa_eff < 0.5 * tol:
                kappa_eff = 0.5 * tol
            if b1_mode and it - last_improve >= stall_window:
                pol_y = best_y.copy()
                pol_p = best_p.copy()
                pp, py, pres, _rounds = polish_waterfill(
                    order, kx, kf, pol_y, pol_p, polish_rounds, polish_sigma, ei, tol)
                if pres < best_res:
                    best_res = pres
                    best_p[:] = pp
                    best_y[:] = py
                    p[:] = pp
                    y[:] = py
                    for v in range(n):
                        for a in range(m):
                            if step[v, a] > 1e-3:
                                step[v, a] = 1e-3
                            prev_sign[v, a] = 0.0
                    _demand_into(order, p, kx, kf, x)
                    for a in range(m):
                        s = 0.0
                        for v in range(n):
                            s += p[v, a]
                        agg[a] = s
                    clearing, gap, lottery, pb = _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)
                    best_break[0] = clearing
                    best_break[1] = gap
                    best_break[2] = lottery
                    best_break[3] = pb
                    if pres <= tol:
                        return best_p, best_y, best_break, best_res, it + 1
                last_improve = it
        br = best_response_alloc(agg, budget, capped)
        if it < warmup:
            w = lam
        else:
            if it - window_start >= window_start:
                window_start = it
            w = 1.0 / (it - window_start + 2.0)
            if w > lam:
                w = lam
        for a in range(m):
            y[a] = (1.0 - w) * y[a] + w * br[a]
        for v in range(n):
            for a in range(m):
                g = scale * x[v, a] - y[a]
                sg = 1.0 if g > 0.0 else (-1.0 if g < 0.0 else 0.0)
                if sg * prev_sign[v, a] < 0.0:
                    step[v, a] *= step_shrink
                    if step[v, a] < 1e-12:
                        step[v, a] = 1e-12
                elif sg != 0.0:
                    step[v, a] *= step_grow
                    if step[v, a] > eta:
                        step[v, a] = eta
                prev_sign[v, a] = sg
                mv = step[v, a] * g
                if mv > 0.0:
                    lim = _dist_for_f_change(p[v, a], 1, kappa_eff, kx, kf)
                    if mv > lim:
                        mv = lim
                elif mv < 0.0:
                    lim = _dist_for_f_change(p[v, a], -1, kappa_eff, kx, kf)
                    if -mv > lim:
                        mv = -lim
                pv = p[v, a] + mv
                if pv < 0.0:
                    pv = 0.0
                elif pv > 1.0:
                    pv = 1.0
                p[v, a] = pv
        it += 1
    return best_p, best_y, best_break, best_res, it


@njit(**_JIT)
def residual_breakdown(order, kx, kf, p, y, budget, scale, capped, ei):
    """(clearing, gap, lottery, price_bound) for a given iterate."""
    n, m = order.shape
    b1_mode = (not capped) and budget == 1.0 and scale == 1.0
    x = np.zeros((n, m + 1), dtype=np.float64)
    _demand_into(order, p, kx, kf, x)
    agg = np.zeros(m, dtype=np.float64)
    for a in range(m):
        s = 0.0
        for v in range(n):
            s += p[v, a]
        agg[a] = s
    return _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)


# ---------------------------------------------------------------------------
# dependent rounding (pipage walk)


@njit(**_JIT)
def pipage_round(y, uniforms, snap):
    m = y.shape[0]
    z = y.copy()
    frac = np.empty(m, dtype=np.int64)
    nf = 0
    for a in range(m):
        if snap < z[a] < 1.0 - snap:
            frac[nf] = a
            nf += 1
    u_idx = 0
    while nf >= 2:
        i = frac[0]
        j = frac[1]
        alpha = 1.0 - z[i]
        if z[j] < alpha:
            alpha = z[j]
        beta = z[i]
        if 1.0 - z[j] < beta:
            beta = 1.0 - z[j]
        if uniforms[u_idx] * (alpha + beta) < beta:
            z[i] += alpha
            z[j] -= alpha
        else:
            z[i] -= beta
            z[j] += beta
        u_idx += 1
        k = 0
        for t in range(nf):
            a = frac[t]
            if snap < z[a] < 1.0 - snap:
                frac[k] = a
                k += 1
        nf = k
    if nf == 1:
        a = frac[0]
        z[a] = 1.0 if uniforms[u_idx] < z[a] else 0.0
    out = np.empty(m, dtype=np.int8)
    for a in range(m):
        out[a] = 1 if z[a] > 0.5 else 0
    return out


@njit(**_JIT)
def pipage_round_many(y, uniforms, snap):
    draws = uniforms.shape[0]
    m = y.shape[0]
    out = np.empty((draws, m), dtype=np.int8)
    for d in range(draws):
        out[d] = pipage_round(y, uniforms[d], snap)
    return out


@njit(**_JIT)
def rounding_stats(y, uniforms, snap, subsets, subset_len):
    draws = uniforms.shape[0]
    m = y.shape[0]
    q = subsets.shape[0]
    sel_counts = np.zeros(m, dtype=np.int64)
    cards = np.empty(draws, dtype=np.int64)
    zero_counts = np.zeros(q, dtype=np.int64)
    for d in range(draws):
        z = pipage_round(y, uniforms[d], snap)
        tot = 0
        for a in range(m):
            sel_counts[a] += z[a]
            tot += z[a]
        cards[d] = tot
        for s in range(q):
            allzero = True
            for j in range(subset_len[s]):
                if z[subsets[s, j]] != 0:
                    allzero = False
                    break
            if allzero:
                zero_counts[s] += 1
    return sel_counts, cards, zero_counts


# ---------------------------------------------------------------------------
# bound optimizers


@njit(**_JIT)
def _s1_eval(om, gammas, tau, q, i):
    d = 1.0 - om[i] * tau
    a = gammas[i] * tau / (tau - 1.0) / d
    b = np.log(1.0 / d) / np.log(tau)
    return q * a + b


@njit(**_JIT)
def _s1_inner_min(om, gammas, tau, q, lo, hi):
    """Ternary search over the unimodal gamma profile, then a local scan."""
    while hi - lo > 48:
        third = (hi - lo) // 3
        m1 = lo + third
        m2 = hi - third
        if _s1_eval(om, gammas, tau, q, m1) <= _s1_eval(om, gammas, tau, q, m2):
            hi = m2 - 1
        else:
            lo = m1 + 1
    best = np.inf
    gi = -1
    for i in range(lo, hi + 1):
        v = _s1_eval(om, gammas, tau, q, i)
        if v < best:
            best = v
            gi = i
    return best, gi


@njit(**_JIT)
def _a_eval(om, gammas, tau, i):
    d = 1.0 - om[i] * tau
    return gammas[i] * tau / (tau - 1.0) / d


@njit(**_JIT)
def tau_tables(om, gammas, taus):
    """Per-tau feasibility start index and minimum of the leading coefficient."""
    nt = taus.shape[0]
    ng = gammas.shape[0]
    lo_idx = np.empty(nt, dtype=np.int64)
    amin = np.empty(nt, dtype=np.float64)
    for ti in range(nt):
        tau = taus[ti]
        lim = 1.0 / tau
        lo = np.searchsorted(-om, -lim, side="right")
        lo_idx[ti] = lo
        if lo >= ng:
            amin[ti] = np.inf
            continue
        a = lo
        b = ng - 1
        while b - a > 48:
            third = (b - a) // 3
            m1 = a + third
            m2 = b - third
            if _a_eval(om, gammas, tau, m1) <= _a_eval(om, gammas, tau, m2):
                b = m2 - 1
            else:
                a = m1 + 1
        best = np.inf
        for i in range(a, b + 1):
            v = _a_eval(om, gammas, tau, i)
            if v < best:
                best = v
        amin[ti] = best
    return lo_idx, amin


@njit(**_JIT)
def s1_scan(om, gammas, taus, lo_idx, amin, t, alpha):
    """Grid minimum of the iterative size bound at one alpha target.

    A coarse pass over every 50th tau seeds an upper bound; the full pass
    skips any tau whose best possible leading term already exceeds it.
    Returns (value, gamma_index, tau_index); value is inf when the
    feasible grid is empty.
    """
    q = t / alpha
    r = np.log(1.0 / alpha)
    ng = gammas.shape[0]
    nt = taus.shape[0]
    best = np.inf
    best_g = -1
    best_t = -1
    for ti in range(0, nt, 50):
        if lo_idx[ti] >= ng:
            continue
        inner, gi = _s1_inner_min(om, gammas, taus[ti], q, lo_idx[ti], ng - 1)
        total = inner + r / np.log(taus[ti])
        if total < best:
            best = total
            best_g = gi
            best_t = ti
    for ti in range(nt):
        if lo_idx[ti] >= ng:
            continue
        if q * amin[ti] >= best:
            continue
        inner, gi = _s1_inner_min(om, gammas, taus[ti], q, lo_idx[ti], ng - 1)
        total = inner + r / np.log(taus[ti])
        if total < best:
            best = total
            best_g = gi
            best_t = ti
    return best, best_g, best_t


@njit(**_JIT)
def s1_batch(om, gammas, taus, lo_idx, amin, t, alphas):
    out = np.empty(alphas.shape[0], dtype=np.float64)
    for i in range(alphas.shape[0]):
        v, _g, _t = s1_scan(om, gammas, taus, lo_idx, amin, t, alphas[i])
        out[i] = v
    return out


@njit(**_JIT)
def s2_scan(om, gammas, t, alpha, b_max):
    """Grid minimum of the one-shot size bound; (-1, -1) when infeasible."""
    best = -1.0
    best_g = -1
    for i in range(gammas.shape[0]):
        if om[i] >= alpha:
            continue
        need = gammas[i] * t / (alpha - om[i])
        b = np.ceil(need)
        if b < 1.0:
            b = 1.0
        if gammas[i] * t / b + om[i] > alpha:
            b += 1.0
        if b > b_max:
            continue
        if best < 0.0 or b < best:
            best = b
            best_g = i
    return best, best_g


@njit(**_JIT)
def s2_batch(om, gammas, t, alphas, b_max):
    out = np.empty(alphas.shape[0], dtype=np.float64)
    for i in range(alphas.shape[0]):
        b, _g = s2_scan(om, gammas, t, alphas[i], b_max)
        out[i] = np.inf if b < 0 else b
    return out
