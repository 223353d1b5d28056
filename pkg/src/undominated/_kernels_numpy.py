"""Pure-numpy kernel implementations.

Twin of :mod:`undominated._kernels_numba`: same signatures, same
algorithms.  Vectorized where that does not change the result; discrete
outputs (committees, rounding draws, dissent counts) match the numba
backend exactly, floating-point trajectories may differ in final ulps
because reduction orders differ.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "numpy"


# ---------------------------------------------------------------------------
# preference counting


def dissent_counts(pos, members, t):
    member_pos = pos[:, members]  # (n, k)
    cnt = (member_pos[:, :, None] < pos[:, None, :]).sum(axis=1)  # (n, m)
    return (cnt < t).sum(axis=0).astype(np.int64)


def max_dissent(pos, members, t):
    m = pos.shape[1]
    counts = dissent_counts(pos, members, t)
    outside = np.ones(m, dtype=bool)
    outside[members] = False
    if not outside.any():
        return 0, -1
    idx = np.nonzero(outside)[0]
    best = idx[np.argmax(counts[idx])]
    return int(counts[best]), int(best)


def first_passing_committee(pos, combos, t, thresh):
    for i in range(combos.shape[0]):
        count, _ = max_dissent(pos, combos[i], t)
        if count <= thresh:
            return i
    return -1


def batch_max_dissent(pos, combos, t):
    rows = combos.shape[0]
    counts = np.empty(rows, dtype=np.int64)
    witnesses = np.empty(rows, dtype=np.int64)
    for i in range(rows):
        counts[i], witnesses[i] = max_dissent(pos, combos[i], t)
    return counts, witnesses


# ---------------------------------------------------------------------------
# demand evaluation


def _interp_vec(x, kx, kf):
    """Piecewise-linear CDF, same expression tree as the numba scalar."""
    x = np.asarray(x, dtype=np.float64)
    idx = np.clip(np.searchsorted(kx, x, side="right") - 1, 0, kx.shape[0] - 2)
    x0 = kx[idx]
    x1 = kx[idx + 1]
    f0 = kf[idx]
    f1 = kf[idx + 1]
    out = f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    out = np.where(x <= kx[0], kf[0], out)
    out = np.where(x >= kx[-1], kf[-1], out)
    return out


def interp_cdf(x, knots_x, knots_f):
    return _interp_vec(x, knots_x, knots_f)


def demand_profile(order, prices, knots_x, knots_f):
    n, m = order.shape
    fp = _interp_vec(prices, knots_x, knots_f)
    g = np.take_along_axis(fp, order, axis=1)
    runmin = np.minimum.accumulate(g, axis=1)
    x_ranked = np.empty((n, m), dtype=np.float64)
    x_ranked[:, 0] = 1.0 - g[:, 0]
    if m > 1:
        x_ranked[:, 1:] = runmin[:, :-1] - runmin[:, 1:]
    x = np.zeros((n, m + 1), dtype=np.float64)
    np.put_along_axis(x[:, :m], order, x_ranked, axis=1)
    x[:, m] = np.maximum(runmin[:, -1] - knots_f[0], 0.0)
    return x


# ---------------------------------------------------------------------------
# producer response


def producer_argsort(agg):
    """Indices by descending aggregate price, ties to the lowest index."""
    m = agg.shape[0]
    return np.lexsort((np.arange(m), -agg))


def best_response_alloc(agg, budget, capped):
    m = agg.shape[0]
    y = np.zeros(m, dtype=np.float64)
    if not capped:
        y[int(np.argmax(agg))] = budget
        return y
    remaining = budget
    for a in producer_argsort(agg):
        take = 1.0 if remaining > 1.0 else remaining
        y[a] = take
        remaining -= take
        if remaining <= 0.0:
            break
    return y


def best_revenue(agg, budget, capped):
    if not capped:
        return budget * float(np.max(agg))
    srt = np.sort(agg)[::-1]
    full = int(budget)
    rev = float(np.sum(srt[:full]))
    if full < srt.shape[0]:
        rev += (budget - full) * float(srt[full])
    return rev


# ---------------------------------------------------------------------------
# equilibrium residuals and fixed-point loop


def _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode):
    n = x.shape[0]
    sx = scale * x[:, :-1]
    over = np.maximum(sx - y[None, :], 0.0)
    slack = p * np.maximum(y[None, :] - sx, 0.0)
    clearing = float(np.max(over + slack))
    if b1_mode:
        lottery = float(np.max(np.abs(x[:, :-1] - y[None, :])))
    else:
        lottery = 0.0
    best = best_revenue(agg, budget, capped)
    rev = float(agg @ y)
    gap = max(0.0, best - rev) / max(1.0, best)
    if capped:
        relevant = y < 1.0 - 1e-9
        max_agg = float(np.max(agg[relevant])) if relevant.any() else -1.0
    else:
        max_agg = float(np.max(agg))
    pb = 0.0
    if max_agg > 0.0:
        pb = max(0.0, max_agg - scale * n * ei / budget) / n
    return clearing, gap, lottery, pb


def _dist_cap_up(p, fcur, kappa, kx, kf):
    """Vectorized distance to gain kappa of CDF mass moving right."""
    target = fcur + kappa
    idx = np.clip(np.searchsorted(kf, target, side="left"), 1, kf.shape[0] - 1)
    df = kf[idx] - kf[idx - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        xt = kx[idx - 1] + (target - kf[idx - 1]) / df * (kx[idx] - kx[idx - 1])
    dist = xt - p
    return np.where(target >= kf[-1], 2.0, dist)


def _dist_cap_down(p, fcur, kappa, kx, kf):
    """Vectorized distance to shed kappa of CDF mass moving left."""
    target = fcur - kappa
    idx = np.clip(np.searchsorted(kf, target, side="right"), 1, kf.shape[0] - 1)
    df = kf[idx] - kf[idx - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        xt = kx[idx - 1] + (target - kf[idx - 1]) / df * (kx[idx] - kx[idx - 1])
    dist = p - xt
    return np.where(target <= kf[0], 2.0, dist)


def _preimage_span_vec(q, kx, kf):
    """Vectorized price interval [lo, hi] on which F equals q exactly."""
    q = np.asarray(q, dtype=np.float64)
    # lo: first attainment of q
    il = np.clip(np.searchsorted(kf, q, side="left"), 1, kf.shape[0] - 1)
    dfl = kf[il] - kf[il - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = kx[il - 1] + np.where(dfl > 0, (q - kf[il - 1]) / np.where(dfl > 0, dfl, 1.0), 0.0) * (
            kx[il] - kx[il - 1]
        )
    # hi: last attainment of q
    ih = np.clip(np.searchsorted(kf, q, side="right"), 1, kf.shape[0] - 1)
    dfh = kf[ih] - kf[ih - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = kx[ih - 1] + np.where(dfh > 0, (q - kf[ih - 1]) / np.where(dfh > 0, dfh, 1.0), 1.0) * (
            kx[ih] - kx[ih - 1]
        )
    # flats that touch the ends of the knot list
    nk = kf.shape[0]
    low_flat_hi = kx[int(np.argmax(kf > kf[0])) - 1]
    top_flat_lo = kx[nk - int(np.argmax(kf[::-1] < kf[-1]))]
    lo = np.where(q <= kf[0], kx[0], lo)
    hi = np.where(q <= kf[0], low_flat_hi, hi)
    lo = np.where(q >= kf[-1], top_flat_lo, lo)
    hi = np.where(q >= kf[-1], kx[-1], hi)
    return lo, hi


def polish_waterfill(order, kx, kf, y, p, max_rounds, sigma, ei, tol):
    """Lottery search for B=1: exact demand inversion plus water-filling.

    See the numba twin for the algorithm description.
    """
    n, m = order.shape
    slack = 0.45 * tol
    best_res = np.inf
    best_p = p.copy()
    best_y = y.copy()
    rounds = 0
    for k in range(max_rounds):
        rounds = k + 1
        y = np.maximum(y, 1e-14)
        y = y / y.sum()
        cum = np.cumsum(y[order], axis=1)
        tgt = np.maximum(1.0 - cum, 0.0)
        ql = np.maximum(tgt - slack, 0.0)
        qh = np.minimum(tgt + slack, 1.0)
        lo_r, _ = _preimage_span_vec(ql, kx, kf)
        _, hi_r = _preimage_span_vec(qh, kx, kf)
        lo = np.empty((n, m))
        hi = np.empty((n, m))
        np.put_along_axis(lo, order, lo_r, axis=1)
        np.put_along_axis(hi, order, hi_r, axis=1)
        agg = lo.sum(axis=0)
        level = float(np.max(agg))
        p = lo.copy()
        for a in range(m):
            if y[a] <= 2e-14:
                continue
            need = level - agg[a]
            if need <= 0.0:
                continue
            room = hi[:, a] - lo[:, a]
            fill = np.minimum(room, np.maximum(need - np.concatenate(([0.0], np.cumsum(room)[:-1])), 0.0))
            p[:, a] += fill
            agg[a] = level - max(need - float(fill.sum()), 0.0)
        x = demand_profile(order, p, kx, kf)
        clearing, gap, lottery, pb = _residuals(x, y, p, agg, 1.0, 1.0, False, ei, True)
        res = max(clearing, gap, lottery, pb)
        if res < best_res:
            best_res = res
            best_p = p.copy()
            best_y = y.copy()
            if res <= tol:
                return best_p, best_y, best_res, rounds
        rev = float(agg @ y)
        sig = sigma / (1.0 + k / 100.0)
        y = y * np.exp(sig * (agg - rev) / n)
    return best_p, best_y, best_res, rounds


def solve_loop(order, kx, kf, budget, scale, capped, p, y, eta, lam, tol,
               max_iters, check_every, step_shrink, step_grow, warmup,
               f_step_cap, ei, stall_window, polish_rounds, polish_sigma):
    """Damped fixed-point iteration on (x, y, p); see the numba twin."""
    n, m = order.shape
    b1_mode = (not capped) and budget == 1.0 and scale == 1.0
    step = np.full((n, m), eta, dtype=np.float64)
    prev_sign = np.zeros((n, m), dtype=np.float64)
    best_res = np.inf
    best_p = p.copy()
    best_y = y.copy()
    best_break = np.zeros(4, dtype=np.float64)
    window_start = warmup
    kappa_eff = f_step_cap
    last_improve = 0
    it = 0
    while it < max_iters:
        x = demand_profile(order, p, kx, kf)
        agg = p.sum(axis=0)
        if it % check_every == 0 or it == max_iters - 1:
            clearing, gap, lottery, pb = _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)
            res = max(clearing, gap, lottery, pb)
            if res < 0.9 * best_res:
                last_improve = it
            if res < best_res:
                best_res = res
                best_p = p.copy()
                best_y = y.copy()
                best_break[:] = (clearing, gap, lottery, pb)
            if res <= tol:
                return best_p, best_y, best_break, best_res, it + 1
            kappa_eff = min(kappa_eff, max(2.0 * best_res, 0.5 * tol))
            if kappa_eff > f_step_cap:
                kappa_eff = f_step_cap
            if b1_mode and it - last_improve >= stall_window:
                pp, py, pres, _rounds = polish_waterfill(
                    order, kx, kf, best_y.copy(), best_p.copy(),
                    polish_rounds, polish_sigma, ei, tol)
                if pres < best_res:
                    best_res = pres
                    best_p = pp.copy()
                    best_y = py.copy()
                    p = pp.copy()
                    y = py.copy()
                    step = np.minimum(step, 1e-3)
                    prev_sign[:] = 0.0
                    x = demand_profile(order, p, kx, kf)
                    agg = p.sum(axis=0)
                    best_break[:] = _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)
                    if pres <= tol:
                        return best_p, best_y, best_break, best_res, it + 1
                last_improve = it
        br = best_response_alloc(agg, budget, capped)
        if it < warmup:
            w = lam
        else:
            if it - window_start >= window_start:
                window_start = it
            w = min(lam, 1.0 / (it - window_start + 2.0))
        y = (1.0 - w) * y + w * br
        g = scale * x[:, :-1] - y[None, :]
        sign = np.sign(g)
        flipped = sign * prev_sign < 0.0
        step = np.where(flipped, step * step_shrink, np.where(sign != 0.0, np.minimum(step * step_grow, eta), step))
        np.maximum(step, 1e-12, out=step)
        prev_sign = sign
        mv = step * g
        fcur = _interp_vec(p, kx, kf)
        lim_up = _dist_cap_up(p, fcur, kappa_eff, kx, kf)
        lim_dn = _dist_cap_down(p, fcur, kappa_eff, kx, kf)
        mv = np.where(mv > 0.0, np.minimum(mv, lim_up), np.maximum(mv, -lim_dn))
        p = np.clip(p + mv, 0.0, 1.0)
        it += 1
    return best_p, best_y, best_break, best_res, it


def residual_breakdown(order, kx, kf, p, y, budget, scale, capped, ei):
    n, m = order.shape
    b1_mode = (not capped) and budget == 1.0 and scale == 1.0
    x = demand_profile(order, p, kx, kf)
    agg = p.sum(axis=0)
    return _residuals(x, y, p, agg, budget, scale, capped, ei, b1_mode)


# ---------------------------------------------------------------------------
# dependent rounding (pipage walk)


def pipage_round(y, uniforms, snap):
    m = y.shape[0]
    z = y.copy()
    frac = [a for a in range(m) if snap < z[a] < 1.0 - snap]
    u_idx = 0
    while len(frac) >= 2:
        i, j = frac[0], frac[1]
        alpha = min(1.0 - z[i], z[j])
        beta = min(z[i], 1.0 - z[j])
        if uniforms[u_idx] * (alpha + beta) < beta:
            z[i] += alpha
            z[j] -= alpha
        else:
            z[i] -= beta
            z[j] += beta
        u_idx += 1
        frac = [a for a in frac if snap < z[a] < 1.0 - snap]
    if frac:
        a = frac[0]
        z[a] = 1.0 if uniforms[u_idx] < z[a] else 0.0
    return (z > 0.5).astype(np.int8)


def pipage_round_many(y, uniforms, snap):
    draws = uniforms.shape[0]
    out = np.empty((draws, y.shape[0]), dtype=np.int8)
    for d in range(draws):
        out[d] = pipage_round(y, uniforms[d], snap)
    return out


def rounding_stats(y, uniforms, snap, subsets, subset_len):
    draws = uniforms.shape[0]
    m = y.shape[0]
    q = subsets.shape[0]
    sel_counts = np.zeros(m, dtype=np.int64)
    cards = np.empty(draws, dtype=np.int64)
    zero_counts = np.zeros(q, dtype=np.int64)
    for d in range(draws):
        z = pipage_round(y, uniforms[d], snap)
        sel_counts += z
        cards[d] = int(z.sum())
        for s in range(q):
            if not z[subsets[s, : subset_len[s]]].any():
                zero_counts[s] += 1
    return sel_counts, cards, zero_counts


# ---------------------------------------------------------------------------
# bound optimizers


def _s1_eval(om, gammas, tau, q, i):
    d = 1.0 - om[i] * tau
    a = gammas[i] * tau / (tau - 1.0) / d
    b = math.log(1.0 / d) / math.log(tau)
    return q * a + b


def _s1_inner_min(om, gammas, tau, q, lo, hi):
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


def _a_eval(om, gammas, tau, i):
    d = 1.0 - om[i] * tau
    return gammas[i] * tau / (tau - 1.0) / d


def tau_tables(om, gammas, taus):
    nt = taus.shape[0]
    ng = gammas.shape[0]
    lo_idx = np.empty(nt, dtype=np.int64)
    amin = np.empty(nt, dtype=np.float64)
    for ti in range(nt):
        tau = taus[ti]
        lo = int(np.searchsorted(-om, -(1.0 / tau), side="right"))
        lo_idx[ti] = lo
        if lo >= ng:
            amin[ti] = np.inf
            continue
        a, b = lo, ng - 1
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


def s1_scan(om, gammas, taus, lo_idx, amin, t, alpha):
    q = t / alpha
    r = math.log(1.0 / alpha)
    ng = gammas.shape[0]
    nt = taus.shape[0]
    best = np.inf
    best_g = -1
    best_t = -1
    for ti in range(0, nt, 50):
        if lo_idx[ti] >= ng:
            continue
        inner, gi = _s1_inner_min(om, gammas, taus[ti], q, lo_idx[ti], ng - 1)
        total = inner + r / math.log(taus[ti])
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
        total = inner + r / math.log(taus[ti])
        if total < best:
            best = total
            best_g = gi
            best_t = ti
    return best, best_g, best_t


def s1_batch(om, gammas, taus, lo_idx, amin, t, alphas):
    out = np.empty(alphas.shape[0], dtype=np.float64)
    for i in range(alphas.shape[0]):
        out[i], _, _ = s1_scan(om, gammas, taus, lo_idx, amin, t, alphas[i])
    return out


def s2_scan(om, gammas, t, alpha, b_max):
    feasible = om < alpha
    if not feasible.any():
        return -1.0, -1
    idx = np.nonzero(feasible)[0]
    need = gammas[idx] * t / (alpha - om[idx])
    b = np.ceil(need)
    b = np.where(b < 1.0, 1.0, b)
    bad = gammas[idx] * t / b + om[idx] > alpha
    b = np.where(bad, b + 1.0, b)
    ok = b <= b_max
    if not ok.any():
        return -1.0, -1
    sub = np.nonzero(ok)[0]
    j = sub[np.argmin(b[sub])]
    return float(b[j]), int(idx[j])


def s2_batch(om, gammas, t, alphas, b_max):
    out = np.empty(alphas.shape[0], dtype=np.float64)
    for i in range(alphas.shape[0]):
        b, _ = s2_scan(om, gammas, t, alphas[i], b_max)
        out[i] = np.inf if b < 0 else b
    return out
