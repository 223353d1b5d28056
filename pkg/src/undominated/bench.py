"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on a generated ensemble: the equilibrium
solver, exhaustive verification, and dependent rounding.  Both backends
are imported directly, so no environment juggling is needed; the env
flag only picks which backend the package uses at import time.
"""

from __future__ import annotations

import sys
import time

import numpy as np

from . import _backend
from ._util import sub_rng
from .election import random_election
from .income import make_threshold

from . import _kernels_numpy as knp

try:
    if _backend.numba_disabled():
        raise ImportError("numba disabled via environment")
    from . import _kernels_numba as knb
except ImportError:
    knb = None


def _time(fn, repeat=3):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def run_bench(n=30, m=10, seed=0, draws=20000, stream=sys.stdout):
    rng = sub_rng(seed, 99)
    e = random_election(n, m, rng)
    d = make_threshold(0.5, 1e-3)
    kx, kf = d.knots_x, d.knots_f
    ei = d.expectation()
    p0 = np.full((n, m), 0.5)
    y0 = np.full(m, 1.0 / m)
    solver_args = (e.rankings, kx, kf, 1.0, 1.0, False)
    solver_kw = (0.2, 0.3, 1e-3, 3000, 25, 0.5, 1.05, 500, 0.05, ei, 1000, 1500, 2.0)

    members = np.arange(min(3, m), dtype=np.int64)
    yfrac = rng.uniform(0.2, 0.8, size=m)
    uniforms = rng.random((draws, m + 1))
    subsets = np.array([[0, 1, -1, -1]], dtype=np.int64)
    lens = np.array([2], dtype=np.int64)

    backends = [("numpy", knp)] + ([("numba", knb)] if knb is not None else [])
    rows = []
    for name, K in backends:
        if name == "numba":  # trigger compilation outside the timed region
            K.solve_loop(*solver_args, p0.copy(), y0.copy(), *solver_kw)
            K.dissent_counts(e.positions, members, 1)
            K.rounding_stats(yfrac, uniforms[:10], 1e-9, subsets, lens)
        t_solve = _time(lambda: K.solve_loop(*solver_args, p0.copy(), y0.copy(), *solver_kw))
        t_verify = _time(lambda: K.dissent_counts(e.positions, members, 1), repeat=10)
        t_round = _time(lambda: K.rounding_stats(yfrac, uniforms, 1e-9, subsets, lens))
        rows.append((name, t_solve, t_verify, t_round))
    print(f"# bench n={n} m={m} seed={seed} draws={draws}", file=stream)
    print(f"{'backend':<8} {'solve_loop':>12} {'dissent':>12} {'rounding':>12}", file=stream)
    for name, a, b, c in rows:
        print(f"{name:<8} {a:>11.4f}s {b:>11.6f}s {c:>11.4f}s", file=stream)
    if len(rows) == 2:
        base = rows[0]
        fast = rows[1]
        print(
            f"speedup  {base[1] / fast[1]:>11.1f}x {base[2] / fast[2]:>11.1f}x "
            f"{base[3] / fast[3]:>11.1f}x",
            file=stream,
        )
    return rows
