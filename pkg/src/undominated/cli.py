"""Command-line interface.

Subcommands: ``gen`` (elections), ``solve`` (build + verify a
committee), ``verify`` (check a given committee), ``tables``
(reproduce the bound tables), ``lowerbound`` (certify the cyclic
instance), ``bench`` (time the numba kernels against the numpy
fallback).

Exit codes: 0 verified pass, 1 verified fail, 2 usage error,
3 equilibrium non-convergence, 4 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from ._util import InputError, NotConvergedError, ResourceLimitError, as_fraction, resolve_jobs, sub_rng
from .adversarial import CyclicInstanceSpec, cyclic_instance, verify_lower_bound
from .bounds import DEFAULT_GRID, GridSpec, make_table
from .builder import BuilderOptions, Strategy, build_iterative, build_one_shot, build_t1, choose_params
from .election import (
    Committee,
    format_election,
    load_election,
    min_undominated_size_oracle,
    random_election,
    save_election,
    undominance_check,
)
from .equilibrium import SolverOptions
from .report import RunReport

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_RESOURCE = 4


def _kv_pairs(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise InputError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        out[key] = val
    return out


def _int(kv, key):
    try:
        return int(kv[key])
    except KeyError:
        raise InputError(f"missing required {key}=...")
    except ValueError:
        raise InputError(f"{key} must be an integer, got {kv[key]!r}")


def cmd_gen(args) -> int:
    if args.adversarial == args.random:
        raise InputError("pick exactly one of --adversarial or --random")
    kv = _kv_pairs(args.params)
    if args.adversarial:
        spec = CyclicInstanceSpec(k=_int(kv, "k"), ell=_int(kv, "ell"))
        e = cyclic_instance(spec)
    else:
        n, m = _int(kv, "n"), _int(kv, "m")
        seed = int(kv.get("seed", "0"))
        if n < 1 or m < 1:
            raise InputError("need n >= 1 and m >= 1")
        e = random_election(n, m, sub_rng(seed, 7))
    if args.out:
        save_election(e, args.out)
        print(f"wrote {e.n}x{e.m} election to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(format_election(e))
    return EXIT_PASS


def _builder_options(args) -> BuilderOptions:
    solver = SolverOptions.from_file(args.solver_config) if args.solver_config else SolverOptions()
    return BuilderOptions(samples=args.samples, seed=args.seed, solver=solver)


def _full_committee(e, t, alpha):
    """Whole candidate set: vacuously undominated (no outsiders exist)."""
    from .builder import BuildResult
    from .election import Committee as _Committee

    committee = _Committee.of(range(e.m))
    report = undominance_check(e, committee, min(t, e.m), alpha)
    return BuildResult(
        committee=committee, report=report, path="full",
        params={"t": t, "alpha": str(alpha)}, nominal_alpha=alpha,
        effective_alpha=alpha, certificates=(), accepted=True,
        accepted_seed=-1, uncovered=0, target=float(e.n),
    )


def _dispatch_build(e, t, alpha, args, opts):
    strategy: Strategy
    if args.k is not None or args.beta is not None:
        if t != 1:
            raise InputError("--k/--beta apply to the t=1 path only")
        from .bounds import alpha_k

        k = args.k if args.k is not None else choose_params(1, alpha).params["k"]
        beta = args.beta if args.beta is not None else alpha_k(k)[0]
        strategy = Strategy("t1", {"k": k, "beta": beta})
    elif t >= 2 and args.budget is not None:
        if args.gamma is None:
            raise InputError("--budget requires --gamma")
        strategy = Strategy("one_shot", {"gamma": args.gamma, "budget": args.budget, "t": t})
    elif t >= 2 and args.tau is not None:
        if args.gamma is None:
            raise InputError("--tau requires --gamma")
        strategy = Strategy("iterative", {"gamma": args.gamma, "tau": args.tau, "t": t})
    else:
        strategy = choose_params(t, alpha)
    if strategy.path == "t1":
        k = strategy.params["k"]
        if k >= e.m:
            return strategy, _full_committee(e, t, alpha)
        return strategy, build_t1(
            e, k, strategy.params["beta"],
            epsilon=args.epsilon, opts=opts, verify_alpha=alpha)
    if strategy.path == "one_shot":
        budget = int(strategy.params["budget"])
        gamma = strategy.params["gamma"]
        # a budget at the candidate count or above holds trivially: take all
        if budget >= e.m or gamma * t > e.m:
            return strategy, _full_committee(e, t, alpha)
        return strategy, build_one_shot(
            e, t, alpha, gamma, budget,
            epsilon=args.epsilon, opts=opts, verify_alpha=alpha)
    if strategy.params["gamma"] * t > e.m:
        return strategy, _full_committee(e, t, alpha)
    return strategy, build_iterative(
        e, t, alpha, strategy.params["gamma"], strategy.params["tau"],
        epsilon=args.epsilon, opts=opts, verify_alpha=alpha)


def cmd_solve(args) -> int:
    alpha = as_fraction(args.alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if args.t < 1:
        raise InputError("t must be >= 1")
    e = load_election(args.election)
    opts = _builder_options(args)
    t0 = time.perf_counter()
    strategy, result = _dispatch_build(e, args.t, alpha, args, opts)
    dt = time.perf_counter() - t0
    extra = {"build": result.to_dict()}
    if args.dump_equilibrium:
        extra["equilibrium"] = result.equilibrium_dump()
    report = RunReport(
        command=["solve", f"--t={args.t}", f"--alpha={alpha}", args.election],
        seed=args.seed,
        input_digest=e.digest(),
        parameters={"path": strategy.path, **result.params,
                    "samples": args.samples, "epsilon": args.epsilon},
        committee=list(result.committee.members),
        verifier=result.report.to_dict(),
        certificate=result.certificates[-1].to_dict() if result.certificates else None,
        extra=extra,
    )
    _emit(report, args.report)
    status = "pass" if result.report.passed else "FAIL"
    print(
        f"[{status}] path={strategy.path} committee={list(result.committee.members)} "
        f"max_dissent={result.report.max_dissent}/{result.report.threshold} "
        f"({dt:.2f}s)",
        file=sys.stderr,
    )
    return EXIT_PASS if result.report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    alpha = as_fraction(args.alpha)
    e = load_election(args.election)
    try:
        members = [int(tok) for tok in args.committee.split(",") if tok.strip() != ""]
    except ValueError:
        raise InputError(f"--committee must be comma-separated integers, got {args.committee!r}")
    committee = Committee.of(members)
    rep = undominance_check(e, committee, args.t, alpha)
    report = RunReport(
        command=["verify", f"--committee={args.committee}", f"--t={args.t}",
                 f"--alpha={alpha}", args.election],
        input_digest=e.digest(),
        parameters={"t": args.t, "alpha": str(alpha)},
        committee=list(committee.members),
        verifier=rep.to_dict(),
    )
    _emit(report, args.report)
    print(
        f"[{'pass' if rep.passed else 'FAIL'}] max_dissent={rep.max_dissent} "
        f"threshold={rep.threshold}",
        file=sys.stderr,
    )
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_oracle(args) -> int:
    alpha = as_fraction(args.alpha)
    e = load_election(args.election)
    size, witness = min_undominated_size_oracle(
        e, args.t, alpha, args.size_cap, jobs=args.jobs, return_witness=True)
    report = RunReport(
        command=["oracle", f"--t={args.t}", f"--alpha={alpha}",
                 f"--size-cap={args.size_cap}", args.election],
        input_digest=e.digest(),
        parameters={"t": args.t, "alpha": str(alpha), "size_cap": args.size_cap},
        committee=None if witness is None else list(witness.members),
        extra={"min_size": size},
    )
    _emit(report, args.report)
    if size is None:
        print(f"none <= {args.size_cap}", file=sys.stderr)
        return EXIT_FAIL
    print(f"min size {size}, witness {list(witness.members)}", file=sys.stderr)
    return EXIT_PASS


def cmd_tables(args) -> int:
    grid = GridSpec(eps_ref=args.eps_ref) if args.eps_ref is not None else DEFAULT_GRID
    t0 = time.perf_counter()
    table = make_table(args.which, k_max=args.k_max, t_max=args.t_max,
                       grid=grid, jobs=args.jobs)
    out = table.to_csv() if args.csv else table.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    print(f"({time.perf_counter() - t0:.1f}s)", file=sys.stderr)
    return EXIT_PASS


def cmd_lowerbound(args) -> int:
    spec = CyclicInstanceSpec(k=args.k, ell=args.ell)
    t0 = time.perf_counter()
    res = verify_lower_bound(spec, args.t, jobs=args.jobs)
    dt = time.perf_counter() - t0
    worst = {
        ",".join(str(c) for c in key): {"outsider": out, "dissent": cnt}
        for key, (out, cnt) in sorted(res.witnesses.items())
    }
    report = RunReport(
        command=["lowerbound", f"--k={args.k}", f"--ell={args.ell}", f"--t={args.t}"],
        parameters={"k": args.k, "ell": args.ell, "t": args.t},
        extra={"result": res.to_dict(),
               "witnesses": worst if args.witnesses else None},
    )
    _emit(report, args.report)
    print(
        f"[{'certified' if res.certified else 'VIOLATED'}] worst fraction "
        f"{res.worst_fraction} >= bound {res.bound} over "
        f"{len(res.witnesses)} committees ({dt:.1f}s)",
        file=sys.stderr,
    )
    return EXIT_PASS if res.certified else EXIT_FAIL


def cmd_bench(args) -> int:
    from . import bench

    bench.run_bench(n=args.n, m=args.m, seed=args.seed, draws=args.draws,
                    stream=sys.stdout)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="undominated",
        description="Construct and verify (t, alpha)-undominated committees.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an election file")
    g.add_argument("--adversarial", action="store_true", help="cyclic lower-bound instance (k=, ell=)")
    g.add_argument("--random", action="store_true", help="impartial culture (n=, m=, seed=)")
    g.add_argument("params", nargs="*", help="key=value parameters")
    g.add_argument("-o", "--out", help="output path (default: stdout)")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="build a committee and verify it")
    s.add_argument("election", help=".elect or JSON election file")
    s.add_argument("--t", type=int, required=True, help="preference depth t")
    s.add_argument("--alpha", required=True, help="dissent threshold (fraction or decimal)")
    s.add_argument("--k", type=int, help="override committee size (t=1 path)")
    s.add_argument("--beta", type=float, help="override threshold-income weight (t=1 path)")
    s.add_argument("--gamma", type=float, help="override scale multiplier (t>=2 paths)")
    s.add_argument("--tau", type=float, help="override budget decay (iterative path)")
    s.add_argument("--budget", "-B", type=int, help="override budget (one-shot path)")
    s.add_argument("--epsilon", type=float, default=1e-3, help="income smoothing parameter")
    s.add_argument("--seed", type=int, default=0, help="global seed")
    s.add_argument("--samples", type=int, default=256, help="rounding draws per acceptance loop")
    s.add_argument("--jobs", type=int, default=None, help="worker threads")
    s.add_argument("--solver-config", help="JSON file with solver options")
    s.add_argument("--report", help="write the JSON run report here")
    s.add_argument("--dump-equilibrium", action="store_true",
                   help="include the raw (x, y, p, certificate) arrays in the report")
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="verify a committee against an election")
    v.add_argument("election")
    v.add_argument("--committee", required=True, help="comma-separated candidate indices")
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--alpha", required=True)
    v.add_argument("--report")
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive minimum committee size")
    o.add_argument("election")
    o.add_argument("--t", type=int, required=True)
    o.add_argument("--alpha", required=True)
    o.add_argument("--size-cap", type=int, required=True)
    o.add_argument("--jobs", type=int, default=None)
    o.add_argument("--report")
    o.set_defaults(fn=cmd_oracle)

    tb = sub.add_parser("tables", help="reproduce the bound tables")
    tb.add_argument("--which", required=True, choices=["alpha_k", "delta", "eta", "omega"])
    tb.add_argument("--k-max", type=int, default=8)
    tb.add_argument("--t-max", type=int, default=8)
    tb.add_argument("--csv", action="store_true")
    tb.add_argument("--eps-ref", type=float, default=None,
                    help="construction headroom used by the iterative bound (default 0.02)")
    tb.add_argument("--jobs", type=int, default=None)
    tb.add_argument("--out")
    tb.set_defaults(fn=cmd_tables)

    lb = sub.add_parser("lowerbound", help="certify the cyclic lower-bound instance")
    lb.add_argument("--k", type=int, required=True)
    lb.add_argument("--ell", type=int, required=True)
    lb.add_argument("--t", type=int, default=1)
    lb.add_argument("--jobs", type=int, default=None)
    lb.add_argument("--witnesses", action="store_true", help="include the full witness map")
    lb.add_argument("--report")
    lb.set_defaults(fn=cmd_lowerbound)

    b = sub.add_parser("bench", help="compare the numba and numpy kernel backends")
    b.add_argument("--n", type=int, default=30)
    b.add_argument("--m", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--draws", type=int, default=20000)
    b.set_defaults(fn=cmd_bench)

    return ap


def _emit(report: RunReport, path):
    if path:
        report.write(path)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if hasattr(args, "jobs"):
        try:
            args.jobs = resolve_jobs(args.jobs)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotConvergedError as exc:
        print(f"equilibrium did not certify: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
