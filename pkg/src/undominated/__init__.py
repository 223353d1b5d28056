"""Construct and verify (t, alpha)-undominated committees.

A committee C is (t, alpha)-undominated when no outside candidate is
ranked above at least t committee members by more than
``floor(alpha * n)`` voters.  This package builds such committees by
computing approximate Lindahl equilibria with ordinal preferences,
rounding the resulting fractional allocations, and verifying every
output with an independent exhaustive checker.  It also reproduces the
analytic size-bound tables and the cyclic adversarial instances that
certify the matching lower bound.
"""

from ._backend import backend_name
from ._util import InputError, NotConvergedError, ResourceLimitError
from .adversarial import CyclicInstanceSpec, cyclic_instance, verify_lower_bound
from .bounds import alpha_k, delta_t, eta_t, lower_bound_size, omega, s1, s2
from .builder import (
    BuilderOptions,
    build_iterative,
    build_one_shot,
    build_t1,
    choose_params,
    coverage,
)
from .election import (
    Committee,
    Election,
    UndominanceReport,
    format_election,
    load_election,
    min_undominated_size_oracle,
    parse_election,
    prefers,
    random_election,
    save_election,
    t_prefers_committee,
    undominance_check,
)
from .equilibrium import (
    Allocation,
    EquilibriumCertificate,
    EquilibriumResult,
    SolverOptions,
    boundary_candidate,
    demand_lottery,
    producer_best_response,
    solve,
)
from .income import IncomeDistribution, cdf, expectation, make_threshold, make_uniform_tail
from .rounding import RoundingOutcome, dependent_round, rounding_statistics, sample_iid

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "InputError",
    "NotConvergedError",
    "ResourceLimitError",
    "CyclicInstanceSpec",
    "cyclic_instance",
    "verify_lower_bound",
    "alpha_k",
    "delta_t",
    "eta_t",
    "lower_bound_size",
    "omega",
    "s1",
    "s2",
    "BuilderOptions",
    "build_iterative",
    "build_one_shot",
    "build_t1",
    "choose_params",
    "coverage",
    "Committee",
    "Election",
    "UndominanceReport",
    "format_election",
    "load_election",
    "min_undominated_size_oracle",
    "parse_election",
    "prefers",
    "random_election",
    "save_election",
    "t_prefers_committee",
    "undominance_check",
    "Allocation",
    "EquilibriumCertificate",
    "EquilibriumResult",
    "SolverOptions",
    "boundary_candidate",
    "demand_lottery",
    "producer_best_response",
    "solve",
    "IncomeDistribution",
    "cdf",
    "expectation",
    "make_threshold",
    "make_uniform_tail",
    "RoundingOutcome",
    "dependent_round",
    "rounding_statistics",
    "sample_iid",
]
