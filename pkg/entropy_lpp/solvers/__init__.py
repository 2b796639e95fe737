"""Exact solvers over finite point clouds."""

from entropy_lpp.solvers.elpp import (
    ElppResult,
    ParetoFrontier,
    brute_force_elpp,
    build_frontier,
    elpp_value,
    lipschitz_lpp_value,
    min_entropy_for_count,
    min_entropy_profile,
    scale_of,
    tail_bound,
)
from entropy_lpp.solvers.variational import (
    BetaSweep,
    UniquenessReport,
    VariationalResult,
    beta_sweep,
    brute_force_variational,
    check_maximizer_unique,
    continuum_T_truncated,
    solve_all,
    solve_tail,
    solve_variational,
)

__all__ = [
    "BetaSweep",
    "ElppResult",
    "ParetoFrontier",
    "UniquenessReport",
    "VariationalResult",
    "beta_sweep",
    "brute_force_elpp",
    "brute_force_variational",
    "build_frontier",
    "check_maximizer_unique",
    "continuum_T_truncated",
    "elpp_value",
    "lipschitz_lpp_value",
    "min_entropy_for_count",
    "min_entropy_profile",
    "scale_of",
    "solve_all",
    "solve_tail",
    "solve_variational",
    "tail_bound",
]
