"""Exact tools for Schrodinger operators on birth-death chains.

The essentials are re-exported here; see the submodules for the rest.
"""

from .chain import (
    BirthDeathChain,
    Solution,
    SpectralParams,
    constant_chain,
    estimate_lower_bound,
    full_history_solve,
    solve_forward,
    theta,
)
from .classify import DivergencePolicy, Verdict, VerdictKind, classify_series
from .closedform import alpha_beta, alpha_beta_table, enumerate_compositions, esa_characterize
from .criteria import failure_criterion, hamburger, positive_solution_criterion, transfer_step
from .sequences import Const, Geom, Poly, Table, parse_family
from .series import (
    TruncatedSeries,
    beta_deconvolve,
    expand_rational,
    genfun_constant_case,
    genfun_identity_check,
    ode_identity_residual,
    power_formula,
    stirling2,
)

__version__ = "0.1.0"

__all__ = [
    "BirthDeathChain",
    "Const",
    "DivergencePolicy",
    "Geom",
    "Poly",
    "Solution",
    "SpectralParams",
    "Table",
    "TruncatedSeries",
    "Verdict",
    "VerdictKind",
    "alpha_beta",
    "alpha_beta_table",
    "beta_deconvolve",
    "classify_series",
    "constant_chain",
    "enumerate_compositions",
    "esa_characterize",
    "estimate_lower_bound",
    "expand_rational",
    "failure_criterion",
    "full_history_solve",
    "genfun_constant_case",
    "genfun_identity_check",
    "hamburger",
    "ode_identity_residual",
    "parse_family",
    "positive_solution_criterion",
    "power_formula",
    "solve_forward",
    "stirling2",
    "theta",
    "transfer_step",
]
