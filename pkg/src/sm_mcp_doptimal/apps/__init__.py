"""Robust and maximin design solvers built on the Toda evaluation."""

from .maximin import MaximinSpec, gamma, min_gamma, p_mean_objective, psi_k, solve_maximin
from .robust import RobustSpec, robust_constraint, s_recursion, solve_robust

__all__ = [
    "MaximinSpec",
    "RobustSpec",
    "gamma",
    "min_gamma",
    "p_mean_objective",
    "psi_k",
    "robust_constraint",
    "s_recursion",
    "solve_maximin",
    "solve_robust",
]
