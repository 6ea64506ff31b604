"""Weak form, energy functional and direct-minimization solver."""

from .functional import (
    energy_and_gradient,
    energy_I,
    energy_terms,
    gradient_I,
    monotonicity_gap,
    nontriviality_seed,
    verify_weak_solution,
    weak_form,
)
from .problem import CHAIN, ProblemData
from .solver import MinimizeResult, MinimizerEstimator, SolverConfig, default_direction, minimize

__all__ = [
    "CHAIN",
    "MinimizeResult",
    "MinimizerEstimator",
    "ProblemData",
    "SolverConfig",
    "default_direction",
    "energy_I",
    "energy_and_gradient",
    "energy_terms",
    "gradient_I",
    "minimize",
    "monotonicity_gap",
    "nontriviality_seed",
    "verify_weak_solution",
    "weak_form",
]
