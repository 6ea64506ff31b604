"""Randomized property suites, probes and their reports."""

from ..reports import PropertyReport, SuiteReport, Tracker, signed_violation
from .corpus import CorpusSpec, builtin_families, bump_corpus, evaluate_bumps, suite_grid, variable_exponent, \
    with_declared
from .probes import ProbeCurve, packing_count, probe_embedding_constant, probe_radial_decay
from .suites import SUITES, TOL_FD, TOL_GAP, TOL_MONOTONE, TOL_NORM, TOL_SCALAR, TOL_YOUNG, default_problem, \
    gradient_fd_errors, negative_control, norm_equivalence_grid, run_suite, suite_char_bounds, suite_convexity, \
    suite_norm_equivalence, suite_sandwich, suite_separating, suite_variational, suite_young_holder, \
    variational_grid

__all__ = [
    "PropertyReport", "SuiteReport", "Tracker", "signed_violation",
    "CorpusSpec", "builtin_families", "bump_corpus", "evaluate_bumps", "suite_grid", "variable_exponent",
    "with_declared", "ProbeCurve", "packing_count", "probe_embedding_constant", "probe_radial_decay",
    "SUITES", "TOL_FD", "TOL_GAP", "TOL_MONOTONE", "TOL_NORM", "TOL_SCALAR", "TOL_YOUNG", "default_problem",
    "gradient_fd_errors", "negative_control", "norm_equivalence_grid", "run_suite", "suite_char_bounds",
    "suite_convexity", "suite_norm_equivalence", "suite_sandwich", "suite_separating", "suite_variational",
    "suite_young_holder", "variational_grid",
]
