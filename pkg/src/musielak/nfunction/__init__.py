"""Generalized N-functions: families, calculus and assumption checks."""

from .assumptions import (
    CandidateNFunction,
    ExponentReport,
    SampleSpec,
    build_separating_power,
    check_assumptions,
    check_growth_conditions,
    estimate_exponents,
    gstar,
    gtilde,
)
from .calculus import (
    SobolevConjugate,
    complementary,
    eval_G,
    eval_g,
    inverse_Ghat,
    sobolev_conjugate,
    sobolev_conjugate_inverse,
)
from .families import BoundN, Custom, DoublePhase, NFunctionFamily, Orlicz, PowerVariable

__all__ = [
    "CandidateNFunction",
    "ExponentReport",
    "SampleSpec",
    "build_separating_power",
    "check_assumptions",
    "check_growth_conditions",
    "estimate_exponents",
    "gstar",
    "gtilde",
    "BoundN",
    "Custom",
    "DoublePhase",
    "NFunctionFamily",
    "Orlicz",
    "PowerVariable",
    "SobolevConjugate",
    "complementary",
    "eval_G",
    "eval_g",
    "inverse_Ghat",
    "sobolev_conjugate",
    "sobolev_conjugate_inverse",
]
