"""Discretized Musielak-Orlicz and fractional Musielak-Sobolev spaces."""

from .grid import DomainGrid, GridFunction
from .modulars import (
    ModularEvaluator,
    ball_modular,
    evaluator,
    modular_gagliardo,
    modular_Ghat,
    modular_weighted,
    potential_values,
)
from .norms import (
    TOL_LUX,
    NormBatch,
    NormValue,
    char_function_bounds,
    char_function_norm,
    holder_pair,
    luxemburg_batch,
    luxemburg_norm,
    norm_combined,
    norm_conjugate,
    norm_E,
    norm_Ghat,
    norm_power,
    norm_sobolev_conjugate,
    norm_W,
    norm_weighted,
    sandwich_violation,
    seminorm_gagliardo,
)
from .pairs import PairGeometry, PairKernels, gagliardo_canonical

__all__ = [
    "TOL_LUX",
    "DomainGrid",
    "GridFunction",
    "ModularEvaluator",
    "NormBatch",
    "NormValue",
    "PairGeometry",
    "PairKernels",
    "ball_modular",
    "char_function_bounds",
    "char_function_norm",
    "evaluator",
    "gagliardo_canonical",
    "holder_pair",
    "luxemburg_batch",
    "luxemburg_norm",
    "modular_Ghat",
    "modular_gagliardo",
    "modular_weighted",
    "norm_E",
    "norm_Ghat",
    "norm_W",
    "norm_combined",
    "norm_conjugate",
    "norm_power",
    "norm_sobolev_conjugate",
    "norm_weighted",
    "potential_values",
    "sandwich_violation",
    "seminorm_gagliardo",
]
