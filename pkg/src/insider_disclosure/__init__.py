"""Insider trading equilibria with heterogeneous beliefs and trade disclosure."""
from .errors import (
    DenominatorCollapse, InsufficientPaths, ModelError, NegativeNoiseVariance,
    NegativeRadicand, NoSignChange, NonPositiveVariance, NumericFailure,
    OutOfRangeK, SecondOrderViolation, UnsupportedRegime, ValidationError, ZeroPeriods,
)
from .params import ModelParams, Regime, validate
from .sequential import EquilibriumSolution, PeriodCoefficients, solve_sequential
from .two_period import compare_regimes, solve_disclosure_two_period, solve_no_disclosure

__all__ = [
    "DenominatorCollapse", "EquilibriumSolution", "InsufficientPaths", "ModelError",
    "ModelParams", "NegativeNoiseVariance", "NegativeRadicand", "NoSignChange",
    "NonPositiveVariance", "NumericFailure", "OutOfRangeK", "PeriodCoefficients", "Regime",
    "SecondOrderViolation", "UnsupportedRegime", "ValidationError", "ZeroPeriods",
    "compare_regimes", "solve_disclosure_two_period", "solve_no_disclosure",
    "solve_sequential", "validate",
]
__version__ = "0.1.0"
