"""Normalised i.i.d. maxima as a decreasing-step Euler scheme, and its jump-process limit."""

from .distributions import (BoundedPower, DoaTag, Exponential, Pareto, StandardNormal, TailModel,
                            Truncated, Uniform01, builtin_models, parse_model)
from .errors import (CompatibilityError, DomainError, EmptyInput, FlowUnderflow, HorizonError,
                     MaxSchemeError, ParseError, QuadratureError, UnboundedError, UnsupportedError)
from .evt_limits import ExtremeType, parse_type
from .norming import NormingSequence, canonical_constants, limit_check
from .pdmp import PdmpPath, QuadConfig, generator_apply
from .scheme import SchemePath, run_direct, run_recursive, step_index, stepwise_eval
from .stats import (generator_residual, invariance_integral, ks_distance, limit_autocovariance, moment,
                    tail_ratio, tail_ratio_gap)
from .testfunctions import TestFunction, bump_family, placed_bump

__version__ = "0.1.0"

__all__ = [
    "BoundedPower", "DoaTag", "Exponential", "Pareto", "StandardNormal", "TailModel", "Truncated",
    "Uniform01", "builtin_models", "parse_model",
    "CompatibilityError", "DomainError", "EmptyInput", "FlowUnderflow", "HorizonError",
    "MaxSchemeError", "ParseError", "QuadratureError", "UnboundedError", "UnsupportedError",
    "ExtremeType", "parse_type",
    "NormingSequence", "canonical_constants", "limit_check",
    "PdmpPath", "QuadConfig", "generator_apply",
    "SchemePath", "run_direct", "run_recursive", "step_index", "stepwise_eval",
    "generator_residual", "invariance_integral", "ks_distance", "limit_autocovariance", "moment",
    "tail_ratio", "tail_ratio_gap",
    "TestFunction", "bump_family", "placed_bump",
]
