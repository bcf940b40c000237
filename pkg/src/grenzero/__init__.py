"""Grenander estimator of a monotone density and its behaviour at zero."""

__version__ = "0.1.0"

from .families import parse_family
from .grenander import GrenanderEstimate, ecdf, fit, sup_relative_error
from .limit_laws import ConvergenceError, simulate_hgamma, sup_statistic, ygamma_bounds, ygamma_cdf
from .majorant import Majorant, StepFunction, argmax_affine, lcm, slope, verify_switching
from .mixture import contamination_estimate, estimate_epsilon

__all__ = [
    "ConvergenceError",
    "GrenanderEstimate",
    "Majorant",
    "StepFunction",
    "argmax_affine",
    "contamination_estimate",
    "ecdf",
    "estimate_epsilon",
    "fit",
    "lcm",
    "parse_family",
    "simulate_hgamma",
    "slope",
    "sup_relative_error",
    "sup_statistic",
    "verify_switching",
    "ygamma_bounds",
    "ygamma_cdf",
]
