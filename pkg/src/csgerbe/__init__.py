"""Numerical differential forms of the Chern–Simons 2-gerbe on path and loop groups."""
from .errors import (GerbeError, GridTooCoarse, InvalidDegree, InvalidInput, InvalidSpace,
                     UnknownCheck, UnknownMap, UnsupportedDegree)
from .lie import GroupSpec, killing_form
from .paths import GridSpec, PathTangent, SampledLoop, SampledPath
from .forms import FormEvaluator, coboundary, exterior_derivative, fiber_integrate, pullback, wedge
from .checks import CheckConfig, CheckReport, run_all, run_check

__version__ = "0.1.0"

__all__ = [
    "GerbeError", "GridTooCoarse", "InvalidDegree", "InvalidInput", "InvalidSpace", "UnknownCheck",
    "UnknownMap", "UnsupportedDegree", "GroupSpec", "killing_form", "GridSpec", "PathTangent",
    "SampledLoop", "SampledPath", "FormEvaluator", "coboundary", "exterior_derivative",
    "fiber_integrate", "pullback", "wedge", "CheckConfig", "CheckReport", "run_all", "run_check",
]
