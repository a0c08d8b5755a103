"""Sharp L^p bounds for the uncentered maximal function, checked exactly on step functions."""

from .best_constant import c_p, solve_cp
from .maximal_1d import left_max, right_max, uncentered_max
from .step_fn import DomainError, PNormParams, StepFunction

__all__ = [
    "DomainError",
    "PNormParams",
    "StepFunction",
    "c_p",
    "left_max",
    "right_max",
    "solve_cp",
    "uncentered_max",
]
__version__ = "0.1.0"
