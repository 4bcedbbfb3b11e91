"""Exact cost statistics and spectral constants for three fast Euclidean algorithms."""

from .core import (
    ALGORITHMS,
    Algorithm,
    Digit,
    DomainError,
    InvalidDigitError,
    Trajectory,
    decompose,
    divide,
    get_algorithm,
    map_step,
    reconstruct,
)
from .costs import DigitCost, MissingTableEntryError, detect_span, eval_cost, total_cost
from .lft import Lft, PoleError, digit_to_lft, lft_delta

__all__ = [
    "ALGORITHMS",
    "Algorithm",
    "Digit",
    "DigitCost",
    "DomainError",
    "InvalidDigitError",
    "Lft",
    "MissingTableEntryError",
    "PoleError",
    "Trajectory",
    "decompose",
    "detect_span",
    "digit_to_lft",
    "divide",
    "eval_cost",
    "get_algorithm",
    "lft_delta",
    "map_step",
    "reconstruct",
    "total_cost",
]

__version__ = "0.1.0"
