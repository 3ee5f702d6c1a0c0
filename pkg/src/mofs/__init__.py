"""Mutually orthogonal frequency squares: constructions, verification, mates and maximality certificates."""

from .core import (FrequencySquare, Join, MofsReport, MofsSet, SquareError, TypeMismatch,
                   apply_isomorphism, are_orthogonal, eta, load_any, pair_counts, psi,
                   validate_mofs)
from .constructions import (circulant_extension, complete_mofs_prime_power, dilate,
                            dilation_certificate, lift_blocks)
from .exact_search import SearchBudget, Status, find_mate, is_maximal
from .balance import find_binary_mate
from .tower import tower_mate

__version__ = "0.1.0"

__all__ = [
    "FrequencySquare", "Join", "MofsReport", "MofsSet", "SquareError", "TypeMismatch",
    "apply_isomorphism", "are_orthogonal", "eta", "load_any", "pair_counts", "psi",
    "validate_mofs", "circulant_extension", "complete_mofs_prime_power", "dilate",
    "dilation_certificate", "lift_blocks", "SearchBudget", "Status", "find_mate",
    "is_maximal", "find_binary_mate", "tower_mate",
]
