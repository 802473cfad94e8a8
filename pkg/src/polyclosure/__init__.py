"""Partial polymorphism closure, pebble games with quantifier moves, CFI
structures and the Cops&Robber game, as exact finite-instance tools."""
from .errors import (BudgetExceeded, InvariantViolation, PolyclosureError,
                     PreconditionError, VocabularyMismatch)
from .structures import (Structure, Symbol, Vocabulary, are_isomorphic, find_homomorphism,
                         find_isomorphism, is_partial_isomorphism, leq, union)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "InvariantViolation", "PolyclosureError", "PreconditionError",
    "VocabularyMismatch", "Structure", "Symbol", "Vocabulary", "are_isomorphic",
    "find_homomorphism", "find_isomorphism", "is_partial_isomorphism", "leq", "union",
    "__version__",
]
