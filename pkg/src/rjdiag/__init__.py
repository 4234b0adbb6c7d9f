"""Randomized joint diagonalization of nearly commuting symmetric matrix families."""

from .drjd import DeflationTrace, column_residuals, drjd
from .eig import EigenDecomposition, symmetric_eig
from .matfam import (
    NoiseBudget,
    OrthogonalMatrix,
    SymmetricFamily,
    commutator_norms,
    load_family,
    random_linear_combination,
    save_family,
)
from .metrics import least_squares_measure, moreau_amari, offdiag, pham_measure
from .rjd import TrialResult, eigenvalue_vectors, rjd, select_by_diag

__all__ = [
    "DeflationTrace",
    "EigenDecomposition",
    "NoiseBudget",
    "OrthogonalMatrix",
    "SymmetricFamily",
    "TrialResult",
    "column_residuals",
    "commutator_norms",
    "drjd",
    "eigenvalue_vectors",
    "least_squares_measure",
    "load_family",
    "moreau_amari",
    "offdiag",
    "pham_measure",
    "random_linear_combination",
    "rjd",
    "save_family",
    "select_by_diag",
    "symmetric_eig",
]

__version__ = "0.1.0"
