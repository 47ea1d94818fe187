"""Exact structure-constant computations for the filiform algebras Q_{2m+1} and their solvable extensions."""
from .algebra import LieAlgebra, jacobi_holds, jacobi_violation
from .families import FamilyParams, build_family, build_Q, family_catalog
from .linalg import BACKEND, parse_scalar

__all__ = [
    "BACKEND",
    "FamilyParams",
    "LieAlgebra",
    "build_Q",
    "build_family",
    "family_catalog",
    "jacobi_holds",
    "jacobi_violation",
    "parse_scalar",
]
__version__ = "0.1.0"
