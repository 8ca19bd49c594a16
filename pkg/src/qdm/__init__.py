"""Density-matrix parametrizations: Bloch vectors, polarization operators,
three-level dynamics, two-qubit PPT analysis and the Jarlskog factorization.
"""
from .basis import BasisSet, get_basis, ggm_basis, paper_gellmann3, standard_gellmann3, two_qubit_basis
from .bloch import BlochVector, CharCoeffs, char_coeffs_closed, char_coeffs_newton, from_density, is_physical, to_density
from .errors import QdmError
from .linalg import hermitian_eigen, partial_trace, partial_transpose

__version__ = "0.1.0"

__all__ = [
    "BasisSet",
    "BlochVector",
    "CharCoeffs",
    "QdmError",
    "char_coeffs_closed",
    "char_coeffs_newton",
    "from_density",
    "get_basis",
    "ggm_basis",
    "hermitian_eigen",
    "is_physical",
    "paper_gellmann3",
    "partial_trace",
    "partial_transpose",
    "standard_gellmann3",
    "to_density",
    "two_qubit_basis",
]
