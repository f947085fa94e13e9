"""Exact local fields of the discrete Gaussian free field on the square lattice."""
from .exact_scalar import ExactScalar, ZERO, ONE, I, PI
from .grid import GridPoint, CornerContour
from .fock_algebra import FockVector, HOLO, ANTI, vacuum, creation_word, is_primary, sugawara_L
from .local_fields import FieldPolynomial, X, laplacian_X, rho, to_fock, from_fock, is_null

__all__ = ["ExactScalar", "ZERO", "ONE", "I", "PI", "GridPoint", "CornerContour",
           "FockVector", "HOLO", "ANTI", "vacuum", "creation_word", "is_primary", "sugawara_L",
           "FieldPolynomial", "X", "laplacian_X", "rho", "to_fock", "from_fock", "is_null"]
__version__ = "0.1.0"
