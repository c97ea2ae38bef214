"""normlab: a numerical laboratory for sequence-space norms, operator
norms and attainment diagnostics, pseudospectra, and the Minkowski-functional
renorming of l_2."""

from .coeffs import Coeffs

__version__ = "0.1.0"

__all__ = ["Coeffs", "__version__"]
