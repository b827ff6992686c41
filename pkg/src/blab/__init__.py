"""Exact combinatorics and numerics for the shift locus of complex polynomials."""

from .core import Elamination, Leaf, angle, chords_cross, fmt, leaf_image, validate_elamination
from .errors import BlabError, DomainError, InternalAssertion

__version__ = "0.1.0"

__all__ = [
    "Elamination", "Leaf", "angle", "chords_cross", "fmt", "leaf_image", "validate_elamination",
    "BlabError", "DomainError", "InternalAssertion", "__version__",
]
