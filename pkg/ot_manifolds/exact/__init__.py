"""Exact polynomials over Q and midpoint-radius balls."""

from .balls import Ball
from .polynomial import IntPolynomial, resultant, sturm_count
from .precision import PrecisionPolicy

__all__ = ['Ball', 'IntPolynomial', 'PrecisionPolicy', 'resultant', 'sturm_count']
