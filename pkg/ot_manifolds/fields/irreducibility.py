"""Sufficient irreducibility criteria for monic integer polynomials."""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import FrozenSet, Optional, Set

import sympy
from sympy import Poly

from ..exact.polynomial import IntPolynomial, X
from ..logging_config import get_logger

logger = get_logger(__name__)

# Primes tried by the degree-pattern criterion.
PATTERN_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
EISENSTEIN_SHIFTS = (0, 1, -1, 2, -2)


class Status(str, Enum):
    PROVEN = 'Proven'
    UNKNOWN = 'Unknown'
    REDUCIBLE = 'Reducible'


class Method(str, Enum):
    RATIONAL_ROOT = 'rational-root'
    EISENSTEIN = 'eisenstein'
    DEGREE_PATTERN = 'mod-p-degree-pattern'
    USER_ASSERTED = 'user-asserted'
    NONE = 'none'


@dataclass(frozen=True)
class IrreducibilityStatus:
    status: Status
    method: Method
    detail: str = ''

    @property
    def proven(self) -> bool:
        return self.status == Status.PROVEN

    def to_dict(self) -> dict:
        return {'status': self.status.value, 'method': self.method.value, 'detail': self.detail}


def rational_root(p: IntPolynomial) -> Optional[int]:
    """An integer root of a monic integer polynomial, if one exists."""
    coeffs = p.integer_coefficients()
    if coeffs[0] == 0:
        return 0
    for d in sympy.divisors(abs(coeffs[0])):
        for candidate in (d, -d):
            if p(candidate) == 0:
                return candidate
    return None


def eisenstein_prime(p: IntPolynomial) -> Optional[int]:
    coeffs = p.integer_coefficients()
    lower = coeffs[:-1]
    if coeffs[0] == 0:
        return None
    for prime in sympy.primefactors(coeffs[0]):
        if coeffs[-1] % prime == 0:
            continue
        if all(c % prime == 0 for c in lower) and coeffs[0] % (prime * prime) != 0:
            return prime
    return None


def _subset_sums(degrees) -> Set[int]:
    sums = set()
    for r in range(1, len(degrees)):
        for combo in combinations(degrees, r):
            sums.add(sum(combo))
    return sums


def degree_pattern_excludes(p: IntPolynomial) -> Optional[FrozenSet[int]]:
    """Primes whose factorization degree patterns leave no room for a rational factor.

    A rational factor of degree d reduces mod p to a product of some of the
    mod-p factors, so d has to be a subset sum of every pattern.
    """
    n = p.degree
    possible = set(range(1, n))
    used = set()
    discriminant = int(p.poly.discriminant())
    for prime in PATTERN_PRIMES:
        if discriminant % prime == 0:
            continue
        reduced = Poly(list(reversed(p.integer_coefficients())), X, modulus=prime)
        _, factors = reduced.factor_list()
        degrees = []
        for factor, multiplicity in factors:
            degrees.extend([factor.degree()] * multiplicity)
        possible &= _subset_sums(degrees)
        used.add(prime)
        if not possible:
            return frozenset(used)
    return None


def check_irreducible(defining: IntPolynomial, asserted: bool = False) -> IrreducibilityStatus:
    """Try the rational-root test, Eisenstein (with small shifts), then mod-p patterns.

    Args:
        defining: monic integer polynomial
        asserted: accept irreducibility on the caller's word when no criterion
            applies; a rational root still makes the polynomial Reducible

    Returns:
        Status and the method that settled it

    Raises:
        ValueError: If ``defining`` is not monic with integer coefficients
    """
    if not (defining.is_monic and defining.is_integral):
        raise ValueError(f"{defining} must be monic with integer coefficients")
    n = defining.degree
    if n <= 1:
        return IrreducibilityStatus(Status.PROVEN, Method.RATIONAL_ROOT, 'degree 1')

    root = rational_root(defining)
    if root is not None:
        return IrreducibilityStatus(Status.REDUCIBLE, Method.RATIONAL_ROOT, f'rational root {root}')
    if n <= 3:
        return IrreducibilityStatus(Status.PROVEN, Method.RATIONAL_ROOT, 'no rational root, degree <= 3')

    for shift in EISENSTEIN_SHIFTS:
        prime = eisenstein_prime(defining.shift(shift))
        if prime is not None:
            detail = f'p={prime}' if shift == 0 else f'p={prime} after x -> x{shift:+d}'
            return IrreducibilityStatus(Status.PROVEN, Method.EISENSTEIN, detail)

    primes = degree_pattern_excludes(defining)
    if primes is not None:
        listed = ','.join(str(q) for q in sorted(primes))
        return IrreducibilityStatus(Status.PROVEN, Method.DEGREE_PATTERN, f'primes {listed}')

    if asserted:
        logger.info("irreducibility_asserted", defining=defining.to_json())
        return IrreducibilityStatus(Status.PROVEN, Method.USER_ASSERTED, 'no criterion applied')

    logger.warning("irreducibility_unknown", defining=defining.to_json())
    return IrreducibilityStatus(Status.UNKNOWN, Method.NONE, 'no criterion applied')
