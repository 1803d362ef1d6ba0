"""Exact univariate polynomials over the rationals.

IntPolynomial wraps a sympy ``Poly`` over QQ and exposes the small set of
operations the certification pipeline needs: Euclidean arithmetic, the
subresultant resultant, Sturm counting and exact real root isolation.
Coefficients are always exact rationals; nothing in this module touches
floating point except the Ball evaluation helpers.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, Rational

from ..errors import EndpointRootError, PolynomialError
from .balls import Ball

X = sympy.Symbol('x')

Coefficient = Union[int, str, Rational]


def to_rational(value: Coefficient) -> Rational:
    """Parse an integer, a decimal integer/rational string or a Rational."""
    try:
        result = sympy.Rational(value)
    except (TypeError, ValueError, sympy.SympifyError) as e:
        raise PolynomialError(f"Invalid coefficient {value!r}: {e}")
    if not result.is_Rational:
        raise PolynomialError(f"Coefficient {value!r} is not rational")
    return result


@dataclass(frozen=True)
class IntPolynomial:
    """Exact polynomial with rational coefficients (integer ones by convention)."""

    poly: Poly

    def __post_init__(self):
        if self.poly.gens != (X,) or self.poly.get_domain() != QQ:
            object.__setattr__(self, 'poly', Poly(self.poly.as_expr(), X, domain=QQ))

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[Coefficient]) -> "IntPolynomial":
        """Build from ascending coefficients, e.g. [-1, -1, 0, 1] is x^3 - x - 1."""
        coeffs = [to_rational(c) for c in coefficients]
        if not coeffs:
            coeffs = [Rational(0)]
        return cls(Poly(list(reversed(coeffs)), X, domain=QQ))

    @classmethod
    def constant(cls, value: Coefficient) -> "IntPolynomial":
        return cls.from_coefficients([value])

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls.from_coefficients([0, 1])

    @classmethod
    def linear_root(cls, root: Coefficient) -> "IntPolynomial":
        """The monic polynomial x - root."""
        return cls.from_coefficients([-to_rational(root), 1])

    # -- structure ----------------------------------------------------------

    @property
    def coefficients(self) -> Tuple[Rational, ...]:
        """Ascending coefficients; the zero polynomial is (0,)."""
        if self.poly.is_zero:
            return (Rational(0),)
        return tuple(reversed([Rational(c) for c in self.poly.all_coeffs()]))

    @property
    def degree(self) -> int:
        if self.poly.is_zero:
            return 0
        return int(self.poly.degree())

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def leading_coefficient(self) -> Rational:
        return Rational(self.poly.LC())

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.leading_coefficient == 1

    @property
    def is_integral(self) -> bool:
        return all(c.q == 1 for c in self.coefficients)

    def integer_coefficients(self) -> List[int]:
        if not self.is_integral:
            raise PolynomialError(f"{self} has non-integer coefficients")
        return [int(c) for c in self.coefficients]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(self.poly + _as_poly(other))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(self.poly - _as_poly(other))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(self.poly * _as_poly(other))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-self.poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def divmod(self, other: "IntPolynomial") -> Tuple["IntPolynomial", "IntPolynomial"]:
        if other.is_zero:
            raise PolynomialError("Division by the zero polynomial")
        quotient, remainder = self.poly.div(other.poly)
        return IntPolynomial(quotient), IntPolynomial(remainder)

    def __mod__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self.divmod(other)[1]

    def gcd(self, other: "IntPolynomial") -> "IntPolynomial":
        """Primitive gcd with positive leading coefficient."""
        if self.is_zero and other.is_zero:
            raise PolynomialError("gcd of two zero polynomials is undefined")
        return IntPolynomial(self.poly.gcd(other.poly)).primitive()

    def primitive(self) -> "IntPolynomial":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero:
            return self
        coeffs = self.coefficients
        denominator = reduce(sympy.ilcm, (c.q for c in coeffs), 1)
        numerators = [int(c * denominator) for c in coeffs]
        content = reduce(sympy.igcd, numerators, 0)
        if numerators[-1] < 0:
            content = -content
        return IntPolynomial.from_coefficients([n // content for n in numerators])

    def monic(self) -> "IntPolynomial":
        if self.is_zero:
            raise PolynomialError("The zero polynomial has no monic form")
        return IntPolynomial(self.poly.monic())

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(self.poly.diff(X))

    def squarefree_part(self) -> "IntPolynomial":
        """p / gcd(p, p'), returned primitive."""
        if self.is_constant:
            return self
        return IntPolynomial(self.poly.sqf_part()).primitive()

    def is_squarefree(self) -> bool:
        return self.is_constant or self.gcd(self.derivative()).is_constant

    def compose(self, inner: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(self.poly.compose(inner.poly))

    def shift(self, k: Coefficient) -> "IntPolynomial":
        """p(x + k)."""
        return self.compose(IntPolynomial.from_coefficients([k, 1]))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, value: Coefficient) -> Rational:
        return Rational(self.poly.eval(to_rational(value)))

    def evaluate_ball(self, value: Ball) -> Ball:
        """Horner evaluation on a ball; call inside a precision context."""
        result = Ball.exact(0)
        for c in reversed(self.coefficients):
            result = result * value + c
        return result

    def cauchy_bound(self) -> Rational:
        """Every complex root has modulus strictly below this rational."""
        if self.is_constant:
            return Rational(1)
        coeffs = self.coefficients
        lead = abs(coeffs[-1])
        return 1 + max(abs(c) / lead for c in coeffs[:-1])

    # -- serialization ------------------------------------------------------

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data: Sequence[Coefficient]) -> "IntPolynomial":
        return cls.from_coefficients(data)

    def __str__(self) -> str:
        return str(self.poly.as_expr())

    def __repr__(self) -> str:
        return f"IntPolynomial({self.to_json()})"


def _as_poly(value) -> Poly:
    if isinstance(value, IntPolynomial):
        return value.poly
    return Poly(to_rational(value), X, domain=QQ)


def poly_arith(p: IntPolynomial, q: IntPolynomial, op: str):
    """Dispatch one of add, sub, mul, divmod, gcd.

    Args:
        p: left operand
        q: right operand; nonzero for divmod and gcd
        op: operation name

    Returns:
        IntPolynomial, or a (quotient, remainder) pair for divmod

    Raises:
        PolynomialError: On an unknown operation or division by zero
    """
    operations = {
        'add': lambda: p + q,
        'sub': lambda: p - q,
        'mul': lambda: p * q,
        'divmod': lambda: p.divmod(q),
        'gcd': lambda: p.gcd(q),
    }
    if op not in operations:
        raise PolynomialError(f"Unknown polynomial operation: {op}")
    if op in ('divmod', 'gcd') and q.is_zero:
        raise PolynomialError(f"{op} by the zero polynomial")
    return operations[op]()


def resultant(p: IntPolynomial, q: IntPolynomial) -> Rational:
    """Sylvester resultant lc(p)^deg(q) * prod q(alpha) over the roots alpha of p.

    This ordering makes Res(defining, residue) equal to the norm with its sign
    for a monic defining polynomial; the lc(q)-first convention differs by
    (-1)^(deg p * deg q), e.g. it gives -1 for Res(x^3 - x - 1, x).

    Args:
        p: nonzero polynomial whose roots are substituted
        q: nonzero polynomial evaluated at those roots

    Returns:
        Exact rational resultant (sympy subresultant computation)

    Raises:
        PolynomialError: If either polynomial is zero
    """
    if p.is_zero or q.is_zero:
        raise PolynomialError("resultant of the zero polynomial")
    if p.is_constant and q.is_constant:
        return Rational(1)
    return Rational(p.poly.resultant(q.poly))


def sturm_sequence(p: IntPolynomial) -> List[IntPolynomial]:
    return [IntPolynomial(s) for s in p.poly.sturm()]


def _sign_changes(values: Iterable[Rational]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: IntPolynomial, lo: Coefficient, hi: Coefficient) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi).

    Args:
        p: nonzero rational polynomial
        lo: exact lower endpoint
        hi: exact upper endpoint, greater than ``lo``

    Returns:
        Sign-change difference of the Sturm chain of the squarefree part

    Raises:
        PolynomialError: If p is zero or the interval is empty
        EndpointRootError: If an endpoint is a root of p
    """
    lo, hi = to_rational(lo), to_rational(hi)
    if p.is_zero:
        raise PolynomialError("Sturm count of the zero polynomial")
    if lo >= hi:
        raise PolynomialError(f"Empty interval ({lo}, {hi})")
    square_free = p.squarefree_part()
    if square_free.is_constant:
        return 0
    for endpoint in (lo, hi):
        if square_free(endpoint) == 0:
            raise EndpointRootError(f"Endpoint {endpoint} is a root of {p}")
    sequence = sturm_sequence(square_free)
    return (_sign_changes(s(lo) for s in sequence)
            - _sign_changes(s(hi) for s in sequence))


def real_root_count(p: IntPolynomial) -> int:
    """Distinct real roots, via a Sturm count over the Cauchy bound interval."""
    bound = p.cauchy_bound()
    return sturm_count(p, -bound, bound)


def isolate_real_roots(p: IntPolynomial, width: Rational) -> List[Tuple[Rational, Rational]]:
    """Disjoint rational intervals of width below ``width``, one per real root, ascending."""
    square_free = p.squarefree_part()
    if square_free.is_constant:
        return []
    intervals = square_free.poly.intervals(eps=width)
    return sorted((Rational(a), Rational(b)) for (a, b), _ in intervals)
