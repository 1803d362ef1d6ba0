"""Number fields given by a monic integer polynomial, with certified embeddings.

Elements live in the order Z[theta] (power basis), theta being the class of
x modulo the defining polynomial. Embeddings are ordered as

    sigma_1 .. sigma_s            real, ascending
    sigma_{s+1} .. sigma_{s+t}    one root per conjugate pair, Im > 0,
                                  ascending real part then imaginary part
    sigma_{s+t+1} .. sigma_n      conjugates of the previous block

unless a restriction match has swapped some pairs (see ``with_swaps``).
"""

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf
import sympy
from sympy import Poly, QQ, Rational

from ..errors import FieldError, RootCertificationError
from ..exact.balls import Ball, rational_to_mpf
from ..exact.polynomial import (IntPolynomial, X, isolate_real_roots,
                                real_root_count, resultant)
from ..exact.precision import PrecisionPolicy
from ..logging_config import get_logger
from .irreducibility import IrreducibilityStatus, Status, check_irreducible

logger = get_logger(__name__)

T = sympy.Symbol('t')

ORDER_CAVEAT = ('arithmetic uses the power-basis order Z[theta]; when Z[theta] != O_K '
                'the translation lattice has finite index in O_K')


@dataclass(frozen=True, eq=False)
class NumberField:
    """Defining polynomial, signature and certified root balls."""

    defining: IntPolynomial
    signature: Tuple[int, int]
    roots: Tuple[Ball, ...]
    irreducibility: IrreducibilityStatus
    policy: PrecisionPolicy
    label: str = ''
    swaps: FrozenSet[int] = dataclass_field(default_factory=frozenset)

    @property
    def degree(self) -> int:
        return self.defining.degree

    @property
    def s(self) -> int:
        return self.signature[0]

    @property
    def t(self) -> int:
        return self.signature[1]

    @property
    def m(self) -> int:
        """Number of coordinates of H^s x C^t."""
        return self.s + self.t

    @property
    def is_ot_eligible(self) -> bool:
        return self.s > 0 and self.t > 0

    @property
    def algebra_key(self) -> Tuple[Rational, ...]:
        return self.defining.coefficients

    def __eq__(self, other) -> bool:
        if not isinstance(other, NumberField):
            return NotImplemented
        return self.algebra_key == other.algebra_key and self.swaps == other.swaps

    def __hash__(self) -> int:
        return hash((self.algebra_key, self.swaps))

    # -- elements -----------------------------------------------------------

    def element(self, coefficients: Iterable) -> "AlgebraicNumber":
        return AlgebraicNumber(IntPolynomial.from_coefficients(coefficients), self)

    def rational(self, value) -> "AlgebraicNumber":
        return AlgebraicNumber(IntPolynomial.constant(value), self)

    @property
    def one(self) -> "AlgebraicNumber":
        return self.rational(1)

    @property
    def zero(self) -> "AlgebraicNumber":
        return self.rational(0)

    @property
    def generator(self) -> "AlgebraicNumber":
        return AlgebraicNumber(IntPolynomial.x(), self)

    def power_basis(self) -> List["AlgebraicNumber"]:
        theta = self.generator
        basis = [self.one]
        for _ in range(1, self.degree):
            basis.append(basis[-1] * theta)
        return basis

    def evaluate(self, poly: IntPolynomial, x: "AlgebraicNumber") -> "AlgebraicNumber":
        """poly(x) computed exactly in the field."""
        result = self.zero
        for c in reversed(poly.coefficients):
            result = result * x + self.rational(c)
        return result

    # -- embeddings ---------------------------------------------------------

    def at_precision(self, policy: PrecisionPolicy) -> "NumberField":
        """This field with roots certified at ``policy`` (never lowers precision)."""
        if policy.working_bits <= self.policy.working_bits:
            return self
        roots = _certified_roots(tuple(self.defining.integer_coefficients()),
                                 self.s, self.t, policy.working_bits)
        rebuilt = NumberField(self.defining, self.signature, roots,
                              self.irreducibility, policy, self.label)
        return rebuilt.with_swaps(self.swaps) if self.swaps else rebuilt

    def with_swaps(self, pairs: Iterable[int]) -> "NumberField":
        """Exchange the representative of each listed pair (1..t) with its conjugate."""
        pairs = frozenset(pairs)
        for j in pairs:
            if not 1 <= j <= self.t:
                raise FieldError(f"No complex pair {j} in a field with t={self.t}")
        roots = list(self.roots)
        for j in pairs:
            a, b = self.s + j - 1, self.s + self.t + j - 1
            roots[a], roots[b] = roots[b], roots[a]
        return NumberField(self.defining, self.signature, tuple(roots), self.irreducibility,
                           self.policy, self.label, self.swaps ^ pairs)

    def is_real_index(self, i: int) -> bool:
        return 1 <= i <= self.s

    def conjugate_index(self, i: int) -> int:
        """Index of the embedding conjugate to sigma_i (1-based)."""
        if i <= self.s:
            return i
        if i <= self.s + self.t:
            return i + self.t
        return i - self.t

    def separation(self) -> mpf:
        best = mpmath.inf
        for a in range(self.degree):
            for b in range(a + 1, self.degree):
                best = min(best, self.roots[a].distance(self.roots[b]))
        return best

    def to_dict(self, digits: int = 30) -> dict:
        with self.policy.context():
            embeddings = [root.to_interval(digits) for root in self.roots]
        return {
            'label': self.label,
            'defining': self.defining.to_json(),
            'degree': self.degree,
            'signature': list(self.signature),
            'irreducibility': self.irreducibility.to_dict(),
            'order': 'Z[theta]',
            'order_caveat': ORDER_CAVEAT,
            'embeddings': embeddings,
            'swapped_pairs': sorted(self.swaps),
        }

    def __repr__(self) -> str:
        name = self.label or str(self.defining)
        return f"NumberField({name}, signature={self.signature})"


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """Residue polynomial of degree < n modulo the field's defining polynomial."""

    residue: IntPolynomial
    field: NumberField

    def __post_init__(self):
        if self.residue.degree >= self.field.degree and not self.residue.is_zero:
            object.__setattr__(self, 'residue', self.residue % self.field.defining)

    @property
    def ambient(self) -> NumberField:
        return self.field

    def _check(self, other: "AlgebraicNumber") -> "AlgebraicNumber":
        if not isinstance(other, AlgebraicNumber):
            return self.field.rational(other)
        if other.field.algebra_key != self.field.algebra_key:
            raise FieldError("Elements belong to different fields")
        return other

    def __add__(self, other) -> "AlgebraicNumber":
        other = self._check(other)
        return AlgebraicNumber(self.residue + other.residue, self.field)

    __radd__ = __add__

    def __sub__(self, other) -> "AlgebraicNumber":
        other = self._check(other)
        return AlgebraicNumber(self.residue - other.residue, self.field)

    def __rsub__(self, other) -> "AlgebraicNumber":
        return self._check(other) - self

    def __neg__(self) -> "AlgebraicNumber":
        return AlgebraicNumber(-self.residue, self.field)

    def __mul__(self, other) -> "AlgebraicNumber":
        other = self._check(other)
        return AlgebraicNumber((self.residue * other.residue) % self.field.defining, self.field)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero in a number field")
        inverse = self.residue.poly.invert(self.field.defining.poly)
        return AlgebraicNumber(IntPolynomial(inverse), self.field)

    def __truediv__(self, other) -> "AlgebraicNumber":
        return self * self._check(other).inverse()

    def __pow__(self, exponent: int) -> "AlgebraicNumber":
        base = self if exponent >= 0 else self.inverse()
        exponent = abs(exponent)
        result = self.field.one
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgebraicNumber):
            return (self.field.algebra_key == other.field.algebra_key
                    and self.residue == other.residue)
        if isinstance(other, (int, Rational)):
            return self.is_rational and self.rational_value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.algebra_key, self.residue))

    @property
    def is_zero(self) -> bool:
        return self.residue.is_zero

    @property
    def is_one(self) -> bool:
        return self.is_rational and self.rational_value == 1

    @property
    def is_rational(self) -> bool:
        return self.residue.is_constant

    @property
    def rational_value(self) -> Rational:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.residue.coefficients[0]

    @property
    def coefficients(self) -> Tuple[Rational, ...]:
        """Power-basis coordinates, padded to the field degree."""
        coeffs = list(self.residue.coefficients)
        return tuple(coeffs + [Rational(0)] * (self.field.degree - len(coeffs)))

    def in_field(self, field: NumberField) -> "AlgebraicNumber":
        """Rebind to another presentation (e.g. swapped embeddings) of the same field."""
        if field.algebra_key != self.field.algebra_key:
            raise FieldError("Cannot rebind an element to a different field")
        return AlgebraicNumber(self.residue, field)

    def multiplication_matrix(self) -> sympy.Matrix:
        """Matrix of y -> self*y on the power basis; columns are images of basis vectors."""
        columns = [(self * b).coefficients for b in self.field.power_basis()]
        return sympy.Matrix(self.field.degree, self.field.degree,
                            lambda i, j: columns[j][i])

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coefficients]

    def __str__(self) -> str:
        return str(self.residue.poly.as_expr().subs(X, sympy.Symbol('theta')))

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.to_json()})"


# -- root certification ------------------------------------------------------

def _disk_radius(defining: IntPolynomial, derivative: IntPolynomial, z: mpc) -> Optional[mpf]:
    """n * |p(z)| / |p'(z)| bounds the distance from z to the nearest root."""
    point = Ball.exact(z)
    value = defining.evaluate_ball(point)
    slope = derivative.evaluate_ball(point)
    if slope.lower() <= 0:
        return None
    return defining.degree * value.upper() / slope.lower()


def _try_certify(defining: IntPolynomial, s: int, t: int, bits: int) -> Optional[Tuple[Ball, ...]]:
    n = defining.degree
    derivative = defining.derivative()
    with mpmath.workprec(bits):
        reals = []
        for a, b in isolate_real_roots(defining, Rational(1, 2 ** bits)):
            mid = rational_to_mpf((a + b) / 2)
            rad = rational_to_mpf((b - a) / 2) + abs(mid) * mpmath.ldexp(mpf(1), 1 - bits)
            reals.append(Ball(mpc(mid), rad, real=True))
        if len(reals) != s:
            logger.debug("real_root_mismatch", expected=s, found=len(reals), bits=bits)
            return None

        reps = []
        if t:
            try:
                with mpmath.workprec(bits + 32):
                    approx = mpmath.polyroots(list(reversed(defining.integer_coefficients())),
                                              maxsteps=100 + 20 * n, extraprec=bits)
            except mpmath.libmp.NoConvergence:
                logger.debug("root_iteration_no_convergence", bits=bits)
                return None
            upper = sorted((mpc(z) for z in approx if mpmath.im(z) > 0),
                           key=lambda z: -mpmath.im(z))[:t]
            if len(upper) != t:
                return None
            for z in upper:
                radius = _disk_radius(defining, derivative, z)
                if radius is None or mpmath.im(z) <= radius:
                    return None
                reps.append(Ball(z, radius))
            reps.sort(key=lambda b: (b.mid.real, b.mid.imag))

        roots = tuple(reals + reps + [r.conjugate() for r in reps])
        for a in range(n):
            for b in range(a + 1, n):
                gap = roots[a].distance(roots[b])
                if not (roots[a].rad < gap / 2 and roots[b].rad < gap / 2):
                    logger.debug("root_disks_not_separated", bits=bits, pair=[a + 1, b + 1])
                    return None
        return roots


@lru_cache(maxsize=128)
def _certified_roots(coefficients: Tuple[int, ...], s: int, t: int, bits: int) -> Tuple[Ball, ...]:
    defining = IntPolynomial.from_coefficients(coefficients)
    for policy in PrecisionPolicy(bits).escalations():
        roots = _try_certify(defining, s, t, policy.working_bits)
        if roots is not None:
            if policy.working_bits != bits:
                logger.debug("root_certification_escalated", bits=policy.working_bits)
            return roots
    raise RootCertificationError(
        f"Could not certify separated roots of {defining} up to {bits * 4} bits")


@lru_cache(maxsize=128)
def _irreducibility(coefficients: Tuple[int, ...], asserted: bool) -> IrreducibilityStatus:
    return check_irreducible(IntPolynomial.from_coefficients(coefficients), asserted)


def build_field(defining: IntPolynomial, policy: Optional[PrecisionPolicy] = None,
                label: str = '', assert_irreducible: bool = False) -> NumberField:
    """Compute the signature exactly and certify all embeddings.

    The signature comes from a Sturm count, so it is exact. Real roots are
    isolated by bisection and complex representatives are certified by
    Newton disks; precision is doubled (up to 4x) until the disks separate.

    Args:
        defining: monic integer polynomial of degree >= 2
        policy: working precision (128 bits when omitted)
        label: name carried into certificates and logs
        assert_irreducible: record irreducibility as user-asserted when no
            criterion settles it

    Returns:
        NumberField with its irreducibility status attached

    Raises:
        FieldError: If the polynomial is not monic integral, has degree < 2,
            is not squarefree or has a rational root
        RootCertificationError: If the roots cannot be separated at 4x the
            working precision
    """
    policy = policy or PrecisionPolicy()
    if defining.degree < 2:
        raise FieldError(f"Defining polynomial {defining} must have degree >= 2")
    if not (defining.is_monic and defining.is_integral):
        raise FieldError(f"Defining polynomial {defining} must be monic with integer coefficients")
    if not defining.is_squarefree():
        raise FieldError(f"Defining polynomial {defining} is not squarefree")

    coefficients = tuple(defining.integer_coefficients())
    status = _irreducibility(coefficients, assert_irreducible)
    if status.status == Status.REDUCIBLE:
        raise FieldError(f"Defining polynomial {defining} is reducible ({status.detail})")

    s = real_root_count(defining)
    t = (defining.degree - s) // 2
    roots = _certified_roots(coefficients, s, t, policy.working_bits)
    field = NumberField(defining, (s, t), roots, status, policy, label)
    logger.debug("field_built", field=label or str(defining), signature=[s, t],
                 irreducibility=status.status.value)
    return field


# -- element operations ------------------------------------------------------

def embed(x: AlgebraicNumber, i: int, policy: Optional[PrecisionPolicy] = None) -> Ball:
    """sigma_i(x) as a ball; real (by construction) for i <= s.

    Args:
        x: element of the field
        i: 1-based embedding index in the documented order
        policy: recertify the roots at this precision first (never lowers it)

    Returns:
        Ball containing sigma_i(x)

    Raises:
        IndexError: If ``i`` is outside 1..n
    """
    field = x.field.at_precision(policy) if policy else x.field
    if not 1 <= i <= field.degree:
        raise IndexError(f"Embedding index {i} outside 1..{field.degree}")
    with field.policy.context():
        if x.is_rational:
            return Ball.exact(x.rational_value)
        return x.residue.evaluate_ball(field.roots[i - 1])


def embeddings(x: AlgebraicNumber, policy: Optional[PrecisionPolicy] = None) -> Tuple[Ball, ...]:
    field = x.field.at_precision(policy) if policy else x.field
    y = x.in_field(field)
    return tuple(embed(y, i) for i in range(1, field.degree + 1))


def norm(x: AlgebraicNumber) -> Rational:
    """N(x) = prod_i sigma_i(x), computed exactly.

    Args:
        x: element of the field

    Returns:
        Res(defining, residue), which is the norm because the defining
        polynomial is monic; 0 for x = 0
    """
    if x.is_zero:
        return Rational(0)
    return resultant(x.field.defining, x.residue)


def characteristic_polynomial(x: AlgebraicNumber) -> IntPolynomial:
    """Res_t(p(t), y - q(t)) = prod_i (y - sigma_i(x)), as a polynomial in x."""
    n = x.field.degree
    if x.is_rational:
        return IntPolynomial(Poly((X - x.rational_value) ** n, X, domain=QQ))
    p_t = x.field.defining.poly.as_expr().subs(X, T)
    q_t = x.residue.poly.as_expr().subs(X, T)
    res = sympy.resultant(p_t, X - q_t, T)
    return IntPolynomial(Poly(sympy.expand(res), X, domain=QQ))


def trace(x: AlgebraicNumber) -> Rational:
    """Sum of all conjugates."""
    charpoly = characteristic_polynomial(x)
    return -charpoly.coefficients[-2]


def min_poly(x: AlgebraicNumber) -> IntPolynomial:
    """Monic minimal polynomial of x over Q.

    Taken from the squarefree part of the characteristic polynomial. When
    irreducibility of the field is not settled, the factor closest to zero
    at sigma_1(x) is used instead.

    Args:
        x: element of the field

    Returns:
        Monic rational polynomial vanishing at x

    Raises:
        FieldError: If the candidate does not vanish at x exactly
    """
    charpoly = characteristic_polynomial(x)
    candidate = charpoly.squarefree_part().monic()
    if not x.field.irreducibility.proven and candidate.degree > 1:
        # The characteristic polynomial is only a power of the minimal
        # polynomial when the defining polynomial is irreducible.
        candidate = _closest_factor(candidate, x)
    if not x.field.evaluate(candidate, x).is_zero:
        raise FieldError(f"Minimal polynomial candidate {candidate} does not vanish at {x}")
    return candidate


def _closest_factor(poly: IntPolynomial, x: AlgebraicNumber) -> IntPolynomial:
    value = embed(x, 1)
    _, factors = poly.poly.factor_list()
    best = None
    with x.field.policy.context():
        for factor, _ in factors:
            candidate = IntPolynomial(factor).monic()
            size = abs(candidate.evaluate_ball(value).mid)
            if best is None or size < best[0]:
                best = (size, candidate)
    return best[1]


def is_algebraic_integer(x: AlgebraicNumber) -> bool:
    """True when the minimal polynomial of x has integer coefficients.

    Integral residues are accepted directly, Z[theta] being inside O_K.
    """
    if x.residue.is_integral and x.field.defining.is_integral and x.field.defining.is_monic:
        return True
    return min_poly(x).is_integral
