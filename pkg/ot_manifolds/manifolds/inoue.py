"""Inoue surfaces of type S0 from SL(3, Z) matrices and cubic units.

Points are (z1, z2) in C x H. The generators are

    g_0 : (z1, z2) -> (alpha z1, c z2)
    g_i : (z1, z2) -> (z1 + alpha_i, z2 + c_i)      i = 1, 2, 3

where (alpha_i) and (c_i) are eigenvectors of the transposed matrix, each
scaled so that its largest-magnitude entry is 1.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf
import numpy as np
import sympy
from sympy import Poly, QQ

from ..certificates import CheckResult, Verdict
from ..errors import FieldError, InoueConstructionError
from ..exact.balls import Ball, bound_string
from ..exact.polynomial import IntPolynomial, X, real_root_count
from ..exact.precision import PrecisionPolicy
from ..fields.number_field import AlgebraicNumber, NumberField, build_field, embed, norm
from ..fields.units import determinant_ball, is_unit
from ..logging_config import get_logger
from .ot import GroupElement, OTData, Point, act, random_point

logger = get_logger(__name__)

IntMatrix = Tuple[Tuple[int, int, int], ...]


@dataclass(frozen=True)
class AffineMap:
    """(z1, z2) -> (scale_1 z1 + shift_1, scale_2 z2 + shift_2)."""

    name: str
    scale: Tuple[Ball, Ball]
    shift: Tuple[Ball, Ball]

    def apply(self, point: Sequence[Ball]) -> Tuple[Ball, Ball]:
        return (self.scale[0] * point[0] + self.shift[0],
                self.scale[1] * point[1] + self.shift[1])

    def to_dict(self, digits: int = 30) -> dict:
        return {
            'name': self.name,
            'scale': [b.to_interval(digits) for b in self.scale],
            'shift': [b.to_interval(digits) for b in self.shift],
        }


@dataclass(frozen=True)
class InoueData:
    matrix: IntMatrix
    charpoly: IntPolynomial
    field: NumberField
    c: Ball
    alpha: Ball
    real_eigvec: Tuple[Ball, Ball, Ball]
    complex_eigvec: Tuple[Ball, Ball, Ball]
    generators: Tuple[AffineMap, ...]

    @property
    def policy(self) -> PrecisionPolicy:
        return self.field.policy

    def product_defect(self) -> Ball:
        """|alpha|^2 c - 1."""
        with self.policy.context():
            modulus = self.alpha.abs()
            return modulus * modulus * self.c - 1

    def to_dict(self, digits: int = 30) -> dict:
        with self.policy.context():
            return {
                'matrix': [list(row) for row in self.matrix],
                'charpoly': self.charpoly.to_json(),
                'c': self.c.to_interval(digits),
                'alpha': self.alpha.to_interval(digits),
                'real_eigvec': [b.to_interval(digits) for b in self.real_eigvec],
                'complex_eigvec': [b.to_interval(digits) for b in self.complex_eigvec],
                'product_defect': bound_string(abs(self.product_defect().mid) +
                                               self.product_defect().rad),
                'generators': [g.to_dict(digits) for g in self.generators],
            }


def _as_int_matrix(m) -> IntMatrix:
    try:
        rows = [list(row) for row in m]
    except TypeError:
        raise InoueConstructionError("Matrix must be a 3x3 array of integers")
    if len(rows) != 3 or any(len(row) != 3 for row in rows):
        raise InoueConstructionError("Matrix must be 3x3")
    result = []
    for row in rows:
        values = []
        for entry in row:
            value = sympy.Rational(entry)
            if value.q != 1:
                raise InoueConstructionError(f"Matrix entry {entry} is not an integer")
            values.append(int(value))
        result.append(tuple(values))
    return tuple(result)


def _eigenvector(adjugate: sympy.Matrix, value: Ball) -> Tuple[Ball, Ball, Ball]:
    """Largest column of adj(M^T - x I) at the eigenvalue, scaled to max entry 1."""
    best = None
    for k in range(3):
        column = [IntPolynomial(Poly(adjugate[i, k], X, domain=QQ)).evaluate_ball(value)
                  for i in range(3)]
        size = max(abs(b.mid) for b in column)
        if best is None or size > best[0]:
            best = (size, column)
    size, column = best
    if size == 0:
        raise InoueConstructionError("Eigenvalue is not simple")
    pivot = max(column, key=lambda b: abs(b.mid))
    return tuple(b / pivot for b in column)


def inoue_from_matrix(m, policy: Optional[PrecisionPolicy] = None) -> InoueData:
    """Inoue data from an integer 3x3 matrix of determinant 1.

    The characteristic polynomial must be squarefree with one real root
    c != 1 and a complex pair; |alpha|^2 c = 1 is then checked numerically.

    Args:
        m: nested integer rows or anything ``_as_int_matrix`` accepts
        policy: working precision; 128 bits when omitted

    Returns:
        InoueData: eigenvalues, scaled eigenvectors and the four generators

    Raises:
        InoueConstructionError: If any condition above fails or the matrix is malformed
    """
    policy = policy or PrecisionPolicy()
    matrix = _as_int_matrix(m)
    exact = sympy.Matrix(matrix)
    det = exact.det()
    if det != 1:
        raise InoueConstructionError(f"Determinant is {det}, not 1")

    charpoly = IntPolynomial(Poly(exact.charpoly(X).as_expr(), X, domain=QQ))
    if charpoly(1) == 0:
        raise InoueConstructionError("1 is an eigenvalue (c = 1)")
    if not charpoly.is_squarefree():
        raise InoueConstructionError(f"Characteristic polynomial {charpoly} has a repeated root")
    real_roots = real_root_count(charpoly)
    if real_roots != 1:
        raise InoueConstructionError(
            f"Characteristic polynomial {charpoly} has {real_roots} real roots; "
            f"type S0 needs one real root and a complex pair")
    try:
        field = build_field(charpoly, policy, label='charpoly')
    except FieldError as e:
        raise InoueConstructionError(str(e))

    c, alpha = field.roots[0], field.roots[1]
    adjugate = (exact.T - X * sympy.eye(3)).adjugate()
    with policy.context():
        real_eigvec = _eigenvector(adjugate, c)
        complex_eigvec = _eigenvector(adjugate, alpha)
        zero = Ball.exact(0)
        one = Ball.exact(1)
        generators = [AffineMap('g0', (alpha, c), (zero, zero))]
        generators += [AffineMap(f'g{i + 1}', (one, one), (complex_eigvec[i], real_eigvec[i]))
                       for i in range(3)]

    data = InoueData(matrix, charpoly, field, c, alpha, real_eigvec, complex_eigvec,
                     tuple(generators))
    defect = data.product_defect()
    with policy.context():
        if abs(defect.mid) + defect.rad >= 10 * policy.tolerance:
            raise InoueConstructionError(f"|alpha|^2 c - 1 = {bound_string(defect.mid)}")
    logger.debug("inoue_built", charpoly=charpoly.to_json())
    return data


def inoue_from_cubic(field: NumberField, u: AlgebraicNumber,
                     policy: Optional[PrecisionPolicy] = None) -> InoueData:
    """Inoue data for the matrix of multiplication by u on (1, theta, theta^2).

    Args:
        field: cubic field of signature (1, 1)
        u: unit of norm 1 with positive real embedding, u != 1
        policy: working precision

    Returns:
        InoueData: as from inoue_from_matrix, with c and alpha matched to
        the embeddings of u

    Raises:
        InoueConstructionError: If the field or unit does not qualify
    """
    if field.degree != 3 or field.signature != (1, 1):
        raise InoueConstructionError(f"Need a cubic field of signature (1, 1), got "
                                     f"degree {field.degree} and {field.signature}")
    u = u.in_field(field)
    if not is_unit(u):
        raise InoueConstructionError(f"{u} is not a unit")
    if norm(u) == -1:
        raise InoueConstructionError(f"norm({u}) = -1; pass u^2 instead")
    if u.is_one:
        raise InoueConstructionError("u = 1 gives c = 1")
    if not embed(u, 1).is_positive():
        raise InoueConstructionError(f"sigma_1({u}) is negative; pass u^2 instead")

    matrix = u.multiplication_matrix()
    if any(entry.q != 1 for entry in matrix):
        raise InoueConstructionError("Multiplication matrix is not integral")
    data = inoue_from_matrix([[int(matrix[i, j]) for j in range(3)] for i in range(3)], policy)

    target = field.at_precision(data.policy)
    values = [embed(u.in_field(target), i) for i in (1, 2, 3)]
    if not data.c.overlaps(values[0]) or not any(data.alpha.overlaps(v) for v in values[1:]):
        raise InoueConstructionError("Eigenvalues do not match the embeddings of u")
    return data


@dataclass(frozen=True)
class LatticeRankReport:
    det: Ball
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def to_dict(self) -> dict:
        return {'det': self.det.to_interval(), 'verdict': self.verdict.value}


def verify_lattice_rank(d: InoueData) -> LatticeRankReport:
    """Rows (Re alpha_i, Im alpha_i, c_i) must be linearly independent over R.

    Returns:
        LatticeRankReport: determinant ball; Inconclusive when it straddles
        the tolerance
    """
    policy = d.policy
    with policy.context():
        rows = [(d.complex_eigvec[i].re, d.complex_eigvec[i].im, d.real_eigvec[i].re)
                for i in range(3)]
        det = determinant_ball(rows)
        lower = abs(det.mid.real) - det.rad
        upper = abs(det.mid.real) + det.rad
        if lower > policy.tolerance:
            verdict = Verdict.PASS
        elif upper < policy.tolerance:
            verdict = Verdict.FAIL
        else:
            verdict = Verdict.INCONCLUSIVE
    return LatticeRankReport(det, verdict)


def compare_with_ot(d: InoueData, ot: OTData, trials: int = 100, seed: int = 0) -> CheckResult:
    """The map (w, z) -> (alpha_1 z, c_1 w) intertwines the OT(1,1) action with g_0 .. g_3.

    Args:
        d: Inoue data built from the OT unit
        ot: OT datum over a cubic field with exactly one unit
        trials: random points per generator pair
        seed: sampling seed

    Returns:
        CheckResult: ``inoue_ot_agreement``; Fail without sampling when the
        datum or matrix does not match
    """
    if ot.field.degree != 3 or ot.field.signature != (1, 1) or len(ot.units) != 1:
        return CheckResult('inoue_ot_agreement', Verdict.FAIL, {},
                           'OT data is not over a cubic field with one unit')
    u = ot.units.generators[0]
    expected = u.multiplication_matrix()
    if any(expected[i, j] != d.matrix[i][j] for i in range(3) for j in range(3)):
        return CheckResult('inoue_ot_agreement', Verdict.FAIL, {},
                           'matrix is not multiplication by the OT unit')

    field = ot.field.at_precision(d.policy)
    swapped = False
    if not d.alpha.overlaps(embed(u.in_field(field), 2)):
        field = field.with_swaps([1])
        swapped = True

    one, zero = field.one, field.zero
    pairs = [(GroupElement(u.in_field(field), zero), d.generators[0])]
    pairs += [(GroupElement(one, b), g) for b, g in zip(field.power_basis(), d.generators[1:])]

    policy = d.policy
    rng = np.random.default_rng(seed)
    worst = mpf(0)
    with policy.context():
        c1, alpha1 = d.real_eigvec[0], d.complex_eigvec[0]

        def to_inoue(p: Point) -> Tuple[Ball, Ball]:
            return (alpha1 * p.coords[1], c1 * p.coords[0])

        for _ in range(trials):
            p = random_point(1, 1, rng)
            for g, affine in pairs:
                lhs = to_inoue(act(g, p))
                rhs = affine.apply(to_inoue(p))
                worst = max(worst, lhs[0].distance(rhs[0]), lhs[1].distance(rhs[1]))
        passed = worst < policy.tolerance
    return CheckResult('inoue_ot_agreement', Verdict.of(passed), {
        'trials': trials,
        'seed': seed,
        'swapped_pair': swapped,
        'max_deviation': bound_string(worst),
    })
