"""The exact semipositive (1,1)-form  i dd^c log phi,  phi(z) = prod_{i<=s} Im(z_i)^-1.

In the basis dz_i ^ dzbar_j the form has the diagonal matrix
h_ii = 1/(4 Im(z_i)^2) for i <= s and zeros elsewhere. Evaluation on a
tangent vector uses the pairing  omega(v, Iv) = 2 sum h_ij v_i conj(v_j).
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf
import numpy as np

from ..certificates import CheckResult, Verdict
from ..errors import ActionDomainError
from ..exact.balls import Ball, bound_string
from ..exact.precision import PrecisionPolicy
from ..fields.number_field import embeddings
from ..logging_config import get_logger, with_check_context
from .ot import GroupElement, OTData, Point, act, random_point, random_word

logger = get_logger(__name__)

PAIRING = 2


@dataclass(frozen=True)
class TangentVector:
    v: Tuple[Ball, ...]

    @classmethod
    def from_complex(cls, values: Sequence[complex]) -> "TangentVector":
        return cls(tuple(Ball.exact(mpc(c.real, c.imag)) for c in map(complex, values)))

    @classmethod
    def basis(cls, m: int, index: int) -> "TangentVector":
        return cls(tuple(Ball.exact(1 if k == index else 0) for k in range(m)))


@dataclass(frozen=True)
class FormMatrix:
    h: Tuple[Tuple[Ball, ...], ...]

    @property
    def m(self) -> int:
        return len(self.h)

    def is_hermitian(self) -> bool:
        return all(self.h[i][j].overlaps(self.h[j][i].conjugate())
                   for i in range(self.m) for j in range(self.m))

    def deviation(self, other: "FormMatrix") -> mpf:
        return max((abs(self.h[i][j].mid - other.h[i][j].mid)
                    for i in range(self.m) for j in range(self.m)), default=mpf(0))

    def max_entry(self) -> mpf:
        return max((abs(b.mid) for row in self.h for b in row), default=mpf(0))

    def to_dict(self, digits: int = 30) -> List[List]:
        return [[b.to_interval(digits) for b in row] for row in self.h]


def _imaginary_parts(z: Point) -> List[Ball]:
    parts = [z.coords[i].im for i in range(z.s)]
    for i, part in enumerate(parts):
        if not part.is_positive():
            raise ActionDomainError(f"Im z_{i + 1} is not certified positive")
    return parts


def log_phi(z: Point, policy: Optional[PrecisionPolicy] = None) -> Ball:
    """-sum_{i<=s} ln Im z_i.

    Raises:
        ActionDomainError: If some Im z_i is not certified positive
    """
    policy = policy or PrecisionPolicy()
    with policy.context():
        total = Ball.exact(0)
        for part in _imaginary_parts(z):
            total = total - part.log()
        return total


def omega_at(z: Point, policy: Optional[PrecisionPolicy] = None) -> FormMatrix:
    """Hermitian matrix of the form at z.

    Diagonal 1/(4 Im(z_i)^2) for i <= s, zero elsewhere.

    Args:
        z: point with certified positive Im on the first s coordinates
        policy: working precision; 128 bits when omitted

    Returns:
        FormMatrix: m x m real-diagonal ball matrix

    Raises:
        ActionDomainError: If some Im z_i is not certified positive
    """
    policy =policy or PrecisionPolicy()
    with policy.context():
        diagonal = [1 / (part * part * 4) for part in _imaginary_parts(z)]
        rows = tuple(
            tuple(diagonal[i] if i == j and i < z.s else Ball.exact(0) for j in range(z.m))
            for i in range(z.m))
    return FormMatrix(rows)


def eval_form(z: Point, v: TangentVector, policy: Optional[PrecisionPolicy] = None) -> Ball:
    """omega(v, Iv); a real ball that is >= 0 up to its radius.

    Args:
        z: base point
        v: tangent vector with m complex components
        policy: working precision

    Returns:
        Ball: real enclosure of the pairing
    """
    h = omega_at(z, policy).h
    policy = policy or PrecisionPolicy()
    with policy.context():
        total = Ball.exact(0)
        for i in range(z.m):
            for j in range(z.m):
                if h[i][j].mid == 0 and h[i][j].rad == 0:
                    continue
                total = total + h[i][j] * v.v[i] * v.v[j].conjugate()
        value = total * PAIRING
        return Ball(mpc(value.mid.real), value.rad, real=True)


def zero_foliation_kernel(z: Point) -> List[TangentVector]:
    """The C^t coordinate directions."""
    return [TangentVector.basis(z.m, k) for k in range(z.s, z.m)]


# -- dd^c by finite differences ----------------------------------------------

def _real_coordinates(z: Point) -> List[mpf]:
    coords = []
    for c in z.coords:
        coords.extend([c.mid.real, c.mid.imag])
    return coords


def _potential(x: Sequence[mpf], s: int) -> mpf:
    return -mpmath.fsum(mpmath.log(x[2 * i + 1]) for i in range(s))


def _second_partial(x: List[mpf], s: int, a: int, b: int, h: mpf) -> mpf:
    def f(da: int, db: int) -> mpf:
        y = list(x)
        y[a] += da * h
        y[b] += db * h
        return _potential(y, s)

    if a == b:
        return (f(1, 0) - 2 * _potential(x, s) + f(-1, 0)) / (h * h)
    return (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h)


def ddbar_matrix(z: Point, step: mpf, s: int) -> List[List[mpc]]:
    """Complex Hessian  d^2 f / dz_i dzbar_j  from central differences."""
    x = _real_coordinates(z)
    m = z.m
    partial = [[_second_partial(x, s, a, b, step) for b in range(2 * m)] for a in range(2 * m)]
    return [[(partial[2 * i][2 * j] + partial[2 * i + 1][2 * j + 1]
              + 1j * (partial[2 * i][2 * j + 1] - partial[2 * i + 1][2 * j])) / 4
             for j in range(m)] for i in range(m)]


def verify_ddc(z: Point, step: Optional[mpf] = None, policy: Optional[PrecisionPolicy] = None,
               threshold_bits: int = 30) -> CheckResult:
    """Compare the closed form with a finite-difference ddbar of log phi.

    Args:
        z: sample point
        step: difference step; 2^-(bits/6) when omitted
        policy: working precision for the differences
        threshold_bits: pass when the relative error is below 2^-threshold_bits

    Returns:
        CheckResult: ``ddc`` with the relative error and truncation and
        rounding estimates

    Raises:
        ActionDomainError: If some Im z_i is not larger than the step
    """
    policy = policy or PrecisionPolicy()
    with policy.context():
        if step is None:
            step = mpmath.ldexp(mpf(1), -(policy.working_bits // 6))
        step = mpf(step)
        parts = _imaginary_parts(z)
        margin = min((p.lower() for p in parts), default=mpf(1))
        if margin <= step:
            raise ActionDomainError(f"Im margin {bound_string(margin)} is not larger than the step")

        expected = omega_at(z, policy)
        approx = ddbar_matrix(z, step, z.s)
        scale = max(expected.max_entry(), mpf(1) if not parts else mpf(0))
        error = max(abs(approx[i][j] - expected.h[i][j].mid)
                    for i in range(z.m) for j in range(z.m)) / scale
        smallest = min((p.mid.real for p in parts), default=mpf(1))
        truncation = step ** 2 / smallest ** 4 / scale
        rounding = mpmath.ldexp(mpf(1), -policy.working_bits) * (1 + abs(_potential(
            _real_coordinates(z), z.s))) / step ** 2 / scale
        threshold = mpmath.ldexp(mpf(1), -threshold_bits)
        passed = error < threshold

    return CheckResult('ddc', Verdict.of(passed), {
        'point': z.to_json(),
        'step': bound_string(step),
        'relative_error': bound_string(error),
        'truncation_estimate': bound_string(truncation),
        'rounding_estimate': bound_string(rounding),
        'threshold': bound_string(threshold),
        'bits': policy.working_bits,
    })


# -- invariance, semipositivity, kernel --------------------------------------

def pullback(g: GroupElement, z: Point, policy: Optional[PrecisionPolicy] = None) -> FormMatrix:
    """J^H h(g z) J with J = diag(s_i(u))."""
    policy = policy or g.field.policy
    field = g.field.at_precision(policy)
    jacobian = embeddings(g.u.in_field(field))
    h = omega_at(act(g, z, policy), policy).h
    with policy.context():
        rows = tuple(tuple(jacobian[i].conjugate() * h[i][j] * jacobian[j] for j in range(z.m))
                     for i in range(z.m))
    return FormMatrix(rows)


def verify_invariance(ot: OTData, trials: int, policy: Optional[PrecisionPolicy] = None,
                      seed: int = 0) -> CheckResult:
    """g^* omega = omega for every generator plus ``trials`` random words of length <= 5.

    Returns:
        CheckResult: ``invariance`` with the worst entrywise deviation

    Raises:
        ActionDomainError: If a sampled image leaves H^s
    """
    log = with_check_context(logger, 'invariance')
    policy = policy or ot.field.policy
    rng = np.random.default_rng(seed)
    elements = ot.generators() + [random_word(ot, rng) for _ in range(trials)]
    worst = mpf(0)
    with policy.context():
        for g in elements:
            z = random_point(ot.s, ot.t, rng)
            worst = max(worst, pullback(g, z, policy).deviation(omega_at(z, policy)))
        passed = worst < policy.tolerance
    log.debug("check_done", elements=len(elements), max_deviation=bound_string(worst))
    return CheckResult('invariance', Verdict.of(passed), {
        'generators': len(ot.generators()),
        'words': trials,
        'seed': seed,
        'max_deviation': bound_string(worst),
        'tolerance': bound_string(policy.tolerance),
    })


def _random_vector(m: int, rng: np.random.Generator) -> TangentVector:
    return TangentVector.from_complex(complex(a, b) for a, b in rng.normal(size=(m, 2)))


def verify_semipositivity(s: int, t: int, samples: int, seed: int = 0,
                          policy: Optional[PrecisionPolicy] = None) -> CheckResult:
    """min omega(v, Iv) over random (z, v) stays above -tolerance."""
    policy = policy or PrecisionPolicy()
    rng = np.random.default_rng(seed)
    lowest = None
    with policy.context():
        for _ in range(samples):
            z = random_point(s, t, rng)
            value = eval_form(z, _random_vector(s + t, rng), policy).lower()
            lowest = value if lowest is None else min(lowest, value)
        passed = lowest is None or lowest >= -policy.tolerance
    return CheckResult('semipositivity', Verdict.of(passed), {
        'samples': samples,
        'seed': seed,
        'min_value': bound_string(lowest if lowest is not None else mpf(0)),
    })


def verify_kernel(ot: OTData, samples: int, seed: int = 0,
                  policy: Optional[PrecisionPolicy] = None) -> CheckResult:
    """Kernel is C^t; the form vanishes on it and is positive off it.

    Args:
        ot: OT datum fixing s and t
        samples: random points to inspect
        seed: sampling seed
        policy: working precision

    Returns:
        CheckResult: ``kernel`` listing every problem found
    """
    policy = policy or ot.field.policy
    rng = np.random.default_rng(seed)
    problems = []
    with policy.context():
        for index in range(samples):
            z = random_point(ot.s, ot.t, rng)
            kernel = zero_foliation_kernel(z)
            if len(kernel) != ot.t:
                problems.append(f'sample {index}: kernel dimension {len(kernel)}')
            if any(eval_form(z, v, policy).upper() > policy.tolerance for v in kernel):
                problems.append(f'sample {index}: form does not vanish on the kernel')
            v = _random_vector(ot.s + ot.t, rng)
            if not eval_form(z, v, policy).is_positive():
                problems.append(f'sample {index}: not positive off the kernel')
            for i in range(ot.s):
                if not eval_form(z, TangentVector.basis(z.m, i), policy).is_positive():
                    problems.append(f'sample {index}: not positive on e_{i + 1}')
    return CheckResult('kernel', Verdict.of(not problems), {
        'samples': samples,
        'kernel_dimension': ot.t,
        'problems': problems,
    })


def ddc_points(s: int, t: int, count: int, seed: int = 0) -> List[Point]:
    """(i, .., i, 0, .., 0) followed by seeded random points."""
    rng = np.random.default_rng(seed)
    points = [Point.from_complex([1j] * s + [0j] * t, s)]
    while len(points) < count:
        points.append(random_point(s, t, rng))
    return points[:count]


def form_suite(ot: OTData, seed: int = 0, invariance_words: int = 100,
               semipositivity_samples: int = 1000, ddc_count: int = 10,
               ddc_bits: int = 256, ddc_step_exponent: int = 40,
               ddc_threshold_exponent: int = 30,
               policy: Optional[PrecisionPolicy] = None) -> List[CheckResult]:
    """ddc at sample points, invariance, semipositivity and kernel checks.

    The ddc check runs at ``max(ddc_bits, policy bits)`` with step
    2^-ddc_step_exponent; the others at ``policy``.

    Args:
        ot: OT datum
        seed: seed for every sampled check
        invariance_words: random words beyond the generators
        semipositivity_samples: random (z, v) pairs; also caps kernel samples at 100
        ddc_count: number of ddc sample points
        ddc_bits: minimum precision for the ddc check
        ddc_step_exponent: finite-difference step exponent
        ddc_threshold_exponent: relative error threshold exponent
        policy: working precision; defaults to the field's

    Returns:
        List[CheckResult]: ddc, invariance, semipositivity and kernel
    """
    policy = policy or ot.field.policy
    ddc_policy = PrecisionPolicy(max(ddc_bits, policy.working_bits))
    with ddc_policy.context():
        step = mpmath.ldexp(mpf(1), -ddc_step_exponent)
    reports = [verify_ddc(z, step, ddc_policy, ddc_threshold_exponent)
               for z in ddc_points(ot.s, ot.t, ddc_count, seed)]
    worst = max((mpf(r.evidence['relative_error']) for r in reports), default=mpf(0))
    ddc = CheckResult('ddc', Verdict.combine(r.verdict for r in reports), {
        'points': ddc_count,
        'bits': ddc_policy.working_bits,
        'step_exponent': ddc_step_exponent,
        'max_relative_error': bound_string(worst),
        'threshold_exponent': ddc_threshold_exponent,
    })
    return [
        ddc,
        verify_invariance(ot, invariance_words, policy, seed),
        verify_semipositivity(ot.s, ot.t, semipositivity_samples, seed, policy),
        verify_kernel(ot, min(semipositivity_samples, 100), seed, policy),
    ]
