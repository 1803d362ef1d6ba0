"""OT manifold data and the affine action of U x| O_K on H^s x C^t."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf
import numpy as np

from ..certificates import CheckResult, Verdict
from ..errors import ActionDomainError, FieldError, GroupElementError, LeafCertificationError
from ..exact.balls import Ball, bound_string, max_deviation
from ..exact.precision import PrecisionPolicy
from ..fields.number_field import AlgebraicNumber, NumberField, embeddings
from ..fields.units import (AdmissibilityCertificate, UnitSystem, admissibility_check,
                            build_unit_system, dirichlet_rank_check)
from ..logging_config import get_logger, with_check_context

logger = get_logger(__name__)

# Ranges for sampled group elements: unit exponents and translation coefficients.
EXPONENT_RANGE = 2
TRANSLATION_RANGE = 3


@dataclass(frozen=True)
class Point:
    """m = s + t complex coordinates; the first s lie in the upper half-plane."""

    coords: Tuple[Ball, ...]
    s: int

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def t(self) -> int:
        return self.m - self.s

    def in_domain(self) -> bool:
        return all(self.coords[i].im.is_positive() for i in range(self.s))

    def deviation(self, other: "Point") -> mpf:
        return max_deviation(zip(self.coords, other.coords))

    def to_json(self, digits: int = 30) -> List:
        return [c.to_interval(digits) for c in self.coords]

    @classmethod
    def from_complex(cls, values: Sequence[complex], s: int) -> "Point":
        """Binary floats are taken as exact coordinates."""
        return cls(tuple(Ball.exact(mpc(v.real, v.imag)) for v in map(complex, values)), s)


@dataclass(frozen=True)
class GroupElement:
    """(u, a): z_i -> s_i(u) z_i + s_i(a)."""

    u: AlgebraicNumber
    a: AlgebraicNumber

    def __post_init__(self):
        if self.u.field.algebra_key != self.a.field.algebra_key:
            raise GroupElementError("Unit and translation belong to different fields")
        if self.u.is_zero:
            raise GroupElementError("Multiplicative part must be a unit, got 0")

    @property
    def field(self) -> NumberField:
        return self.u.field

    @classmethod
    def identity(cls, field: NumberField) -> "GroupElement":
        return cls(field.one, field.zero)

    @property
    def is_identity(self) -> bool:
        return self.u.is_one and self.a.is_zero

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return group_mul(self, other)

    def inverse(self) -> "GroupElement":
        u_inv = self.u.inverse()
        return GroupElement(u_inv, -(u_inv * self.a))

    def __pow__(self, exponent: int) -> "GroupElement":
        base = self if exponent >= 0 else self.inverse()
        result = GroupElement.identity(self.field)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.u == other.u and self.a == other.a

    def __hash__(self) -> int:
        return hash((self.u, self.a))

    def to_dict(self) -> Dict[str, List[str]]:
        return {'u': self.u.to_json(), 'a': self.a.to_json()}


def group_mul(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """(u1, a1)(u2, a2) = (u1 u2, a1 + u1 a2), so act(g1 g2) = act(g1) o act(g2).

    Exact in K; no precision is involved.

    Raises:
        GroupElementError: If the factors live over different fields
    """
    if g1.u.field.algebra_key != g2.u.field.algebra_key:
        raise GroupElementError("Group elements over different fields")
    return GroupElement(g1.u * g2.u, g1.a + g1.u * g2.a)


def act(g: GroupElement, z: Point, policy: Optional[PrecisionPolicy] = None) -> Point:
    """Apply z_i -> s_i(u) z_i + s_i(a) coordinatewise.

    Args:
        g: group element (u, a)
        z: point of H^s x C^t over the same signature
        policy: working precision; defaults to the field's

    Returns:
        Point: image as balls enclosing the exact image

    Raises:
        ActionDomainError: If z has the wrong shape, or the image leaves H^s
            because u is not totally positive
    """
    field = g.field.at_precision(policy) if policy else g.field
    if z.m != field.m or z.s != field.s:
        raise ActionDomainError(f"Point has {z.m} coordinates, field needs {field.m}")
    su = embeddings(g.u.in_field(field))
    sa = embeddings(g.a.in_field(field))
    with field.policy.context():
        coords = tuple(su[i] * z.coords[i] + sa[i] for i in range(field.m))
    image = Point(coords, z.s)
    if not image.in_domain():
        raise ActionDomainError(f"Image of a point under {g.to_dict()} left H^s; "
                                f"the unit has a non-positive real embedding")
    return image


@dataclass(frozen=True)
class OTData:
    field: NumberField
    units: UnitSystem
    admissibility: AdmissibilityCertificate

    @property
    def s(self) -> int:
        return self.field.s

    @property
    def t(self) -> int:
        return self.field.t

    @property
    def is_admissible(self) -> bool:
        return self.admissibility.admissible

    @property
    def translation_basis(self) -> List[AlgebraicNumber]:
        """1, theta, .., theta^(n-1): translations range over Z[theta]."""
        return self.field.power_basis()

    def generators(self) -> List[GroupElement]:
        """Unit generators (g, 0) followed by the basis translations (1, theta^k)."""
        one, zero = self.field.one, self.field.zero
        return ([GroupElement(g, zero) for g in self.units.generators]
                + [GroupElement(one, b) for b in self.translation_basis])

    def to_dict(self) -> dict:
        return {
            'field': self.field.to_dict(),
            'units': self.units.to_dict(),
            'admissibility': self.admissibility.to_dict(),
            'translations': 'Z[theta] power basis',
        }


def assemble_ot(field: NumberField, generators: Sequence[AlgebraicNumber],
                policy: Optional[PrecisionPolicy] = None) -> OTData:
    """Build OT data and record its admissibility.

    Inadmissible data is returned with its certificate, not raised.

    Args:
        field: number field with s > 0 and t > 0
        generators: unit generators of U
        policy: optional precision override for the log rows

    Returns:
        OTData: field, unit system and admissibility certificate

    Raises:
        FieldError: If the signature has s = 0 or t = 0
        NotAUnitError: If a generator is not a unit
    """
    if not field.is_ot_eligible:
        raise FieldError(f"OT data needs s > 0 and t > 0, field has signature {field.signature}")
    units = build_unit_system(field, generators, policy)
    return OTData(units.field, units, admissibility_check(units))


# -- sampling ------------------------------------------------------------------

def random_element(ot: OTData, rng: np.random.Generator) -> GroupElement:
    exponents = rng.integers(-EXPONENT_RANGE, EXPONENT_RANGE + 1, size=len(ot.units))
    translation = rng.integers(-TRANSLATION_RANGE, TRANSLATION_RANGE + 1, size=ot.field.degree)
    u = ot.field.one
    for g, e in zip(ot.units.generators, exponents):
        u = u * g ** int(e)
    return GroupElement(u, ot.field.element(int(c) for c in translation))


def random_point(s: int, t: int, rng: np.random.Generator) -> Point:
    """Im of the first s coordinates log-uniform in [1/4, 4]; the rest in [-2, 2]^2."""
    upper = [complex(rng.uniform(-2, 2), 2.0 ** rng.uniform(-2, 2)) for _ in range(s)]
    rest = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(t)]
    return Point.from_complex(upper + rest, s)


def random_word(ot: OTData, rng: np.random.Generator, max_length: int = 5) -> GroupElement:
    """Product of up to ``max_length`` generators or their inverses."""
    gens = ot.generators()
    word = GroupElement.identity(ot.field)
    for _ in range(int(rng.integers(1, max_length + 1))):
        g = gens[int(rng.integers(len(gens)))]
        word = word * (g if rng.integers(2) else g.inverse())
    return word


def leaf_sample(ot: OTData, count: int, seed: int = 0) -> Iterator[GroupElement]:
    """Generators first, then seeded random elements; never the identity.

    Args:
        ot: OT datum to sample from
        count: number of elements to yield
        seed: seed for the random tail

    Yields:
        GroupElement: non-identity elements in a reproducible order
    """
    produced = 0
    for g in ot.generators():
        if produced >= count:
            return
        if not g.is_identity:
            produced += 1
            yield g
    rng = np.random.default_rng(seed)
    while produced < count:
        g = random_element(ot, rng)
        if not g.is_identity:
            produced += 1
            yield g


# -- checks --------------------------------------------------------------------

def verify_action_compat(ot: OTData, trials: int, policy: Optional[PrecisionPolicy] = None,
                         seed: int = 0) -> CheckResult:
    """max |act(g1, act(g2, z)) - act(g1 g2, z)| over seeded random triples.

    Args:
        ot: OT datum whose units must be totally positive
        trials: number of (g1, g2, z) triples
        policy: working precision; the pass threshold is its tolerance
        seed: sampling seed

    Returns:
        CheckResult: ``action_compatibility`` with the worst deviation

    Raises:
        ActionDomainError: If an image leaves H^s
    """
    log = with_check_context(logger, 'action_compatibility')
    policy = policy or ot.field.policy
    rng = np.random.default_rng(seed)
    worst = mpf(0)
    with policy.context():
        for _ in range(trials):
            g1, g2 = random_element(ot, rng), random_element(ot, rng)
            z = random_point(ot.s, ot.t, rng)
            lhs = act(g1, act(g2, z, policy), policy)
            rhs = act(g1 * g2, z, policy)
            worst = max(worst, lhs.deviation(rhs))
        passed = worst < policy.tolerance
    log.debug("check_done", trials=trials, max_deviation=bound_string(worst))
    return CheckResult('action_compatibility', Verdict.of(passed), {
        'trials': trials,
        'seed': seed,
        'max_deviation': bound_string(worst),
        'tolerance': bound_string(policy.tolerance),
    })


def verify_associativity(ot: OTData, trials: int, seed: int = 0) -> CheckResult:
    """(g1 g2) g3 == g1 (g2 g3) exactly, over ``trials`` seeded triples.

    Returns:
        CheckResult: ``associativity`` with the failure count
    """
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        g1, g2, g3 = (random_element(ot, rng) for _ in range(3))
        if (g1 * g2) * g3 != g1 * (g2 * g3):
            failures += 1
    return CheckResult('associativity', Verdict.of(failures == 0),
                       {'trials': trials, 'seed': seed, 'failures': failures})


@dataclass(frozen=True)
class LeafDiagnosis:
    element: GroupElement
    coordinates: Tuple[Dict, ...]
    bits: int
    verdict: str = 'NoFixedLeaf'

    def to_dict(self) -> dict:
        return {'element': self.element.to_dict(), 'coordinates': list(self.coordinates),
                'bits': self.bits, 'verdict': self.verdict}


def _diagnose(g: GroupElement, field: NumberField) -> Optional[Tuple[Dict, ...]]:
    su = embeddings(g.u.in_field(field))
    sa = embeddings(g.a.in_field(field))
    rows = []
    with field.policy.context():
        for i in range(field.s):
            if g.u.is_one:
                if sa[i].contains_zero():
                    return None
                rows.append({'index': i + 1, 'kind': 'translation',
                             'shift': sa[i].to_interval()})
                continue
            denominator = 1 - su[i]
            if denominator.contains_zero():
                return None
            z = sa[i] / denominator
            if not z.real:
                return None
            rows.append({'index': i + 1, 'kind': 'fixed-leaf-real', 'z': z.to_interval()})
    return tuple(rows)


def leaf_intersection_solve(g: GroupElement, policy: Optional[PrecisionPolicy] = None) -> LeafDiagnosis:
    """Show that g fixes no leaf: z_i = s_i(a)/(1 - s_i(u)) is real for i <= s.

    For pure translations each s_i(a) is certified nonzero instead.
    Precision escalates through the policy's ladder until every
    coordinate is decided.

    Args:
        g: non-identity group element
        policy: starting precision; defaults to the field's

    Returns:
        LeafDiagnosis: per-coordinate intervals and the bits that decided them

    Raises:
        GroupElementError: If g is the identity
        LeafCertificationError: If the ladder is exhausted
    """
    if g.is_identity:
        raise GroupElementError("Leaf analysis needs a non-identity element")
    start = policy or g.field.policy
    for attempt in start.escalations():
        field = g.field.at_precision(attempt)
        rows = _diagnose(g, field)
        if rows is not None:
            return LeafDiagnosis(g, rows, attempt.working_bits)
        logger.debug("leaf_precision_escalated", bits=attempt.working_bits)
    raise LeafCertificationError(
        f"Could not separate s_i(u) from 1 or s_i(a) from 0 for {g.to_dict()}")


def verify_leaves(ot: OTData, samples: int, seed: int = 0,
                  policy: Optional[PrecisionPolicy] = None) -> CheckResult:
    """Run leaf_intersection_solve over ``samples`` elements from leaf_sample.

    Certification failures are collected into the evidence rather than raised.

    Returns:
        CheckResult: ``leaf_disjointness`` with certified and failure counts
    """
    certified, failures = 0, []
    for g in leaf_sample(ot, samples, seed):
        try:
            leaf_intersection_solve(g, policy)
            certified += 1
        except LeafCertificationError as e:
            failures.append(str(e))
    return CheckResult('leaf_disjointness', Verdict.of(not failures),
                       {'samples': samples, 'seed': seed, 'certified': certified,
                        'failures': failures})


def validate(ot: OTData, trials: int = 1000, leaf_samples: int = 200, seed: int = 0,
             policy: Optional[PrecisionPolicy] = None) -> List[CheckResult]:
    """Admissibility, Dirichlet rank, action compatibility, associativity and leaf checks.

    Args:
        ot: assembled OT datum
        trials: triples for the action and associativity checks
        leaf_samples: elements for the leaf check
        seed: seed shared by every sampled check
        policy: working precision; defaults to the field's

    Returns:
        List[CheckResult]: in the order above; only the first two when the
        datum is not admissible
    """
    log = with_check_context(logger, 'validate')
    results = [CheckResult('admissibility', ot.admissibility.verdict.verdict,
                           ot.admissibility.to_dict(), ot.admissibility.reason)]
    rank = dirichlet_rank_check(ot.units)
    results.append(CheckResult('dirichlet_rank', rank.verdict, rank.to_dict()))
    if not ot.is_admissible:
        log.warning("validation_short_circuit", admissibility=ot.admissibility.verdict.value)
        return results
    results.append(verify_action_compat(ot, trials, policy, seed))
    results.append(verify_associativity(ot, trials, seed))
    results.append(verify_leaves(ot, leaf_samples, seed, policy))
    log.debug("validation_done", verdict=Verdict.combine(r.verdict for r in results).value)
    return results
