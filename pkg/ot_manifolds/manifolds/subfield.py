"""Embedding the Inoue surface of a (1,1) subfield K1 into an OT manifold of K.

Given eta in K generating K1, the units of K1 are seeded with u1 = u^2,
included into K by substituting eta for the generator, completed to an
admissible group of K, and the product H x C is mapped coordinate-wise
into H^s x C^t. Complex pairs of K are re-oriented so that every complex
coordinate restricting to the complex place of K1 carries w2, never its
conjugate.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from mpmath import mpf
import numpy as np

from ..certificates import CheckResult, Verdict
from ..errors import (FieldError, InclusionError, OTError, RestrictionMatchError,
                      SubfieldError)
from ..exact.balls import Ball, bound_string
from ..exact.polynomial import IntPolynomial
from ..exact.precision import PrecisionPolicy
from ..fields.number_field import (AlgebraicNumber, NumberField, build_field, embed,
                                   embeddings, min_poly)
from ..fields.units import (UnitSystem, build_unit_system, complete_basis, is_unit,
                            unit_search)
from ..logging_config import get_logger, with_check_context
from .ot import GroupElement, OTData, Point, act, assemble_ot, random_point

logger = get_logger(__name__)

INCLUSION_COEFF_RANGE = 5


@dataclass(frozen=True)
class SubfieldWitness:
    eta: AlgebraicNumber
    k1_defining: IntPolynomial
    k1: NumberField
    flags: Tuple[str, ...] = ()

    @property
    def usable(self) -> bool:
        """Valid for the embedder: a proper subfield of signature (1, 1)."""
        return not self.flags

    def to_dict(self) -> dict:
        return {
            'eta': self.eta.to_json(),
            'k1_defining': self.k1_defining.to_json(),
            'signature': list(self.k1.signature),
            'usable': self.usable,
            'flags': list(self.flags),
        }


def verify_subfield(K: NumberField, eta: AlgebraicNumber,
                    policy: Optional[PrecisionPolicy] = None) -> SubfieldWitness:
    """Build K1 = Q(eta) from the minimal polynomial of eta.

    Degree or signature problems are returned as flags on the witness;
    only a witness without flags is usable for embedding.

    Args:
        K: ambient field
        eta: element of K generating a proper subfield
        policy: precision for K1; defaults to K's

    Returns:
        SubfieldWitness: eta, its minimal polynomial, K1 and any flags

    Raises:
        SubfieldError: If eta is rational, generates K, is not an algebraic
            integer, or K1 cannot be built
    """
    if eta.is_rational:
        raise SubfieldError(f"eta = {eta} is rational")
    eta = eta.in_field(K)
    defining = min_poly(eta)
    d = defining.degree
    if d == K.degree:
        raise SubfieldError(f"eta = {eta} generates K itself, not a proper subfield")
    if not defining.is_integral:
        raise SubfieldError(f"eta = {eta} is not an algebraic integer")
    try:
        k1 = build_field(defining, policy or K.policy, label=f'Q({eta})')
    except FieldError as e:
        raise SubfieldError(f"Cannot build K1 from {defining}: {e}")

    flags = []
    if K.degree % d != 0:
        flags.append(f'degree {d} does not divide {K.degree}')
    if k1.signature != (1, 1):
        flags.append(f'signature {k1.signature} is not (1, 1)')
    witness = SubfieldWitness(eta, defining, k1, tuple(flags))
    logger.debug("subfield_witness", eta=eta.to_json(), k1=defining.to_json(),
                 signature=list(k1.signature), usable=witness.usable)
    return witness


@dataclass(frozen=True)
class Inclusion:
    """K1 -> K, generator of K1 -> eta."""

    source: NumberField
    target: NumberField
    eta: AlgebraicNumber

    def include(self, x: AlgebraicNumber) -> AlgebraicNumber:
        if x.field.algebra_key != self.source.algebra_key:
            raise InclusionError(f"{x} does not belong to the source field")
        return self.target.evaluate(x.residue, self.eta.in_field(self.target))

    def __call__(self, x: AlgebraicNumber) -> AlgebraicNumber:
        return self.include(x)


def _random_element(field: NumberField, rng: np.random.Generator) -> AlgebraicNumber:
    coeffs = rng.integers(-INCLUSION_COEFF_RANGE, INCLUSION_COEFF_RANGE + 1, size=field.degree)
    return field.element(int(c) for c in coeffs)


def verify_inclusion(inclusion: Inclusion, pairs: int, seed: int = 0) -> CheckResult:
    """include(x y) = include(x) include(y) and include(x + y) = include(x) + include(y).

    Exact comparison over ``pairs`` seeded random pairs of K1.
    """
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(pairs):
        x, y = _random_element(inclusion.source, rng), _random_element(inclusion.source, rng)
        ix, iy = inclusion(x), inclusion(y)
        if inclusion(x * y) != ix * iy or inclusion(x + y) != ix + iy:
            failures += 1
    return CheckResult('inclusion_homomorphism', Verdict.of(failures == 0),
                       {'pairs': pairs, 'seed': seed, 'failures': failures})


@dataclass(frozen=True)
class RestrictionMap:
    """r[i-1] is the index of the K1 embedding that sigma_i restricts to."""

    r: Tuple[int, ...]
    swaps: FrozenSet[int]
    k1_signature: Tuple[int, int]

    def is_real_place(self, j: int) -> bool:
        return j <= self.k1_signature[0]

    def map_spec(self, s: int, t: int) -> Tuple[str, ...]:
        return tuple('w1' if self.is_real_place(self.r[i]) else 'w2' for i in range(s + t))

    def to_dict(self) -> dict:
        return {
            'table': [{'sigma': i + 1, 'tau': j} for i, j in enumerate(self.r)],
            'swaps': sorted(self.swaps),
        }


def _match_once(K: NumberField, w: SubfieldWitness) -> Optional[List[int]]:
    values = embeddings(w.eta.in_field(K))
    targets = w.k1.roots
    r = []
    for value in values:
        hits = [j + 1 for j, tau in enumerate(targets) if value.overlaps(tau)]
        if len(hits) != 1:
            return None
        r.append(hits[0])
    return r


def match_restrictions(K: NumberField, w: SubfieldWitness,
                       policy: Optional[PrecisionPolicy] = None) -> Tuple[RestrictionMap, NumberField]:
    """Match every sigma_i(eta) to a unique tau_j and orient complex pairs of K.

    Precision escalates while some sigma_i(eta) overlaps zero or several tau_j.

    Args:
        K: ambient field
        w: usable witness
        policy: starting precision; defaults to K's

    Returns:
        Tuple[RestrictionMap, NumberField]: the restriction map and K with
        the swapped representatives

    Raises:
        SubfieldError: If the witness carries flags
        RestrictionMatchError: If a real place of K restricts to a complex
            one, or the match stays ambiguous after escalation
    """
    if not w.usable:
        raise SubfieldError(f"Witness is not usable: {', '.join(w.flags)}")
    start = policy or K.policy
    s, t = K.signature
    s1, t1 = w.k1.signature
    for attempt in start.escalations():
        big = K.at_precision(attempt)
        small = w.k1.at_precision(attempt)
        r = _match_once(big, SubfieldWitness(w.eta, w.k1_defining, small, w.flags))
        if r is None:
            logger.debug("restriction_match_escalated", bits=attempt.working_bits)
            continue
        if any(r[i] > s1 for i in range(s)):
            raise RestrictionMatchError("A real embedding of K restricts to a complex one")
        swaps = frozenset(j for j in range(1, t + 1) if r[s + j - 1] > s1 + t1)
        for j in swaps:
            r[s + j - 1], r[s + t + j - 1] = r[s + t + j - 1], r[s + j - 1]
        restriction = RestrictionMap(tuple(r), swaps, (s1, t1))
        logger.debug("restrictions_matched", r=list(r), swaps=sorted(swaps))
        return restriction, big.with_swaps(swaps)
    raise RestrictionMatchError(
        f"Ambiguous restriction match up to {start.working_bits * 4} bits")


@dataclass(frozen=True)
class EmbeddedSurface:
    witness: SubfieldWitness
    restriction: RestrictionMap
    inclusion: Inclusion
    u: AlgebraicNumber
    u1: AlgebraicNumber
    big_units: UnitSystem
    map_spec: Tuple[str, ...]

    @property
    def field(self) -> NumberField:
        """K with the oriented complex representatives."""
        return self.big_units.field

    def embed_point(self, w1: Ball, w2: Ball) -> Point:
        coords = tuple(w1 if label == 'w1' else w2 for label in self.map_spec)
        return Point(coords, self.field.s)

    def to_dict(self) -> dict:
        return {
            'witness': self.witness.to_dict(),
            'restriction': self.restriction.to_dict(),
            'u': self.u.to_json(),
            'u1': self.u1.to_json(),
            'u1_image': self.inclusion(self.u1).to_json(),
            'big_units': self.big_units.to_dict(),
            'map_spec': list(self.map_spec),
            'injectivity': 'not verified',
        }


def build_embedding(K: NumberField, w: SubfieldWitness, pool: Optional[UnitSystem] = None,
                    coeff_bound: int = 5, max_results: int = 24, workers: int = 1,
                    policy: Optional[PrecisionPolicy] = None) -> EmbeddedSurface:
    """Embed the Inoue surface of K1 into an OT manifold of K.

    The smallest unit u of K1 is squared, included into K and completed to
    an admissible system of s units from ``pool``.

    Args:
        K: ambient field
        w: usable witness for a (1, 1) subfield
        pool: candidate units of K; searched with ``coeff_bound`` when omitted
        coeff_bound: coefficient box for unit searches
        max_results: cap on each unit search
        workers: threads for unit searches
        policy: starting precision for restriction matching

    Returns:
        EmbeddedSurface: witness, restrictions, inclusion, units and map spec

    Raises:
        SubfieldError: If the witness is flagged or K1 has no small unit
        RestrictionMatchError: If restrictions cannot be matched
        InclusionError: If the included unit is not a unit of K or is lost
            during completion
        CompletionError: If the pool cannot complete an admissible system
    """
    if not w.usable:
        raise SubfieldError(f"Witness is not usable: {', '.join(w.flags)}")
    restriction, oriented = match_restrictions(K, w, policy)

    small_units = unit_search(w.k1, coeff_bound, max_results, workers)
    if not small_units:
        raise SubfieldError(f"No unit of K1 found with coefficients bounded by {coeff_bound}")
    u = small_units[0]
    u1 = u * u

    inclusion = Inclusion(w.k1, oriented, w.eta.in_field(oriented))
    image = inclusion(u1)
    if not is_unit(image):
        raise InclusionError(f"Image {image} of the unit {u1} is not a unit of K")

    seed = build_unit_system(oriented, [image])
    if pool is None:
        pool = build_unit_system(oriented, unit_search(oriented, coeff_bound, max_results, workers))
    else:
        pool = build_unit_system(oriented, pool.generators)
    big_units = complete_basis(seed, pool)
    if big_units.generators[0] != image:
        raise InclusionError("Completed unit system lost the seed generator")

    surface = EmbeddedSurface(w, restriction, inclusion, u, u1, big_units,
                              restriction.map_spec(K.s, K.t))
    logger.debug("embedding_built", u=u.to_json(), map_spec=list(surface.map_spec))
    return surface


def subfield_ot(e: EmbeddedSurface) -> OTData:
    """The OT(1,1) datum of K1 with units generated by u1."""
    return assemble_ot(e.witness.k1, [e.u1])


def verify_restriction_coherence(e: EmbeddedSurface, samples: int, seed: int = 0) -> CheckResult:
    """sigma_i(include(x)) agrees with tau_r(i)(x) for random x."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    k1 = e.witness.k1.at_precision(e.field.policy)
    for _ in range(samples):
        x = _random_element(k1, rng)
        images = embeddings(e.inclusion(x))
        for i, j in enumerate(e.restriction.r):
            if not images[i].overlaps(embed(x, j)):
                mismatches += 1
    return CheckResult('restriction_coherence', Verdict.of(mismatches == 0),
                       {'samples': samples, 'seed': seed, 'mismatches': mismatches})


def verify_embedding_compat(e: EmbeddedSurface, K_ot: Optional[OTData] = None,
                            trials: int = 100, seed: int = 0,
                            policy: Optional[PrecisionPolicy] = None) -> CheckResult:
    """Acting on K1 then including agrees with including then acting on K.

    Args:
        e: embedded surface
        K_ot: OT datum of K; must use ``e.big_units``, built from them when omitted
        trials: random (gamma, point) pairs
        seed: sampling seed
        policy: working precision; defaults to K's

    Returns:
        CheckResult: ``embedding_compatibility`` with the worst deviation;
        injectivity is reported as not verified
    """
    log = with_check_context(logger, 'embedding_compatibility')
    K_ot = K_ot or assemble_ot(e.field, e.big_units.generators)
    if K_ot.units.generators != e.big_units.generators:
        return CheckResult('embedding_compatibility', Verdict.FAIL, {},
                           'OT data does not use the completed unit system')
    small = subfield_ot(e)
    policy = policy or e.field.policy
    big_field = K_ot.field.at_precision(policy)
    rng = np.random.default_rng(seed)
    worst = mpf(0)
    with policy.context():
        for _ in range(trials):
            k = int(rng.integers(-2, 3))
            gamma = GroupElement(e.u1 ** k, _random_element(small.field, rng))
            p = random_point(1, 1, rng)
            moved = act(gamma, p, policy)
            lhs = e.embed_point(*moved.coords)
            image = GroupElement(e.inclusion(gamma.u).in_field(big_field),
                                 e.inclusion(gamma.a).in_field(big_field))
            rhs = act(image, e.embed_point(*p.coords), policy)
            worst = max(worst, lhs.deviation(rhs))
        passed = worst < policy.tolerance
    log.debug("check_done", trials=trials, max_deviation=bound_string(worst))
    return CheckResult('embedding_compatibility', Verdict.of(passed), {
        'trials': trials,
        'seed': seed,
        'max_deviation': bound_string(worst),
        'tolerance': bound_string(policy.tolerance),
        'injectivity': 'not verified',
    })


@dataclass(frozen=True)
class ProbeReport:
    entries: Tuple[Dict, ...]

    @property
    def hits(self) -> List[Dict]:
        return [entry for entry in self.entries if entry['status'] == 'hit']

    def to_dict(self) -> dict:
        return {
            'note': 'exploration aid over user-supplied candidates; not a decision procedure',
            'candidates': list(self.entries),
            'hits': len(self.hits),
        }


def _probe_one(K: NumberField, eta: AlgebraicNumber, policy: PrecisionPolicy) -> Dict:
    entry = {'eta': eta.to_json()}
    if eta.is_rational:
        entry.update(status='skipped', note='candidate is rational')
        return entry
    try:
        witness = verify_subfield(K, eta, policy)
    except OTError as e:
        entry.update(status='rejected', note=str(e))
        return entry
    entry.update(status='hit' if witness.usable else 'miss',
                 signature=list(witness.k1.signature),
                 k1_defining=witness.k1_defining.to_json(),
                 note='; '.join(witness.flags))
    return entry


def conjecture_probe(K: NumberField, candidates: Sequence[AlgebraicNumber],
                     policy: Optional[PrecisionPolicy] = None) -> ProbeReport:
    """Signature of Q(eta) for each candidate, in input order.

    Rejected candidates are reported in the entries, never raised.

    Sequential: mpmath precision is process-global, so candidates never share threads.
    """
    policy = policy or K.policy
    return ProbeReport(tuple(_probe_one(K, eta, policy) for eta in candidates))
