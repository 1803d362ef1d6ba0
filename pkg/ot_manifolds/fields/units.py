"""Units, the log map and admissible unit groups."""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf
import numpy as np

from ..certificates import Verdict
from ..errors import CompletionError, FieldError, NotAUnitError
from ..exact.balls import Ball, bound_string
from ..exact.precision import PrecisionPolicy
from ..logging_config import get_logger, with_field_context
from .number_field import (AlgebraicNumber, NumberField, embed, embeddings,
                           is_algebraic_integer, norm)

logger = get_logger(__name__)

# Float prefilter for |N(x)| = 1; exact norms of integral residues are integers.
NORM_PREFILTER = 0.25
# Float log vectors of related units agree far below this.
LOG_CLASS_TOLERANCE = 1e-6


def is_unit(x: AlgebraicNumber) -> bool:
    """Algebraic integer of norm +1 or -1."""
    if x.is_zero:
        return False
    return is_algebraic_integer(x) and abs(norm(x)) == 1


def log_map(u: AlgebraicNumber, policy: Optional[PrecisionPolicy] = None,
            check: bool = True) -> Tuple[Ball, ...]:
    """(ln|s_1(u)|, .., ln|s_s(u)|, 2 ln|s_{s+1}(u)|, .., 2 ln|s_m(u)|).

    Args:
        u: unit of K
        policy: precision override; defaults to the field's
        check: verify that u is a unit first

    Returns:
        Tuple[Ball, ...]: m real balls summing to 0 up to their radii

    Raises:
        NotAUnitError: If ``check`` is set and u is not a unit
        FieldError: If some |s_i(u)| is not separated from 0
    """
    if check and not is_unit(u):
        raise NotAUnitError(f"{u} is not a unit")
    field = u.field.at_precision(policy) if policy else u.field
    values = embeddings(u.in_field(field))
    row = []
    with field.policy.context():
        for i in range(field.m):
            modulus = values[i].abs()
            if not modulus.is_positive():
                raise FieldError(f"|sigma_{i + 1}({u})| not separated from 0 at "
                                 f"{field.policy.working_bits} bits")
            value = modulus.log()
            row.append(value if i < field.s else value * 2)
    return tuple(row)


def log_height(u: AlgebraicNumber, policy: Optional[PrecisionPolicy] = None) -> mpf:
    """Euclidean norm of the full log vector."""
    row = log_map(u, policy, check=False)
    return mpmath.sqrt(mpmath.fsum(b.mid.real ** 2 for b in row))


def is_totally_positive(u: AlgebraicNumber) -> bool:
    """All real embeddings certified positive."""
    return all(embed(u, i).is_positive() for i in range(1, u.field.s + 1))


@dataclass(frozen=True)
class UnitSystem:
    field: NumberField
    generators: Tuple[AlgebraicNumber, ...]
    log_rows: Tuple[Tuple[Ball, ...], ...]
    positivity_flags: Tuple[bool, ...]

    @property
    def expected_rank(self) -> int:
        return self.field.s + self.field.t - 1

    def __len__(self) -> int:
        return len(self.generators)

    def log_matrix(self) -> mpmath.matrix:
        with self.field.policy.context():
            return mpmath.matrix([[b.mid.real for b in row] for row in self.log_rows])

    def max_radius(self) -> mpf:
        return max((b.rad for row in self.log_rows for b in row), default=mpf(0))

    def row_sums(self) -> List[Ball]:
        with self.field.policy.context():
            return [sum(row[1:], row[0]) for row in self.log_rows]

    def to_dict(self, digits: int = 30) -> dict:
        with self.field.policy.context():
            rows = [[b.to_interval(digits) for b in row] for row in self.log_rows]
        return {
            'generators': [g.to_json() for g in self.generators],
            'log_rows': rows,
            'positive': list(self.positivity_flags),
        }


def build_unit_system(field: NumberField, generators: Sequence[AlgebraicNumber],
                      policy: Optional[PrecisionPolicy] = None) -> UnitSystem:
    """Validate every generator as a unit and compute its log row and positivity flag.

    Raises:
        NotAUnitError: If a generator is not a unit
    """
    if policy is not None:
        field = field.at_precision(policy)
    generators = tuple(g.in_field(field) for g in generators)
    rows, flags = [], []
    for index, g in enumerate(generators):
        if not is_unit(g):
            raise NotAUnitError(f"Generator {index + 1} ({g}) is not a unit: norm {norm(g)}")
        rows.append(log_map(g, check=False))
        flags.append(is_totally_positive(g))
    return UnitSystem(field, generators, tuple(rows), tuple(flags))


# -- rank and admissibility ----------------------------------------------------

@dataclass(frozen=True)
class RankReport:
    rank: int
    expected: int
    generator_count: int
    verdict: Verdict
    singular_values: Tuple[mpf, ...]

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def to_dict(self) -> dict:
        return {
            'rank': self.rank,
            'expected': self.expected,
            'generator_count': self.generator_count,
            'singular_values': [bound_string(v, 20) for v in self.singular_values],
        }


def dirichlet_rank_check(us: UnitSystem) -> RankReport:
    """Numerical rank of the log matrix compared with s + t - 1.

    Singular values below the tolerance count as zero and those above the
    rank band as nonzero, both widened by the radius slack.

    Returns:
        RankReport: Pass when the rank equals min(generators, s + t - 1);
        Inconclusive when a singular value falls between the two edges
    """
    policy = us.field.policy
    expected = us.expected_rank
    if not us.generators:
        return RankReport(0, expected, 0, Verdict.PASS, ())

    with policy.context():
        singular = mpmath.svd_r(us.log_matrix(), compute_uv=False)
        values = tuple(sorted((abs(singular[k]) for k in range(len(singular))), reverse=True))
        # Perturbation of singular values is bounded by the Frobenius norm of the radii.
        slack = us.max_radius() * mpmath.sqrt(len(us.generators) * us.field.m)
        zero_edge = policy.tolerance + slack
        nonzero_edge = policy.rank_band + slack

    rank = sum(1 for v in values if v >= nonzero_edge)
    undecided = [v for v in values if zero_edge < v < nonzero_edge]
    if undecided:
        logger.warning("rank_inconclusive", undecided=[bound_string(v) for v in undecided])
        verdict = Verdict.INCONCLUSIVE
    else:
        target = min(len(us.generators), expected)
        verdict = Verdict.of(rank == target and rank <= expected)
    return RankReport(rank, expected, len(us.generators), verdict, values)


class Admissibility(str, Enum):
    ADMISSIBLE = 'Admissible'
    NOT_ADMISSIBLE = 'NotAdmissible'
    INCONCLUSIVE = 'Inconclusive'

    @property
    def verdict(self) -> Verdict:
        return {
            Admissibility.ADMISSIBLE: Verdict.PASS,
            Admissibility.NOT_ADMISSIBLE: Verdict.FAIL,
            Admissibility.INCONCLUSIVE: Verdict.INCONCLUSIVE,
        }[self]


@dataclass(frozen=True)
class AdmissibilityCertificate:
    projected_matrix: Tuple[Tuple[Ball, ...], ...]
    det: Ball
    det_abs: mpf
    verdict: Admissibility
    reason: str = ''

    @property
    def admissible(self) -> bool:
        return self.verdict == Admissibility.ADMISSIBLE

    def to_dict(self, digits: int = 30) -> dict:
        return {
            'verdict': self.verdict.value,
            'det': self.det.to_interval(digits),
            'det_abs_lower': bound_string(self.det_abs, 20),
            'projected_matrix': [[b.to_interval(digits) for b in row]
                                 for row in self.projected_matrix],
            'reason': self.reason,
        }


def determinant_ball(rows: Sequence[Sequence[Ball]]) -> Ball:
    """Determinant of a real ball matrix with a row-perturbation (Hadamard) error bound."""
    k = len(rows)
    if k == 0:
        return Ball.exact(1)
    mids = mpmath.matrix([[b.mid.real for b in row] for row in rows])
    value = mpmath.det(mids)
    exact_part = mpf(1)
    perturbed = mpf(1)
    for row in rows:
        size = mpmath.sqrt(mpmath.fsum(b.mid.real ** 2 for b in row))
        spread = mpmath.sqrt(mpmath.fsum(b.rad ** 2 for b in row))
        exact_part *= size
        perturbed *= size + spread
    rounding = perturbed * mpmath.factorial(k) * mpmath.ldexp(mpf(1), 4 - mpmath.mp.prec)
    return Ball(mpmath.mpc(value), perturbed - exact_part + rounding, real=True)


def admissibility_check(us: UnitSystem) -> AdmissibilityCertificate:
    """s x s determinant test on the first s log coordinates.

    Args:
        us: unit system; needs exactly s totally positive generators

    Returns:
        AdmissibilityCertificate: projected rows, determinant ball, its lower
        bound and a verdict; Inconclusive when the ball straddles the tolerance
    """
    field = us.field
    s = field.s
    projected = tuple(tuple(row[:s]) for row in us.log_rows)

    def rejected(reason: str) -> AdmissibilityCertificate:
        logger.debug("not_admissible", reason=reason)
        return AdmissibilityCertificate(projected, Ball.exact(0), mpf(0),
                                        Admissibility.NOT_ADMISSIBLE, reason)

    if s == 0:
        return rejected('field has no real embedding')
    if len(us.generators) != s:
        return rejected(f'{len(us.generators)} generators, need s = {s}')
    if not all(us.positivity_flags):
        return rejected('a generator has a negative real embedding')

    with field.policy.context():
        det = determinant_ball(projected)
        tolerance = field.policy.tolerance
        lower = max(abs(det.mid.real) - det.rad, mpf(0))
        upper = abs(det.mid.real) + det.rad

    if lower > tolerance:
        verdict, reason = Admissibility.ADMISSIBLE, ''
    elif upper < tolerance:
        verdict, reason = Admissibility.NOT_ADMISSIBLE, 'projected determinant vanishes'
    else:
        verdict, reason = Admissibility.INCONCLUSIVE, 'determinant inside the tolerance band'
        logger.warning("admissibility_inconclusive", det=bound_string(det.mid.real))
    return AdmissibilityCertificate(projected, det, lower, verdict, reason)


def positivity_enforce(gens: Sequence[AlgebraicNumber]) -> List[AlgebraicNumber]:
    """Square every generator with a negative real image.

    Raises:
        NotAUnitError: If a real image is not separated from 0
    """
    result = []
    for u in gens:
        signs = [embed(u, i) for i in range(1, u.field.s + 1)]
        if any(b.contains_zero() for b in signs):
            raise NotAUnitError(f"Real embedding of {u} not separated from 0")
        result.append(u * u if any(b.is_negative() for b in signs) else u)
    return result


# -- bounded search ------------------------------------------------------------

def _float_roots(field: NumberField) -> np.ndarray:
    with field.policy.context():
        return np.array([complex(r.mid) for r in field.roots], dtype=np.complex128)


def _scan_chunk(roots: np.ndarray, bound: int, leading: int) -> List[Tuple[int, ...]]:
    """Coefficient vectors with the top coefficient fixed whose float norm is near +-1.

    Pure numpy: safe to run from worker threads.
    """
    n = len(roots)
    values = np.arange(-bound, bound + 1)
    grids = np.meshgrid(*([values] * (n - 1)), indexing='ij')
    lower = np.stack([g.ravel() for g in grids], axis=-1)
    coeffs = np.concatenate([lower, np.full((lower.shape[0], 1), leading)], axis=1)
    powers = np.vander(roots, n, increasing=True)
    images = coeffs.astype(np.float64) @ powers.T
    norms = np.prod(images, axis=1).real
    keep = np.abs(np.abs(norms) - 1.0) < NORM_PREFILTER
    return [tuple(int(c) for c in row) for row in coeffs[keep]]


def _log_vector(u: AlgebraicNumber) -> np.ndarray:
    """Float log vector of u; u and -u share it, 1/u and -1/u negate it."""
    field = u.field
    values = _float_roots(field)
    images = np.polyval(np.array([float(c) for c in reversed(u.coefficients)]), values)
    logs = np.log(np.abs(images[:field.m]))
    logs[field.s:] *= 2
    return logs


def _log_close(a: np.ndarray, b: np.ndarray) -> bool:
    """Log vectors that may belong to one class u ~ +-u^(+-1)."""
    return bool(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) < LOG_CLASS_TOLERANCE)


def _related(u: AlgebraicNumber, v: AlgebraicNumber) -> bool:
    """u = +-v or u = +-1/v, exactly."""
    if u == v or u == -v:
        return True
    product = u * v
    return product.is_rational and abs(product.rational_value) == 1


def _preference(u: AlgebraicNumber) -> Tuple:
    negatives = sum(1 for i in range(1, u.field.s + 1) if embed(u, i).is_negative())
    return (negatives, sum(abs(c) for c in u.coefficients), u.coefficients)


def unit_search(field: NumberField, coeff_bound: int, max_results: int = 24,
                workers: int = 1) -> List[AlgebraicNumber]:
    """Units with residue coefficients in [-B, B], one per class u ~ +-u^(+-1).

    Results are sorted by ascending log height, ties broken by coefficients.
    Parallel scanning splits the box by top coefficient and merges in order,
    so the output is independent of ``workers``.

    Args:
        field: number field of degree >= 2
        coeff_bound: B; an empty list for B < 1
        max_results: cap on the returned units
        workers: scanning threads

    Returns:
        List[AlgebraicNumber]: class representatives with exact norm +-1
    """
    log = with_field_context(logger, field.label or str(field.defining), field.signature)
    if coeff_bound < 1 or field.degree < 2:
        return []

    leadings = list(range(-coeff_bound, coeff_bound + 1))
    roots = _float_roots(field)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda c: _scan_chunk(roots, coeff_bound, c), leadings))
    else:
        chunks = [_scan_chunk(roots, coeff_bound, c) for c in leadings]
    candidates = list(itertools.chain.from_iterable(chunks))

    classes: List[Tuple[np.ndarray, AlgebraicNumber]] = []
    confirmed = 0
    for coeffs in candidates:
        if not any(coeffs[1:]):
            continue
        u = field.element(coeffs)
        if abs(norm(u)) != 1:
            continue
        confirmed += 1
        key = _log_vector(u)
        for index, (other_key, existing) in enumerate(classes):
            if _log_close(key, other_key) and _related(u, existing):
                if _preference(u) < _preference(existing):
                    classes[index] = (key, u)
                break
        else:
            classes.append((key, u))

    found = [u for _, u in classes]
    with field.policy.context():
        ranked = sorted(found, key=lambda u: (round(float(log_height(u)), 12), u.coefficients))
    log.debug("unit_search_done", bound=coeff_bound, candidates=len(candidates),
              units=confirmed, classes=len(found), workers=workers)
    return ranked[:max_results]


def complete_basis(seed: UnitSystem, pool: UnitSystem) -> UnitSystem:
    """Greedily extend ``seed`` by pool generators maximizing the projected Gram determinant.

    Args:
        seed: generators that must be kept, in order
        pool: candidates over the same field

    Returns:
        UnitSystem: s totally positive generators, certified Admissible

    Raises:
        CompletionError: If the seed projection vanishes, the pool runs out,
            or the result is not Admissible; ``partial`` holds the progress
    """
    field = seed.field
    s = field.s
    policy = field.policy
    chosen = list(seed.generators)
    rows = [tuple(row[:s]) for row in seed.log_rows]
    candidates = [(g, tuple(row[:s])) for g, row in zip(pool.generators, pool.log_rows)]

    with policy.context():
        if rows and _gram_det(rows) <= policy.tolerance:
            raise CompletionError("Seed has a vanishing log projection", partial=chosen)
        while len(chosen) < s:
            best = None
            for index, (g, row) in enumerate(candidates):
                value = _gram_det(rows + [row])
                if best is None or value > best[0]:
                    best = (value, index)
            if best is None or best[0] <= policy.tolerance:
                raise CompletionError(
                    f"Completion stalled at {len(chosen)} of {s} generators", partial=chosen)
            g, row = candidates.pop(best[1])
            chosen.append(g)
            rows.append(row)
            logger.debug("completion_step", selected=g.to_json(),
                         gram=bound_string(best[0]))

    completed = build_unit_system(field, positivity_enforce(chosen))
    certificate = admissibility_check(completed)
    if not certificate.admissible:
        raise CompletionError(f"Completed system is {certificate.verdict.value}",
                              partial=completed.generators)
    return completed


def _gram_det(rows: Sequence[Sequence[Ball]]) -> mpf:
    matrix = mpmath.matrix([[b.mid.real for b in row] for row in rows])
    return abs(mpmath.det(matrix * matrix.T))
