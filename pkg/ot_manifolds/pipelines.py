"""Command pipelines: parsed spec in, certificate out."""

from typing import Any, Callable, Dict, List, Optional

import mpmath

from .certificates import Certificate, CheckResult, Verdict
from .config import Config
from .errors import (CompletionError, InclusionError, InoueConstructionError,
                     RestrictionMatchError, SubfieldError)
from .exact.balls import bound_string
from .exact.precision import PrecisionPolicy
from .fields.irreducibility import Status
from .fields.number_field import AlgebraicNumber, NumberField, build_field
from .fields.units import (admissibility_check, build_unit_system, dirichlet_rank_check,
                           unit_search)
from .logging_config import get_logger, with_field_context
from .manifolds.form import form_suite
from .manifolds.inoue import (compare_with_ot, inoue_from_cubic, inoue_from_matrix,
                              verify_lattice_rank)
from .manifolds.ot import assemble_ot, validate
from .manifolds.subfield import (build_embedding, conjecture_probe, verify_embedding_compat,
                                 verify_inclusion, verify_restriction_coherence,
                                 verify_subfield)
from .validators import SpecError, Validator

logger = get_logger(__name__)

COMMANDS = ('signature', 'units', 'admissible', 'build-ot', 'check-form', 'inoue', 'embed',
            'probe')

# Log-map rows of genuine units sum to zero; allow this many tolerances of rounding.
LOG_SUM_SLACK = 10


def _residues_json(values) -> List[List[str]]:
    return [[str(c) for c in residue] for residue in values]


class CertificationRunner:
    """Runs one command against a parsed spec and collects a Certificate.

    Explicit arguments win over the spec's ``policy`` block, which wins over
    the configuration. ``trials``, when given, caps every randomized check.
    """

    def __init__(self, config: Optional[Config] = None, seed: Optional[int] = None,
                 bits: Optional[int] = None, trials: Optional[int] = None,
                 bound: Optional[int] = None, workers: Optional[int] = None):
        self.config = config or Config()
        self.seed = seed if seed is not None else int(self.config.get('checks', 'seed', default=0))
        self.bits = bits
        self.trials = trials
        self.bound = bound if bound is not None else int(self.config.get('search', 'coeff_bound'))
        self.workers = workers if workers is not None else int(self.config.get('search', 'workers'))
        self.max_results = int(self.config.get('search', 'max_results'))

        self._handlers: Dict[str, Callable[[Dict[str, Any], Certificate], None]] = {
            'signature': self._signature,
            'units': self._units,
            'admissible': self._admissible,
            'build-ot': self._build_ot,
            'check-form': self._check_form,
            'inoue': self._inoue,
            'embed': self._embed,
            'probe': self._probe,
        }

    def _count(self, key: str) -> int:
        value = int(self.config.get('checks', key))
        if self.trials is None:
            return value
        if key == 'trials':
            return self.trials
        return min(value, self.trials)

    def _policy(self, spec: Dict[str, Any]) -> PrecisionPolicy:
        if self.bits is not None:
            return PrecisionPolicy(self.bits)
        spec_bits = Validator.validate_policy(spec)
        if spec_bits is not None:
            return PrecisionPolicy(spec_bits)
        return self.config.policy()

    def run(self, command: str, spec: Dict[str, Any]) -> Certificate:
        """Dispatch ``command`` and collect its checks.

        Args:
            command: one of COMMANDS
            spec: loaded spec mapping

        Returns:
            Certificate: inputs, results and checks; its verdict gives the exit code

        Raises:
            SpecError: If the command is unknown or the spec is malformed
            OTError: For input errors raised by the operations, such as a
                non-unit generator or a reducible defining polynomial
        """
        if command not in self._handlers:
            raise SpecError('', f"Unknown command '{command}'. Available: {', '.join(COMMANDS)}")
        policy = self._policy(spec)
        certificate = Certificate(command, {}, policy, self.seed)
        self._handlers[command](spec, certificate)
        logger.info("certification_done", command=command, verdict=certificate.verdict.value,
                    checks=len(certificate.checks))
        return certificate

    # -- shared spec pieces ----------------------------------------------------

    def _field(self, spec: Dict[str, Any], certificate: Certificate,
               location: str = '') -> NumberField:
        parsed = Validator.validate_field_spec(spec, location)
        field_input = {'defining': parsed['defining'].to_json(), 'label': parsed['label']}
        if parsed['assert_irreducible']:
            field_input['irreducible'] = 'asserted'
        certificate.inputs['field'] = field_input
        return build_field(parsed['defining'], certificate.policy, parsed['label'],
                           assert_irreducible=parsed['assert_irreducible'])

    def _elements(self, field: NumberField, spec: Dict[str, Any], key: str,
                  certificate: Certificate, required: bool = True) -> Optional[List[AlgebraicNumber]]:
        if key not in spec and not required:
            return None
        values = Validator.validate_residues(Validator.require(spec, key), field.degree, key,
                                             allow_empty=not required)
        certificate.inputs[key] = _residues_json(values)
        return [field.element(v) for v in values]

    def _element(self, field: NumberField, spec: Dict[str, Any], key: str,
                 certificate: Certificate) -> AlgebraicNumber:
        values = Validator.validate_residue(Validator.require(spec, key), field.degree, key)
        certificate.inputs[key] = [str(c) for c in values]
        return field.element(values)

    # -- handlers --------------------------------------------------------------

    def _signature(self, spec: Dict[str, Any], certificate: Certificate):
        field = self._field(spec, certificate)
        certificate.results['field'] = field.to_dict()
        certificate.add(CheckResult('signature', Verdict.PASS,
                                    {'signature': list(field.signature),
                                     'degree': field.degree,
                                     'ot_eligible': field.is_ot_eligible}))
        status = field.irreducibility
        verdict = Verdict.PASS if status.status == Status.PROVEN else Verdict.INCONCLUSIVE
        if verdict == Verdict.INCONCLUSIVE:
            logger.warning("irreducibility_unknown", defining=field.defining.to_json())
        certificate.add(CheckResult('irreducibility', verdict, status.to_dict()))

    def _units(self, spec: Dict[str, Any], certificate: Certificate):
        field = self._field(spec, certificate)
        generators = self._elements(field, spec, 'generators', certificate, required=False)
        if generators is None:
            certificate.inputs['search'] = {'coeff_bound': self.bound,
                                            'max_results': self.max_results}
            generators = unit_search(field, self.bound, self.max_results, self.workers)
        units = build_unit_system(field, generators)
        certificate.results['units'] = units.to_dict()

        policy = certificate.policy
        with policy.context():
            limit = LOG_SUM_SLACK * policy.tolerance
            sums = units.row_sums()
            worst = max((abs(b.mid) + b.rad for b in sums), default=mpmath.mpf(0))
        certificate.add(CheckResult('log_sums', Verdict.of(worst < limit), {
            'units': len(units),
            'max_abs_sum': bound_string(worst),
            'limit': bound_string(limit),
        }))
        rank = dirichlet_rank_check(units)
        certificate.add(CheckResult('dirichlet_rank', rank.verdict, rank.to_dict()))

    def _admissible(self, spec: Dict[str, Any], certificate: Certificate):
        field = self._field(spec, certificate)
        generators = self._elements(field, spec, 'generators', certificate)
        units = build_unit_system(field, generators)
        admissibility = admissibility_check(units)
        certificate.results['units'] = units.to_dict()
        certificate.add(CheckResult('admissibility', admissibility.verdict.verdict,
                                    admissibility.to_dict(), admissibility.reason))

    def _assemble(self, spec: Dict[str, Any], certificate: Certificate):
        field = self._field(spec, certificate)
        generators = self._elements(field, spec, 'generators', certificate)
        ot = assemble_ot(field, generators)
        certificate.results['ot'] = ot.to_dict()
        return ot

    def _build_ot(self, spec: Dict[str, Any], certificate: Certificate):
        ot = self._assemble(spec, certificate)
        certificate.extend(validate(ot, self._count('trials'), self._count('leaf_samples'),
                                    self.seed, certificate.policy))

    def _check_form(self, spec: Dict[str, Any], certificate: Certificate):
        ot = self._assemble(spec, certificate)
        certificate.add(CheckResult('admissibility', ot.admissibility.verdict.verdict,
                                    ot.admissibility.to_dict(), ot.admissibility.reason))
        if not ot.is_admissible:
            return
        certificate.extend(form_suite(
            ot, self.seed,
            invariance_words=self._count('invariance_words'),
            semipositivity_samples=self._count('semipositivity_samples'),
            ddc_count=self._count('ddc_points'),
            ddc_bits=int(self.config.get('checks', 'ddc_bits')),
            ddc_step_exponent=int(self.config.get('checks', 'ddc_step_exponent')),
            ddc_threshold_exponent=int(self.config.get('checks', 'ddc_threshold_exponent')),
            policy=certificate.policy,
        ))

    def _inoue(self, spec: Dict[str, Any], certificate: Certificate):
        policy = certificate.policy
        ot = None
        try:
            if 'matrix' in spec:
                matrix = Validator.validate_matrix(spec['matrix'], 'matrix')
                certificate.inputs['matrix'] = [v for row in matrix for v in row]
                data = inoue_from_matrix(matrix, policy)
            else:
                field = self._field(spec, certificate)
                u = self._element(field, spec, 'unit', certificate)
                data = inoue_from_cubic(field, u, policy)
                ot = assemble_ot(field, [u])
        except InoueConstructionError as e:
            certificate.add(CheckResult('construction', Verdict.FAIL, {}, str(e)))
            return

        certificate.results['inoue'] = data.to_dict()
        with policy.context():
            defect = data.product_defect()
            certificate.add(CheckResult('construction', Verdict.PASS, {
                'charpoly': data.charpoly.to_json(),
                'product_defect': bound_string(abs(defect.mid) + defect.rad),
            }))
        rank = verify_lattice_rank(data)
        certificate.add(CheckResult('lattice_rank', rank.verdict, rank.to_dict()))
        if ot is not None:
            certificate.add(compare_with_ot(data, ot, self._count('embedding_trials'), self.seed))

    def _embed(self, spec: Dict[str, Any], certificate: Certificate):
        policy = certificate.policy
        field = self._field(spec, certificate)
        eta = self._element(field, spec, 'eta', certificate)
        pool_elements = self._elements(field, spec, 'pool', certificate, required=False)
        certificate.inputs['search'] = {'coeff_bound': self.bound, 'max_results': self.max_results}
        log = with_field_context(logger, field.label or str(field.defining), field.signature)

        try:
            witness = verify_subfield(field, eta, policy)
        except SubfieldError as e:
            certificate.add(CheckResult('subfield', Verdict.FAIL, {}, str(e)))
            return
        certificate.results['witness'] = witness.to_dict()
        certificate.add(CheckResult('subfield', Verdict.of(witness.usable), witness.to_dict(),
                                    '; '.join(witness.flags)))
        if not witness.usable:
            return

        pool = build_unit_system(field, pool_elements) if pool_elements is not None else None
        try:
            surface = build_embedding(field, witness, pool, self.bound, self.max_results,
                                      self.workers, policy)
        except CompletionError as e:
            certificate.add(CheckResult('embedding', Verdict.FAIL,
                                        {'partial': [g.to_json() for g in e.partial]}, str(e)))
            return
        except (SubfieldError, RestrictionMatchError, InclusionError) as e:
            certificate.add(CheckResult('embedding', Verdict.FAIL, {}, str(e)))
            return
        log.debug("embedding_ready", swaps=sorted(surface.restriction.swaps))

        certificate.results['embedding'] = surface.to_dict()
        certificate.add(CheckResult('embedding', Verdict.PASS,
                                    {'restriction': surface.restriction.to_dict(),
                                     'map_spec': list(surface.map_spec)}))
        admissibility = admissibility_check(surface.big_units)
        certificate.add(CheckResult('admissibility', admissibility.verdict.verdict,
                                    admissibility.to_dict(), admissibility.reason))
        certificate.add(verify_inclusion(surface.inclusion, self._count('inclusion_pairs'),
                                         self.seed))
        certificate.add(verify_restriction_coherence(surface, self._count('embedding_trials'),
                                                     self.seed))
        certificate.add(verify_embedding_compat(surface, trials=self._count('embedding_trials'),
                                                seed=self.seed, policy=policy))
        try:
            data = inoue_from_cubic(witness.k1, surface.u1, policy)
        except InoueConstructionError as e:
            certificate.add(CheckResult('subfield_inoue', Verdict.FAIL, {}, str(e)))
            return
        certificate.results['subfield_inoue'] = data.to_dict()
        rank = verify_lattice_rank(data)
        certificate.add(CheckResult('subfield_inoue', rank.verdict, rank.to_dict()))

    def _probe(self, spec: Dict[str, Any], certificate: Certificate):
        field = self._field(spec, certificate)
        candidates = self._elements(field, spec, 'candidates', certificate)
        report = conjecture_probe(field, candidates, certificate.policy)
        certificate.results['probe'] = report.to_dict()
        certificate.add(CheckResult('probe', Verdict.PASS,
                                    {'candidates': len(candidates), 'hits': len(report.hits)}))


def run(command: str, spec: Dict[str, Any], config: Optional[Config] = None,
        **options) -> Certificate:
    """Convenience wrapper around CertificationRunner."""
    return CertificationRunner(config, **options).run(command, spec)
