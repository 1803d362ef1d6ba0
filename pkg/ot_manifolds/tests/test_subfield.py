"""Test cases for subfield witnesses and the embedded Inoue surface."""

import pytest

from ot_manifolds.certificates import Verdict
from ot_manifolds.errors import CompletionError, InclusionError, SubfieldError
from ot_manifolds.exact.polynomial import IntPolynomial
from ot_manifolds.fields.units import build_unit_system, is_unit
from ot_manifolds.manifolds.ot import assemble_ot
from ot_manifolds.manifolds.subfield import (Inclusion, build_embedding, conjecture_probe,
                                             match_restrictions, subfield_ot,
                                             verify_embedding_compat, verify_inclusion,
                                             verify_restriction_coherence, verify_subfield)


def P(*coefficients):
    return IntPolynomial.from_coefficients(coefficients)


@pytest.fixture(scope='module')
def sextic_witness(sextic):
    theta = sextic.generator
    return verify_subfield(sextic, theta * theta)


@pytest.fixture(scope='module')
def surface(sextic, sextic_witness):
    return build_embedding(sextic, sextic_witness, coeff_bound=2)


class TestVerifySubfield:
    """Test cases for subfield witnesses."""

    def test_cubic_subfield(self, sextic_witness):
        assert sextic_witness.k1_defining == P(-2, 0, 0, 1)
        assert sextic_witness.k1.signature == (1, 1)
        assert sextic_witness.usable

    def test_real_quadratic_is_flagged(self, sextic):
        witness = verify_subfield(sextic, sextic.generator ** 3)
        assert witness.k1_defining == P(-2, 0, 1)
        assert witness.k1.signature == (2, 0)
        assert not witness.usable
        assert witness.to_dict()['flags'] == ['signature (2, 0) is not (1, 1)']

    def test_full_field_rejected(self, sextic):
        with pytest.raises(SubfieldError, match='itself'):
            verify_subfield(sextic, sextic.generator)

    def test_rational_rejected(self, sextic):
        with pytest.raises(SubfieldError, match='rational'):
            verify_subfield(sextic, sextic.rational(3))


class TestInclusion:
    """Test cases for the inclusion K1 -> K."""

    def test_generator_maps_to_eta(self, sextic, sextic_witness):
        inclusion = Inclusion(sextic_witness.k1, sextic, sextic_witness.eta)
        theta = sextic.generator
        assert inclusion(sextic_witness.k1.generator) == theta * theta
        assert inclusion(sextic_witness.k1.rational(5)) == 5

    def test_homomorphism(self, sextic, sextic_witness):
        inclusion = Inclusion(sextic_witness.k1, sextic, sextic_witness.eta)
        result = verify_inclusion(inclusion, 20, seed=2)
        assert result.passed
        assert result.evidence['failures'] == 0

    def test_foreign_element_rejected(self, sextic, sextic_witness, plastic):
        inclusion = Inclusion(sextic_witness.k1, sextic, sextic_witness.eta)
        with pytest.raises(InclusionError):
            inclusion(plastic.generator)


class TestRestrictions:
    """Test cases for matching embeddings of K to those of K1."""

    def test_sextic_table(self, sextic, sextic_witness):
        restriction, oriented = match_restrictions(sextic, sextic_witness)
        assert restriction.r[:2] == (1, 1)
        assert restriction.r[2:4] == (2, 2)
        assert restriction.r[4:] == (3, 3)
        assert len(restriction.swaps) == 1
        assert oriented.swaps == restriction.swaps
        assert restriction.map_spec(2, 2) == ('w1', 'w1', 'w2', 'w2')

    def test_unusable_witness(self, sextic):
        witness = verify_subfield(sextic, sextic.generator ** 3)
        with pytest.raises(SubfieldError, match='not usable'):
            match_restrictions(sextic, witness)


class TestEmbedding:
    """Test cases for build_embedding and its checks."""

    def test_surface(self, surface):
        assert surface.u1 == surface.u * surface.u
        assert is_unit(surface.u1)
        assert len(surface.big_units) == 2
        assert surface.big_units.generators[0] == surface.inclusion(surface.u1)
        assert surface.map_spec == ('w1', 'w1', 'w2', 'w2')

    def test_big_units_admissible(self, surface):
        assert assemble_ot(surface.field, surface.big_units.generators).is_admissible

    def test_subfield_ot(self, surface):
        ot = subfield_ot(surface)
        assert ot.is_admissible
        assert ot.field.signature == (1, 1)

    def test_restriction_coherence(self, surface):
        result = verify_restriction_coherence(surface, 10)
        assert result.passed

    def test_compatibility(self, surface):
        result = verify_embedding_compat(surface, trials=10, seed=3)
        assert result.passed
        assert result.evidence['injectivity'] == 'not verified'

    def test_compatibility_needs_completed_units(self, surface):
        other = assemble_ot(surface.field, [surface.big_units.generators[0]])
        result = verify_embedding_compat(surface, other, trials=2)
        assert result.verdict == Verdict.FAIL

    def test_to_dict(self, surface):
        data = surface.to_dict()
        assert data['injectivity'] == 'not verified'
        assert data['map_spec'] == ['w1', 'w1', 'w2', 'w2']

    def test_empty_pool_stalls(self, sextic, sextic_witness):
        with pytest.raises(CompletionError) as excinfo:
            build_embedding(sextic, sextic_witness, pool=build_unit_system(sextic, []),
                            coeff_bound=2)
        assert len(excinfo.value.partial) == 1

    def test_unusable_witness(self, sextic):
        witness = verify_subfield(sextic, sextic.generator ** 3)
        with pytest.raises(SubfieldError):
            build_embedding(sextic, witness, coeff_bound=2)


class TestCandidateSignatures:
    """Test cases for subfield signatures over candidate generators."""

    def test_mixed_candidates(self, sextic):
        theta = sextic.generator
        report = conjecture_probe(sextic, [theta ** 2, theta ** 3, theta, sextic.rational(2)])
        statuses = [entry['status'] for entry in report.entries]
        assert statuses == ['hit', 'miss', 'rejected', 'skipped']
        assert len(report.hits) == 1
        assert report.hits[0]['signature'] == [1, 1]

    def test_empty(self, sextic):
        report = conjecture_probe(sextic, [])
        assert report.to_dict()['hits'] == 0
        assert report.entries == ()
