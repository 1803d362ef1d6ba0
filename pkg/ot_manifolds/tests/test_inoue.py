"""Test cases for Inoue surfaces of type S0."""

import dataclasses

import mpmath
import pytest

from ot_manifolds.certificates import Verdict
from ot_manifolds.errors import InoueConstructionError
from ot_manifolds.exact.polynomial import IntPolynomial
from ot_manifolds.fields.number_field import embed
from ot_manifolds.manifolds.inoue import (compare_with_ot, inoue_from_cubic, inoue_from_matrix,
                                          verify_lattice_rank)
from ot_manifolds.manifolds.ot import assemble_ot

from .conftest import POLICY, make_field

THETA_MATRIX = [[0, 0, 1], [1, 0, 1], [0, 1, 0]]


@pytest.fixture(scope='module')
def plastic_inoue(plastic):
    return inoue_from_cubic(plastic, plastic.generator)


class TestFromMatrix:
    """Test cases for inoue_from_matrix."""

    def test_companion_matrix(self):
        data = inoue_from_matrix(THETA_MATRIX, POLICY)
        assert data.charpoly == IntPolynomial.from_coefficients([-1, -1, 0, 1])
        assert abs(data.c.mid.real - mpmath.mpf('1.324717957')) < mpmath.mpf('1e-9')
        with POLICY.context():
            modulus = data.alpha.abs().mid.real ** 2
        assert abs(modulus - mpmath.mpf('0.754877666')) < mpmath.mpf('1e-9')
        defect = data.product_defect()
        assert abs(defect.mid) + defect.rad < mpmath.ldexp(1, -60)

    def test_alpha_in_upper_half_plane(self):
        data = inoue_from_matrix(THETA_MATRIX, POLICY)
        assert data.alpha.mid.imag > 0
        assert data.c.real

    def test_generators(self):
        data = inoue_from_matrix(THETA_MATRIX, POLICY)
        assert [g.name for g in data.generators] == ['g0', 'g1', 'g2', 'g3']
        assert data.generators[0].scale == (data.alpha, data.c)
        for vector in (data.real_eigvec, data.complex_eigvec):
            assert abs(max(abs(b.mid) for b in vector) - 1) < mpmath.mpf('1e-30')

    @pytest.mark.parametrize("matrix,message", [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 'c = 1'),
        ([[0, 0, 1], [1, 0, 3], [0, 1, 0]], 'real roots'),
        ([[2, 0, 0], [0, 0, 1], [0, 1, 1]], 'Determinant is -2'),
        ([[0, 0, 1], [1, 0, 1]], '3x3'),
        ([[0, 0, 1], [1, 0, '1/2'], [0, 1, 0]], 'not an integer'),
    ])
    def test_rejected(self, matrix, message):
        with pytest.raises(InoueConstructionError, match=message):
            inoue_from_matrix(matrix, POLICY)

    def test_to_dict(self):
        data = inoue_from_matrix(THETA_MATRIX, POLICY).to_dict()
        assert data['matrix'] == THETA_MATRIX
        assert data['charpoly'] == ['-1', '-1', '0', '1']
        assert len(data['generators']) == 4


class TestFromCubic:
    """Test cases for inoue_from_cubic."""

    def test_plastic_generator(self, plastic, plastic_inoue):
        assert [list(row) for row in plastic_inoue.matrix] == THETA_MATRIX
        assert plastic_inoue.c.overlaps(embed(plastic.generator, 1))

    def test_cube_root_two(self, cube_root_two):
        data = inoue_from_cubic(cube_root_two, cube_root_two.element([-1, 1]))
        assert data.c.overlaps(embed(cube_root_two.element([-1, 1]), 1))
        assert verify_lattice_rank(data).passed

    def test_unit_one_rejected(self, plastic):
        with pytest.raises(InoueConstructionError, match='c = 1'):
            inoue_from_cubic(plastic, plastic.one)

    def test_negative_norm_hint(self):
        field = make_field([1, -1, 0, 1])
        with pytest.raises(InoueConstructionError, match=r'u\^2'):
            inoue_from_cubic(field, field.generator)

    def test_non_unit_rejected(self, plastic):
        with pytest.raises(InoueConstructionError, match='not a unit'):
            inoue_from_cubic(plastic, plastic.rational(2))

    def test_wrong_signature(self, quartic):
        with pytest.raises(InoueConstructionError, match='signature'):
            inoue_from_cubic(quartic, quartic.generator)


class TestLatticeRank:
    """Test cases for verify_lattice_rank."""

    def test_plastic(self, plastic_inoue):
        report = verify_lattice_rank(plastic_inoue)
        assert report.passed
        assert report.to_dict()['verdict'] == 'Pass'

    def test_degenerate_fake(self, plastic_inoue):
        fake = dataclasses.replace(plastic_inoue,
                                   complex_eigvec=tuple(plastic_inoue.real_eigvec))
        assert verify_lattice_rank(fake).verdict == Verdict.FAIL

    def test_scaling_keeps_verdict(self, plastic_inoue):
        with POLICY.context():
            doubled = tuple(b * 2 for b in plastic_inoue.complex_eigvec)
        scaled = dataclasses.replace(plastic_inoue, complex_eigvec=doubled)
        assert verify_lattice_rank(scaled).passed


class TestCompareWithOT:
    """Test cases for agreement with the OT(1,1) action."""

    def test_plastic_agreement(self, plastic_inoue, plastic_ot):
        result = compare_with_ot(plastic_inoue, plastic_ot, trials=10)
        assert result.passed
        assert result.evidence['swapped_pair'] is False

    def test_other_unit_disagrees(self, plastic_inoue, cube_root_two):
        ot = assemble_ot(cube_root_two, [cube_root_two.element([-1, 1])])
        result = compare_with_ot(plastic_inoue, ot, trials=5)
        assert result.verdict == Verdict.FAIL
        assert 'multiplication' in result.message

    def test_needs_cubic(self, plastic_inoue, quintic_ot):
        assert compare_with_ot(plastic_inoue, quintic_ot).verdict == Verdict.FAIL
