"""Test cases for number fields, embeddings and irreducibility."""

import mpmath
import numpy as np
import pytest
import sympy
from sympy import Rational

from ot_manifolds.errors import FieldError
from ot_manifolds.exact.balls import Ball, rational_to_mpf
from ot_manifolds.exact.polynomial import IntPolynomial
from ot_manifolds.exact.precision import PrecisionPolicy
from ot_manifolds.fields.irreducibility import Method, Status, check_irreducible
from ot_manifolds.fields.number_field import (build_field, characteristic_polynomial, embed,
                                              embeddings, is_algebraic_integer, min_poly,
                                              norm, trace)

from .conftest import make_field

PLASTIC_ROOT = mpmath.mpf('1.324717957244746025960908854')


def P(*coefficients):
    return IntPolynomial.from_coefficients(coefficients)


class TestBuildField:
    """Test cases for signature and root certification."""

    @pytest.mark.parametrize("coefficients,signature", [
        ((-1, -1, 0, 1), (1, 1)),
        ((-1, -1, 0, 0, 1), (2, 1)),
        ((-1, -1, 0, 0, 0, 1), (1, 2)),
        ((-2, 0, 0, 0, 0, 0, 1), (2, 2)),
        ((1, 0, 1), (0, 1)),
    ])
    def test_signature(self, coefficients, signature):
        field = make_field(coefficients)
        assert field.signature == signature
        assert len(field.roots) == field.degree

    def test_gaussian_field_is_not_ot_eligible(self):
        field = make_field([1, 0, 1])
        assert not field.is_ot_eligible
        with mpmath.workprec(128):
            assert abs(field.roots[0].mid - mpmath.mpc(0, 1)) <= field.roots[0].rad

    def test_root_ordering(self, quintic):
        roots = quintic.roots
        assert roots[0].real
        assert roots[1].mid.imag > 0 and roots[2].mid.imag > 0
        assert roots[1].mid.real <= roots[2].mid.real
        assert roots[3].mid == mpmath.conj(roots[1].mid)
        assert roots[4].mid == mpmath.conj(roots[2].mid)

    def test_roots_are_separated(self, sextic):
        assert all(root.rad < sextic.separation() / 2 for root in sextic.roots)

    @pytest.mark.parametrize("coefficients", [
        (-1, 0, 2),              # not monic
        (1, 1),                  # degree 1
        (4, 0, -4, 0, 1),        # (x^2 - 2)^2
        (-1, 1, -1, 1),          # (x - 1)(x^2 + 1)
    ])
    def test_rejected(self, coefficients):
        with pytest.raises(FieldError):
            build_field(P(*coefficients))

    def test_at_precision_only_raises(self, plastic):
        assert plastic.at_precision(PrecisionPolicy(64)) is plastic
        finer = plastic.at_precision(PrecisionPolicy(256))
        assert finer.policy.working_bits == 256
        assert finer == plastic

    def test_with_swaps(self, quintic):
        swapped = quintic.with_swaps([1])
        assert swapped.swaps == frozenset({1})
        assert swapped != quintic
        assert swapped.roots[1].mid.imag < 0
        assert swapped.with_swaps([1]) == quintic
        with pytest.raises(FieldError):
            quintic.with_swaps([3])

    def test_conjugate_index(self, quintic):
        assert quintic.conjugate_index(1) == 1
        assert quintic.conjugate_index(2) == 4
        assert quintic.conjugate_index(5) == 3

    def test_to_dict(self, plastic):
        data = plastic.to_dict()
        assert data['signature'] == [1, 1]
        assert data['order'] == 'Z[theta]'
        assert data['irreducibility']['status'] == 'Proven'
        assert len(data['embeddings']) == 3


class TestIrreducibility:
    """Test cases for the irreducibility criteria."""

    def test_cubic_without_rational_root(self):
        status = check_irreducible(P(-1, -1, 0, 1))
        assert status.status == Status.PROVEN
        assert status.method == Method.RATIONAL_ROOT

    def test_eisenstein(self):
        status = check_irreducible(P(-2, 0, 0, 0, 0, 0, 1))
        assert status.status == Status.PROVEN
        assert status.method == Method.EISENSTEIN

    def test_degree_pattern(self):
        status = check_irreducible(P(-1, -1, 0, 0, 1))
        assert status.proven

    def test_product_of_quadratics_not_proven(self):
        # x^4 + 4 = (x^2 - 2x + 2)(x^2 + 2x + 2)
        assert check_irreducible(P(4, 0, 0, 0, 1)).status != Status.PROVEN

    def test_rational_root_is_reducible(self):
        assert check_irreducible(P(-1, 1, -1, 1)).status == Status.REDUCIBLE

    def test_assertion_settles_unknown(self):
        status = check_irreducible(P(4, 0, 0, 0, 1), asserted=True)
        assert status.status == Status.PROVEN
        assert status.method == Method.USER_ASSERTED

    def test_assertion_does_not_replace_criteria(self):
        assert check_irreducible(P(-1, 1, -1, 1), asserted=True).status == Status.REDUCIBLE
        assert check_irreducible(P(-1, -1, 0, 1), asserted=True).method == Method.RATIONAL_ROOT

    def test_asserted_field(self):
        field = build_field(P(4, 0, 0, 0, 1), PrecisionPolicy(128), assert_irreducible=True)
        assert field.irreducibility.to_dict()['method'] == 'user-asserted'
        assert field.signature == (0, 2)


class TestArithmetic:
    """Test cases for exact element arithmetic."""

    def test_defining_relation(self, plastic):
        theta = plastic.generator
        assert theta ** 3 == theta + 1

    def test_inverse(self, plastic):
        theta = plastic.generator
        assert theta * theta.inverse() == 1
        assert theta ** -1 == theta * theta - 1

    def test_zero_has_no_inverse(self, plastic):
        with pytest.raises(ZeroDivisionError):
            plastic.zero.inverse()

    def test_division(self, cube_root_two):
        theta = cube_root_two.generator
        assert (theta * theta) / theta == theta

    def test_mixed_fields_rejected(self, plastic, cube_root_two):
        with pytest.raises(FieldError):
            plastic.generator + cube_root_two.generator

    def test_multiplication_matrix(self, plastic):
        matrix = plastic.generator.multiplication_matrix()
        assert matrix == sympy.Matrix([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
        assert matrix.det() == norm(plastic.generator)

    def test_coefficients_are_padded(self, plastic):
        assert plastic.one.coefficients == (1, 0, 0)
        assert plastic.generator.to_json() == ['0', '1', '0']


class TestEmbeddings:
    """Test cases for embed, norm, trace and minimal polynomials."""

    def test_rationals_are_fixed(self, plastic):
        for i in range(1, 4):
            value = embed(plastic.one, i)
            assert value.mid == 1 and value.rad == 0

    def test_real_embedding(self, plastic):
        value = embed(plastic.generator, 1)
        assert value.real
        assert abs(value.mid.real - PLASTIC_ROOT) < mpmath.mpf('1e-9')

    def test_complex_pair_modulus(self, plastic):
        theta = plastic.generator
        with plastic.policy.context():
            square = embed(theta * theta, 2)
            sigma2 = embed(theta, 2)
            assert square.overlaps(sigma2 * sigma2)
            assert abs(abs(sigma2.mid) ** 2 - 1 / PLASTIC_ROOT) < mpmath.mpf('1e-12')

    def test_embedding_index_range(self, plastic):
        with pytest.raises(IndexError):
            embed(plastic.generator, 4)

    def test_embeddings_multiply(self, cube_root_two):
        x = cube_root_two.element([1, 2, 3])
        y = cube_root_two.element([-1, 0, 1])
        with cube_root_two.policy.context():
            for a, b, c in zip(embeddings(x), embeddings(y), embeddings(x * y)):
                assert c.overlaps(a * b)

    @pytest.mark.parametrize("residue,expected", [
        ([0, 1], 1),
        ([2], 8),
    ])
    def test_norm_plastic(self, plastic, residue, expected):
        assert norm(plastic.element(residue)) == expected

    def test_norm_cube_root_two(self, cube_root_two):
        assert norm(cube_root_two.element([-1, 1])) == 1

    def test_trace(self, plastic):
        assert trace(plastic.generator) == 0
        assert trace(plastic.rational(5)) == 15

    @pytest.mark.parametrize("fixture", ['plastic', 'quartic', 'quintic', 'sextic'])
    def test_numeric_norm_and_trace_match_exact(self, request, fixture):
        field = request.getfixturevalue(fixture)
        rng = np.random.default_rng(0)
        with field.policy.context():
            for _ in range(10):
                x = field.element([int(c) for c in rng.integers(-3, 4, size=field.degree)])
                product, total = Ball.exact(1), Ball.exact(0)
                for value in embeddings(x):
                    product = product * value
                    total = total + value
                for ball, exact in ((product, norm(x)), (total, trace(x))):
                    slack = field.policy.tolerance * (1 + abs(rational_to_mpf(exact)))
                    assert abs(ball.mid - rational_to_mpf(exact)) <= ball.rad + slack

    def test_characteristic_polynomial(self, plastic):
        assert characteristic_polynomial(plastic.generator) == P(-1, -1, 0, 1)

    def test_min_poly_generator(self, plastic):
        assert min_poly(plastic.generator) == P(-1, -1, 0, 1)

    def test_min_poly_subfield(self, sextic):
        theta = sextic.generator
        assert min_poly(theta * theta) == P(-2, 0, 0, 1)
        assert min_poly(theta ** 3) == P(-2, 0, 1)

    def test_min_poly_rational(self, plastic):
        assert min_poly(plastic.one) == P(-1, 1)

    def test_algebraic_integers(self, plastic):
        theta = plastic.generator
        assert is_algebraic_integer(theta)
        assert is_algebraic_integer(theta * theta + theta)
        assert not is_algebraic_integer(plastic.rational(Rational(1, 2)))
