"""Test cases for exact polynomials, balls and the precision policy."""

import mpmath
import pytest
from sympy import Rational

from ot_manifolds.errors import EndpointRootError, PolynomialError
from ot_manifolds.exact.balls import Ball, bound_string, real_interval
from ot_manifolds.exact.polynomial import (IntPolynomial, isolate_real_roots, poly_arith,
                                           real_root_count, resultant, sturm_count)
from ot_manifolds.exact.precision import PrecisionPolicy


def P(*coefficients):
    """Polynomial from ascending coefficients."""
    return IntPolynomial.from_coefficients(coefficients)


class TestIntPolynomial:
    """Test cases for Euclidean arithmetic."""

    def test_gcd_common_factor(self):
        assert P(-1, 0, 1).gcd(P(-1, 1)) == P(-1, 1)

    def test_remainder_theorem(self):
        assert P(-1, -1, 0, 1) % P(-2, 1) == P(5)

    def test_coprime_gcd_is_one(self):
        assert P(-2, 0, 0, 0, 0, 0, 1).gcd(P(-2, 0, 0, 1)) == P(1)

    def test_divmod_reconstructs(self):
        p, q = P(3, -1, 4, 1, 5), P(2, 0, 1)
        quotient, remainder = p.divmod(q)
        assert quotient * q + remainder == p
        assert remainder.degree < q.degree

    def test_division_by_zero_rejected(self):
        with pytest.raises(PolynomialError):
            P(1, 1).divmod(P(0))

    def test_poly_arith_dispatch(self):
        assert poly_arith(P(1, 1), P(-1, 1), 'mul') == P(-1, 0, 1)
        with pytest.raises(PolynomialError):
            poly_arith(P(1, 1), P(0), 'gcd')
        with pytest.raises(PolynomialError):
            poly_arith(P(1, 1), P(1), 'pow')

    def test_parsing_rejects_garbage(self):
        with pytest.raises(PolynomialError):
            IntPolynomial.from_coefficients(['one', 1])

    def test_decimal_strings_accepted(self):
        assert P('-1/2', '1').coefficients == (Rational(-1, 2), Rational(1))

    def test_json_round_trip(self):
        p = P(-1, -1, 0, 1)
        assert p.to_json() == ['-1', '-1', '0', '1']
        assert IntPolynomial.from_json(p.to_json()) == p

    def test_squarefree(self):
        assert P(-1, -1, 0, 1).is_squarefree()
        assert not P(4, 0, -4, 0, 1).is_squarefree()
        assert P(4, 0, -4, 0, 1).squarefree_part() == P(-2, 0, 1)


class TestResultant:
    """Test cases for the Sylvester resultant."""

    def test_linear(self):
        assert resultant(P(-3, 1), P(-5, 1)) == 3 - 5

    def test_against_generator(self):
        # Product of the roots of x^3 - x - 1.
        assert resultant(P(-1, -1, 0, 1), P(0, 1)) == 1

    def test_argument_order_sign(self):
        # Swapping the arguments multiplies by (-1)^(3 * 1).
        assert resultant(P(0, 1), P(-1, -1, 0, 1)) == -1

    def test_two_quadratics(self):
        assert resultant(P(-2, 0, 1), P(-3, 0, 1)) == 1

    def test_zero_polynomial_rejected(self):
        with pytest.raises(PolynomialError):
            resultant(P(0), P(1, 1))


class TestSturm:
    """Test cases for real root counting and isolation."""

    @pytest.mark.parametrize("coefficients,expected", [
        ((1, 0, 1), 0),
        ((-1, -1, 0, 1), 1),
        ((-1, -1, 0, 0, 1), 2),
        ((-1, -1, 0, 0, 0, 1), 1),
        ((-2, 0, 0, 0, 0, 0, 1), 2),
    ])
    def test_counts(self, coefficients, expected):
        assert sturm_count(P(*coefficients), -10, 10) == expected
        assert real_root_count(P(*coefficients)) == expected

    def test_endpoint_root(self):
        with pytest.raises(EndpointRootError):
            sturm_count(P(-1, 0, 1), 1, 2)

    def test_empty_interval(self):
        with pytest.raises(PolynomialError):
            sturm_count(P(-1, 0, 1), 2, 2)

    def test_isolation(self):
        intervals = isolate_real_roots(P(-1, -1, 0, 1), Rational(1, 1000))
        assert len(intervals) == 1
        lo, hi = intervals[0]
        assert hi - lo < Rational(1, 1000)
        p = P(-1, -1, 0, 1)
        assert p(lo) < 0 < p(hi)


class TestBall:
    """Test cases for midpoint-radius arithmetic."""

    def test_integer_is_exact(self):
        ball = Ball.exact(3)
        assert ball.rad == 0
        assert ball.real

    def test_third_encloses(self):
        with mpmath.workprec(64):
            third = Ball.exact(Rational(1, 3))
            assert third.rad > 0
            assert (third * 3).overlaps(Ball.exact(1))

    def test_division_by_zero_ball(self):
        with pytest.raises(ZeroDivisionError):
            Ball.exact(1) / Ball.exact(0)

    def test_log_requires_positive(self):
        with pytest.raises(ValueError):
            Ball.exact(-2).log()

    def test_log_of_one(self):
        with mpmath.workprec(128):
            value = Ball.exact(1).log()
            assert abs(value.mid) <= value.rad
            assert value.rad < mpmath.mpf(2) ** -100

    def test_real_parts(self):
        with mpmath.workprec(64):
            z = Ball.exact(mpmath.mpc(2, 3))
            assert z.re.mid == 2
            assert z.im.mid == 3
            assert Ball.exact(5).im.mid == 0

    def test_sign_predicates(self):
        assert Ball.exact(2).is_positive()
        assert Ball.exact(-2).is_negative()
        assert Ball(mpmath.mpc(0), mpmath.mpf('0.1'), real=True).contains_zero()

    def test_interval_serialization(self):
        with mpmath.workprec(128):
            lo, hi = Ball.exact(Rational(1, 3)).to_interval(20)
        assert mpmath.mpf(lo) < mpmath.mpf(1) / 3 < mpmath.mpf(hi)
        assert isinstance(Ball.exact(mpmath.mpc(0, 1)).to_interval(), dict)

    def test_real_interval_contains_midpoint(self):
        lo, hi = real_interval(mpmath.mpf(1), mpmath.mpf(0))
        assert mpmath.mpf(lo) < 1 < mpmath.mpf(hi)

    def test_bound_string(self):
        assert bound_string(mpmath.mpf('0.5')) == '0.5'


class TestPrecisionPolicy:
    """Test cases for tolerance and escalation."""

    def test_default_tolerance(self):
        policy = PrecisionPolicy(128)
        assert policy.tolerance == mpmath.ldexp(1, -64)
        assert policy.rank_band == mpmath.ldexp(1, -32)

    def test_escalations(self):
        bits = [p.working_bits for p in PrecisionPolicy(128).escalations()]
        assert bits == [128, 256, 512]

    def test_minimum_bits(self):
        with pytest.raises(ValueError):
            PrecisionPolicy(8)

    def test_to_dict(self):
        assert PrecisionPolicy(256).to_dict() == {'working_bits': 256, 'tolerance_bits': 128}
