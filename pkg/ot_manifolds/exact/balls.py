"""Midpoint-radius balls over mpmath numbers.

A Ball stands for every complex number within ``rad`` of ``mid``. Each
operation adds the propagated radius of its inputs plus one rounding unit of
the result at the current mpmath precision, so enclosures stay valid as long
as all arithmetic happens inside a single ``PrecisionPolicy.context()``.
Balls flagged ``real`` hold values known to be real; their midpoints carry a
zero imaginary part exactly.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

import mpmath
from mpmath import mpc, mpf
import sympy

Number = Union[int, Fraction, sympy.Rational, mpf, mpc, "Ball"]


def _ulp(value) -> mpf:
    return abs(value) * mpmath.ldexp(mpf(1), 1 - mpmath.mp.prec)


def rational_to_mpf(value) -> mpf:
    """Round an exact rational to the current precision."""
    if isinstance(value, int):
        return mpf(value)
    value = sympy.Rational(value)
    return mpf(int(value.p)) / int(value.q)


@dataclass(frozen=True)
class Ball:
    mid: mpc
    rad: mpf
    real: bool = False

    def __post_init__(self):
        mid = mpc(self.mid)
        if self.real:
            mid = mpc(mid.real, 0)
        object.__setattr__(self, 'mid', mid)
        object.__setattr__(self, 'rad', abs(mpf(self.rad)))

    @classmethod
    def exact(cls, value: Number) -> "Ball":
        """Enclose an exact rational, or a complex float taken as exact."""
        if isinstance(value, Ball):
            return value
        if isinstance(value, (int, Fraction, sympy.Rational)):
            value = sympy.Rational(value)
            mid = rational_to_mpf(value)
            exact = value.q == 1 and int(mid) == int(value)
            rad = mpf(0) if exact else _ulp(mid)
            return cls(mpc(mid), rad, real=True)
        if isinstance(value, mpf):
            return cls(mpc(value), mpf(0), real=True)
        return cls(mpc(value), mpf(0), real=False)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Number) -> "Ball":
        other = Ball.exact(other)
        mid = self.mid + other.mid
        return Ball(mid, self.rad + other.rad + _ulp(mid), self.real and other.real)

    __radd__ = __add__

    def __neg__(self) -> "Ball":
        return Ball(-self.mid, self.rad, self.real)

    def __sub__(self, other: Number) -> "Ball":
        return self + (-Ball.exact(other))

    def __rsub__(self, other: Number) -> "Ball":
        return Ball.exact(other) - self

    def __mul__(self, other: Number) -> "Ball":
        other = Ball.exact(other)
        mid = self.mid * other.mid
        rad = (abs(self.mid) * other.rad + abs(other.mid) * self.rad
               + self.rad * other.rad + _ulp(mid))
        return Ball(mid, rad, self.real and other.real)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Ball":
        other = Ball.exact(other)
        denom = abs(other.mid)
        if denom <= other.rad:
            raise ZeroDivisionError("divisor ball contains zero")
        mid = self.mid / other.mid
        rad = ((abs(self.mid) * other.rad + denom * self.rad)
               / (denom * (denom - other.rad)) + _ulp(mid))
        return Ball(mid, rad, self.real and other.real)

    def __rtruediv__(self, other: Number) -> "Ball":
        return Ball.exact(other) / self

    def __pow__(self, exponent: int) -> "Ball":
        if exponent < 0:
            return Ball.exact(1) / (self ** -exponent)
        result = Ball.exact(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "Ball":
        return Ball(mpmath.conj(self.mid), self.rad, self.real)

    def abs(self) -> "Ball":
        mid = abs(self.mid)
        return Ball(mpc(mid), self.rad + _ulp(mid), real=True)

    def log(self) -> "Ball":
        """Natural logarithm of a certified positive real ball."""
        if not self.is_positive():
            raise ValueError("log of a ball not certified positive")
        x = self.mid.real
        mid = mpmath.log(x)
        return Ball(mpc(mid), self.rad / (x - self.rad) + _ulp(mid) + mpmath.ldexp(mpf(1), -mpmath.mp.prec),
                    real=True)

    @property
    def re(self) -> "Ball":
        return Ball(mpc(self.mid.real), self.rad, real=True)

    @property
    def im(self) -> "Ball":
        if self.real:
            return Ball.exact(0)
        return Ball(mpc(self.mid.imag), self.rad, real=True)

    # -- predicates ---------------------------------------------------------

    def contains_zero(self) -> bool:
        return abs(self.mid) <= self.rad

    def is_positive(self) -> bool:
        """Certainly a positive real number."""
        return self.real and self.mid.real - self.rad > 0

    def is_negative(self) -> bool:
        return self.real and self.mid.real + self.rad < 0

    def upper(self) -> mpf:
        """Upper bound of the real part (of the modulus for complex balls)."""
        if self.real:
            return self.mid.real + self.rad
        return abs(self.mid) + self.rad

    def lower(self) -> mpf:
        if self.real:
            return self.mid.real - self.rad
        return max(abs(self.mid) - self.rad, mpf(0))

    def distance(self, other: Number) -> mpf:
        """Distance between midpoints."""
        return abs(self.mid - Ball.exact(other).mid)

    def overlaps(self, other: "Ball") -> bool:
        return self.distance(other) <= self.rad + other.rad

    # -- serialization ------------------------------------------------------

    def to_interval(self, digits: int = 30) -> Union[List[str], dict]:
        """Decimal-string interval, widened by one unit in the last printed digit."""
        if self.real:
            return real_interval(self.mid.real, self.rad, digits)
        return {
            're': real_interval(self.mid.real, self.rad, digits),
            'im': real_interval(self.mid.imag, self.rad, digits),
        }

    def __repr__(self) -> str:
        return f"Ball({mpmath.nstr(self.mid, 12)} +/- {mpmath.nstr(self.rad, 3)})"


def real_interval(mid: mpf, rad: mpf, digits: int = 30) -> List[str]:
    with mpmath.workprec(max(mpmath.mp.prec, 4 * digits)):
        slack = (abs(mid) + 1) * mpf(10) ** (-digits + 1)
        lo = mid - rad - slack
        hi = mid + rad + slack
        return [mpmath.nstr(lo, digits), mpmath.nstr(hi, digits)]


def bound_string(value: mpf, digits: int = 12) -> str:
    """Render a nonnegative error bound as a short decimal string."""
    return mpmath.nstr(mpf(value), digits)


def max_deviation(pairs) -> mpf:
    """Largest midpoint distance over an iterable of (Ball, Ball) pairs."""
    worst = mpf(0)
    for left, right in pairs:
        worst = max(worst, left.distance(right))
    return worst
