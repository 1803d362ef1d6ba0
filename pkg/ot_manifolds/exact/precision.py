"""Working precision and tolerance policy."""

from dataclasses import dataclass
from typing import Iterator, Optional

import mpmath

# Escalation never goes beyond this multiple of the starting precision.
MAX_ESCALATION = 4


@dataclass(frozen=True)
class PrecisionPolicy:
    """Binary working precision plus the tolerance derived from it.

    The tolerance is 2^-tolerance_bits; by default tolerance_bits is half of
    the working precision.
    """

    working_bits: int = 128
    tolerance_bits: Optional[int] = None

    def __post_init__(self):
        if self.working_bits < 16:
            raise ValueError(f"working_bits must be at least 16, got {self.working_bits}")
        if self.tolerance_bits is not None and self.tolerance_bits < 1:
            raise ValueError(f"tolerance_bits must be positive, got {self.tolerance_bits}")

    @property
    def effective_tolerance_bits(self) -> int:
        if self.tolerance_bits is None:
            return self.working_bits // 2
        return self.tolerance_bits

    @property
    def tolerance(self) -> mpmath.mpf:
        with mpmath.workprec(self.working_bits):
            return mpmath.ldexp(mpmath.mpf(1), -self.effective_tolerance_bits)

    @property
    def rank_band(self) -> mpmath.mpf:
        """Upper edge of the band in which a singular value is undecided."""
        with mpmath.workprec(self.working_bits):
            return mpmath.sqrt(self.tolerance)

    def doubled(self) -> "PrecisionPolicy":
        tol = None if self.tolerance_bits is None else self.tolerance_bits * 2
        return PrecisionPolicy(self.working_bits * 2, tol)

    def escalations(self) -> Iterator["PrecisionPolicy"]:
        """Yield this policy, then doubled ones up to MAX_ESCALATION times the bits."""
        policy = self
        while policy.working_bits <= self.working_bits * MAX_ESCALATION:
            yield policy
            policy = policy.doubled()

    def context(self):
        return mpmath.workprec(self.working_bits)

    def to_dict(self) -> dict:
        return {
            'working_bits': self.working_bits,
            'tolerance_bits': self.effective_tolerance_bits,
        }
