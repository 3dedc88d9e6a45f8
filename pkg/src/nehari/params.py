"""Problem parameters, critical exponents and the four-case classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace


class ParameterError(ValueError):
    """Raised when a parameter set violates a structural invariant."""


def critical_exponent(N: int, s: float) -> float:
    """Hardy-Sobolev critical exponent ``2(N - s) / (N - 2)``."""
    if int(N) != N or N < 3:
        raise ParameterError(f"dimension must be an integer >= 3, got {N!r}")
    if not 0.0 <= s <= 2.0:
        raise ParameterError(f"weight exponent must lie in [0, 2], got {s!r}")
    return 2.0 * (N - s) / (N - 2)


class CaseTag(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"
    UNSUPPORTED = "Unsupported"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProblemParams:
    """Coefficients and exponents of the three-term problem.

    ``continuation`` admits ``p = 2*(s3) - 1`` (three critical terms) and lets the
    fibering module fall back to an uncertified smallest root outside the four
    cases.
    """

    N: int
    s1: float
    s2: float
    s3: float
    p: float
    lambda1: float
    lambda2: float
    lambda3: float
    continuation: bool = False
    q1: float = field(init=False, repr=False)
    q2: float = field(init=False, repr=False)
    q3: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ParameterError(f"N >= 3 required, got {self.N!r}")
        if not 0.0 < self.s2 < self.s1 < 2.0:
            raise ParameterError(
                f"0 < s2 < s1 < 2 required, got s1={self.s1!r}, s2={self.s2!r}")
        if not 0.0 <= self.s3 < 2.0:
            raise ParameterError(f"0 <= s3 < 2 required, got s3={self.s3!r}")
        if not self.lambda2 > 0.0:
            raise ParameterError(f"lambda2 > 0 required, got lambda2={self.lambda2!r}")
        q1 = critical_exponent(self.N, self.s1)
        q2 = critical_exponent(self.N, self.s2)
        q3 = critical_exponent(self.N, self.s3)
        top = q3 - 1.0
        if self.continuation:
            # the perturbative regime lets the third term be critical as well
            ok = 1.0 < self.p <= top * (1.0 + 1e-14)
            bound = "1 < p <= 2*(s3) - 1"
        else:
            ok = 1.0 < self.p < top
            bound = "1 < p < 2*(s3) - 1"
        if not ok:
            raise ParameterError(f"{bound} required, got p={self.p!r} (2*(s3) - 1 = {top!r})")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)
        object.__setattr__(self, "q3", q3)

    @property
    def exponents(self) -> tuple[float, float, float]:
        """Powers of the three singular integrals: ``2*(s1), 2*(s2), p + 1``."""
        return self.q1, self.q2, self.p + 1.0

    @property
    def weights(self) -> tuple[float, float, float]:
        return self.s1, self.s2, self.s3

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return self.lambda1, self.lambda2, self.lambda3

    def with_(self, **changes) -> "ProblemParams":
        return replace(self, **changes)


def classify_case(params: ProblemParams) -> CaseTag:
    """Which of the four Nehari hypotheses holds.

    Cases 2 and 3 include their boundary ``p = 2*(s1) - 1``; Case 4 excludes
    ``p = 2*(s2) - 1``.
    """
    l1, l3, p = params.lambda1, params.lambda3, params.p
    if l1 > 0 and l3 > 0:
        return CaseTag.CASE1
    if l1 > 0 and l3 < 0 and p <= params.q1 - 1:
        return CaseTag.CASE2
    if l1 < 0 and l3 > 0 and p >= params.q1 - 1:
        return CaseTag.CASE3
    if l1 < 0 and l3 < 0 and p < params.q2 - 1:
        return CaseTag.CASE4
    return CaseTag.UNSUPPORTED


@dataclass(frozen=True)
class DerivedConstants:
    twoStar1: float
    twoStar2: float
    twoStar3: float
    s0: float
    eta: float
    varrho: float


def derived_constants(params: ProblemParams) -> DerivedConstants:
    N, p = params.N, params.p
    q1, q2, q3 = params.q1, params.q2, params.q3
    return DerivedConstants(
        twoStar1=q1,
        twoStar2=q2,
        twoStar3=q3,
        s0=(N + 2) / 2 - p * (N - 2) / 2,
        eta=min(0.5 - 1.0 / (p + 1.0), 0.5 - 1.0 / q1),
        varrho=min(q1 - 2.0, q2 - 2.0, p - 1.0),
    )


def small_p_threshold(params: ProblemParams) -> float:
    """Bound ``(N - 2 s3)/(N - 2)`` below which ``s0 - s3 > 1``.

    A weaker-looking variant ``(N - s3)/(N - 2)`` also circulates; this form is
    the one that actually yields ``s0 - s3 > 1``.
    """
    return (params.N - 2.0 * params.s3) / (params.N - 2.0)
