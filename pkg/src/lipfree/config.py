"""Shared tolerance policy and run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction


@dataclass(frozen=True)
class TolerancePolicy:
    """One comparison policy shared by every module.

    ``a`` is treated as equal to ``b`` when ``|a - b| <= max(atol, rtol * max(|a|, |b|))``.
    With ``exact=True`` all comparisons are exact (for Fraction inputs).
    """

    rtol: float = 1e-9
    atol: float = 1e-12
    exact: bool = False

    def __post_init__(self):
        if self.rtol < 0 or self.atol < 0:
            raise ValueError("tolerances must be nonnegative")

    def slack(self, scale=0.0):
        if self.exact:
            return 0
        return max(self.atol, self.rtol * abs(float(scale)))

    def close(self, a, b) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.slack(max(abs(a), abs(b)))

    def leq(self, a, b) -> bool:
        """``a <= b`` up to the policy slack."""
        if self.exact:
            return a <= b
        return a <= b + self.slack(max(abs(a), abs(b)))

    def is_zero(self, a) -> bool:
        if self.exact:
            return a == 0
        return abs(a) <= self.atol


DEFAULT_TOLERANCE = TolerancePolicy()
EXACT = TolerancePolicy(rtol=0.0, atol=0.0, exact=True)

# Two independent LP solvers accumulate round-off; their agreement is
# judged looser than the global policy.
DUALITY_RTOL = 1e-7


@dataclass(frozen=True)
class Config:
    """Seeds, trial counts and tolerances for the verification suites."""

    seed: int = 0
    trials: int = 10_000
    max_points: int = 512
    tol: TolerancePolicy = field(default_factory=TolerancePolicy)
    exact: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_points < 1:
            raise ValueError("max_points must be >= 1")

    @property
    def policy(self) -> TolerancePolicy:
        return EXACT if self.exact else self.tol

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


def as_number(x, exact: bool):
    """Coerce a scalar to Fraction (exact mode) or float."""
    if exact:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)
