"""Test specifications, error classes, and stopping boundaries."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum


class SpecError(ValueError):
    """Invalid test specification."""


class InfeasibleDesignError(RuntimeError):
    """No calibrated design exists for the requested error probabilities."""


class DegenerateSampleError(RuntimeError):
    """Sample statistics are degenerate (zero spread at the null mean)."""


class UsageError(RuntimeError):
    """An operation was applied in an invalid order (e.g. after stopping)."""


class Family(str, Enum):
    ONE_Z = "one_z"
    ONE_T = "one_t"
    ONE_PROP = "one_prop"
    TWO_Z = "two_z"
    TWO_T = "two_t"


class Side(str, Enum):
    RIGHT = "right"
    LEFT = "left"
    TWO_SIDED = "two_sided"


TWO_SAMPLE = (Family.TWO_Z, Family.TWO_T)
T_FAMILIES = (Family.ONE_T, Family.TWO_T)
Z_FAMILIES = (Family.ONE_Z, Family.TWO_Z)


@dataclass(frozen=True)
class TestSpec:
    """Design parameters of a sequential test.

    For two-sample families ``null_value`` is the mean difference (fixed
    at 0) and accrual is paired: ``n1_max`` must equal ``n2_max``.
    """

    __test__ = False  # not a test case despite the class name

    family: Family
    side: Side = Side.RIGHT
    null_value: float = 0.0
    alpha: float = 0.005
    beta: float = 0.2
    n_max: int | None = None
    n1_max: int | None = None
    n2_max: int | None = None
    sigma0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "side", Side(self.side))
        if not (0.0 < self.alpha < 1.0):
            raise SpecError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (0.0 < self.beta < 1.0):
            raise SpecError(f"beta must lie in (0, 1), got {self.beta}")
        if self.alpha + self.beta >= 1.0:
            raise SpecError(
                f"alpha + beta must be < 1 so that A > 1 > B, got "
                f"{self.alpha} + {self.beta}"
            )
        if self.family in TWO_SAMPLE:
            if self.n1_max is None or self.n2_max is None:
                raise SpecError("two-sample tests require n1_max and n2_max")
            if self.n1_max != self.n2_max:
                raise SpecError("paired accrual requires n1_max == n2_max")
            if min(self.n1_max, self.n2_max) < 1:
                raise SpecError("n1_max and n2_max must be positive")
            if self.null_value != 0.0:
                raise SpecError("two-sample null difference is fixed at 0")
        else:
            if self.n_max is None or self.n_max < 1:
                raise SpecError("n_max must be a positive integer")
        if self.family in T_FAMILIES:
            if self.max_n < 2:
                raise SpecError("t tests need n_max >= 2 to estimate a variance")
        if self.family in Z_FAMILIES:
            if self.sigma0 is None or self.sigma0 <= 0:
                raise SpecError("z tests require a known sigma0 > 0")
        if self.family is Family.ONE_PROP:
            if not (0.0 < self.null_value < 1.0):
                raise SpecError("one_prop null value must lie strictly in (0, 1)")

    @property
    def is_two_sample(self) -> bool:
        return self.family in TWO_SAMPLE

    @property
    def max_n(self) -> int:
        """Maximum number of accrual steps (per group for two-sample)."""
        return self.n1_max if self.is_two_sample else self.n_max

    def one_sided(self, side: Side) -> "TestSpec":
        """The size-alpha/2 one-sided component of a two-sided test."""
        if self.side is not Side.TWO_SIDED:
            raise UsageError("one_sided() applies to two-sided specs only")
        return replace(self, side=side, alpha=self.alpha / 2.0)


@dataclass(frozen=True)
class WaldBoundaries:
    """Sequential stopping boundaries A = (1-beta)/alpha, B = beta/(1-alpha)."""

    A: float
    B: float

    def __post_init__(self):
        if not (self.B < 1.0 < self.A):
            raise SpecError(f"need B < 1 < A, got A={self.A}, B={self.B}")

    @classmethod
    def from_error_probs(cls, alpha: float, beta: float) -> "WaldBoundaries":
        return cls(A=(1.0 - beta) / alpha, B=beta / (1.0 - alpha))

    @classmethod
    def from_spec(cls, spec: TestSpec) -> "WaldBoundaries":
        alpha = spec.alpha / 2.0 if spec.side is Side.TWO_SIDED else spec.alpha
        return cls.from_error_probs(alpha, spec.beta)
