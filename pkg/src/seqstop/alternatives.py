"""Derivation of the alternative hypotheses implied by the design parameters.

For z and t families the alternative is the parameter value sitting on the
rejection boundary of the size-alpha fixed design with the maximum sample
size; for a binomial proportion it is a two-point mixture matched to the
randomized fixed-design test.  Each alternative carries the Bayes-factor
evidence threshold delta that corresponds to the classical size alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .dists import binom_tail, binom_logpmf, std_normal_quantile, t_quantile
from .spec import Family, InfeasibleDesignError, Side, SpecError, TestSpec

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PointAlt:
    """A point alternative with its evidence threshold."""

    theta1: float
    delta: float


@dataclass(frozen=True)
class DataDependentTAlt:
    """Data-dependent t alternative: null_value + slope * s_n.

    ``slope`` already carries the side's sign; ``s_n`` is the current
    sample standard deviation (pooled for two-sample tests).
    """

    null_value: float
    slope: float
    delta: float
    s_n: float | None = None

    def value_at(self, s_n: float) -> float:
        if s_n < 0:
            raise ValueError("sample standard deviation must be >= 0")
        return self.null_value + self.slope * s_n

    def at(self, s_n: float) -> "DataDependentTAlt":
        return replace(self, s_n=s_n)

    @property
    def theta1(self) -> float:
        if self.s_n is None:
            raise ValueError("alternative not evaluated at a sample SD yet")
        return self.value_at(self.s_n)


@dataclass(frozen=True)
class MixtureAlt:
    """Two-point mixture alternative for a binomial proportion.

    ``psi`` is the weight attached to the component solving the smaller
    cutoff (c0 - 1); for right-sided tests that is ``p_low``, for
    left-sided tests ``p_high``.
    """

    p_low: float
    p_high: float
    psi: float
    delta_low: float
    delta_high: float
    side: Side = Side.RIGHT

    @property
    def weights(self) -> tuple[float, float]:
        """Mixture weights on (p_low, p_high)."""
        if self.side is Side.LEFT:
            return (1.0 - self.psi, self.psi)
        return (self.psi, 1.0 - self.psi)


def _side_sign(side: Side) -> float:
    if side is Side.RIGHT:
        return 1.0
    if side is Side.LEFT:
        return -1.0
    raise SpecError("two-sided specs must be split into one-sided components")


def umpbt_one_z(spec: TestSpec) -> PointAlt:
    """Boundary alternative theta0 +/- z_alpha * sigma / sqrt(N)."""
    if spec.family is not Family.ONE_Z:
        raise SpecError(f"expected one_z spec, got {spec.family}")
    z = std_normal_quantile(1.0 - spec.alpha)
    theta1 = spec.null_value + _side_sign(spec.side) * z * spec.sigma0 / math.sqrt(spec.n_max)
    return PointAlt(theta1=theta1, delta=math.exp(0.5 * z * z))


def umpbt_one_t(spec: TestSpec, s_n: float | None = None) -> DataDependentTAlt:
    """Data-dependent alternative theta0 +/- t_{alpha;N-1} * s_n / sqrt(N)."""
    if spec.family is not Family.ONE_T:
        raise SpecError(f"expected one_t spec, got {spec.family}")
    nu = spec.n_max - 1
    tq = t_quantile(1.0 - spec.alpha, nu)
    delta = (tq * tq / nu + 1.0) ** (spec.n_max / 2.0)
    alt = DataDependentTAlt(
        null_value=spec.null_value,
        slope=_side_sign(spec.side) * tq / math.sqrt(spec.n_max),
        delta=delta,
    )
    return alt if s_n is None else alt.at(s_n)


def umpbt_two_z(spec: TestSpec) -> PointAlt:
    """Difference alternative +/- z_alpha * sigma * sqrt(1/n1 + 1/n2)."""
    if spec.family is not Family.TWO_Z:
        raise SpecError(f"expected two_z spec, got {spec.family}")
    z = std_normal_quantile(1.0 - spec.alpha)
    scale = spec.sigma0 * math.sqrt(1.0 / spec.n1_max + 1.0 / spec.n2_max)
    return PointAlt(
        theta1=_side_sign(spec.side) * z * scale,
        delta=math.exp(0.5 * z * z),
    )


def two_t_slope(n1: int, n2: int, alpha: float) -> tuple[float, float]:
    """(slope, delta) of the data-dependent two-sample t alternative.

    The evidence threshold is matched with exponent (n1+n2)/2 while the
    per-step scale uses an effective sample of n1+n2-1 (one location
    parameter is integrated out); this is the convention the reference
    outputs pin down.
    """
    nu = n1 + n2 - 2
    tq = t_quantile(1.0 - alpha, nu)
    delta = (tq * tq / nu + 1.0) ** ((n1 + n2) / 2.0)
    dstar = delta ** (2.0 / (n1 + n2 - 1)) - 1.0
    slope = math.sqrt(nu * dstar * (1.0 / n1 + 1.0 / n2))
    return slope, delta


def umpbt_two_t(spec: TestSpec, pooled_s: float | None = None) -> DataDependentTAlt:
    """Data-dependent difference alternative proportional to the pooled SD."""
    if spec.family is not Family.TWO_T:
        raise SpecError(f"expected two_t spec, got {spec.family}")
    slope, delta = two_t_slope(spec.n1_max, spec.n2_max, spec.alpha)
    alt = DataDependentTAlt(
        null_value=0.0,
        slope=_side_sign(spec.side) * slope,
        delta=delta,
    )
    return alt if pooled_s is None else alt.at(pooled_s)


# ---------------------------------------------------------------------------
# Binomial proportion: randomized-test cutoff and two-point mixture
# ---------------------------------------------------------------------------

def prop_cutoff(p0: float, n: int, alpha: float) -> tuple[int, float]:
    """Randomized fixed-design test (c0, psi) for a right-sided proportion test.

    c0 is the smallest integer cutoff with P(S > c0 | p0) <= alpha, and psi
    the rejection probability at S = c0 that makes the size exactly alpha.
    """
    c0 = None
    for c in range(-1, n + 1):
        if binom_tail(c, n, p0) <= alpha:
            c0 = c
            break
    if c0 is None or c0 >= n:
        raise InfeasibleDesignError(
            f"no rejection region with positive tail mass for "
            f"p0={p0}, N={n}, alpha={alpha}"
        )
    psi = (alpha - binom_tail(c0, n, p0)) / math.exp(float(binom_logpmf(c0, n, p0)))
    return c0, psi


def _h(p: float, log_delta: float, n: int, p0: float) -> float:
    num = log_delta - n * (math.log1p(-p) - math.log1p(-p0))
    den = math.log(p / (1.0 - p)) - math.log(p0 / (1.0 - p0))
    return num / den


def _argmin_h(log_delta: float, n: int, p0: float) -> tuple[float, float]:
    """Golden-section minimizer of h over p in (p0 + eps, 1 - eps)."""
    lo, hi = p0 + 1e-9, 1.0 - 1e-9
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = _h(c, log_delta, n, p0), _h(d, log_delta, n, p0)
    while b - a > 1e-13:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _h(c, log_delta, n, p0)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _h(d, log_delta, n, p0)
    p = 0.5 * (a + b)
    return p, _h(p, log_delta, n, p0)


def _solve_delta(target: float, n: int, p0: float) -> tuple[float, float]:
    """delta (and its argmin p) with min_p h(p, delta) = target.

    The minimized h is strictly increasing in delta, so an outer bisection
    on log(delta) converges monotonically.
    """
    lo, hi = 0.0, math.log(2.0)
    while _argmin_h(hi, n, p0)[1] < target:
        hi *= 2.0
    while _argmin_h(lo, n, p0)[1] > target:
        lo = lo - max(1.0, abs(lo))
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _argmin_h(mid, n, p0)[1] < target:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    p, _ = _argmin_h(mid, n, p0)
    return math.exp(mid), p


def _flip_for_left(spec: TestSpec) -> TestSpec:
    return replace(spec, side=Side.RIGHT, null_value=1.0 - spec.null_value)


def umpbt_one_prop(spec: TestSpec) -> MixtureAlt:
    """Two-point mixture alternative matched to the randomized test."""
    if spec.family is not Family.ONE_PROP:
        raise SpecError(f"expected one_prop spec, got {spec.family}")
    if spec.side is Side.LEFT:
        m = umpbt_one_prop(_flip_for_left(spec))
        return MixtureAlt(
            p_low=1.0 - m.p_high,
            p_high=1.0 - m.p_low,
            psi=m.psi,
            delta_low=m.delta_low,
            delta_high=m.delta_high,
            side=Side.LEFT,
        )
    c0, psi = prop_cutoff(spec.null_value, spec.n_max, spec.alpha)
    delta_low, p_low = _solve_delta(c0 - 1.0, spec.n_max, spec.null_value)
    delta_high, p_high = _solve_delta(float(c0), spec.n_max, spec.null_value)
    return MixtureAlt(
        p_low=p_low,
        p_high=p_high,
        psi=psi,
        delta_low=delta_low,
        delta_high=delta_high,
        side=Side.RIGHT,
    )


def point_umpbt_one_prop(spec: TestSpec) -> PointAlt:
    """The single-point proportion alternative (the mixture's c0 solution)."""
    if spec.family is not Family.ONE_PROP:
        raise SpecError(f"expected one_prop spec, got {spec.family}")
    if spec.side is Side.LEFT:
        p = point_umpbt_one_prop(_flip_for_left(spec))
        return PointAlt(theta1=1.0 - p.theta1, delta=p.delta)
    c0, _ = prop_cutoff(spec.null_value, spec.n_max, spec.alpha)
    delta, p = _solve_delta(float(c0), spec.n_max, spec.null_value)
    return PointAlt(theta1=p, delta=delta)


def derive_alternative(spec: TestSpec):
    """The alternative used by the sequential test for a one-sided spec."""
    if spec.family is Family.ONE_Z:
        return umpbt_one_z(spec)
    if spec.family is Family.ONE_T:
        return umpbt_one_t(spec)
    if spec.family is Family.ONE_PROP:
        return umpbt_one_prop(spec)
    if spec.family is Family.TWO_Z:
        return umpbt_two_z(spec)
    if spec.family is Family.TWO_T:
        return umpbt_two_t(spec)
    raise SpecError(f"unsupported family {spec.family}")
