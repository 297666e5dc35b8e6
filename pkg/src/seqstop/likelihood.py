"""Sequential likelihood-ratio computation from streaming observations.

All ratios are computed in log space from constant-size sufficient
statistics, so a trial of any length carries O(1) state besides its
recorded trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .alternatives import DataDependentTAlt, MixtureAlt, PointAlt
from .spec import (
    DegenerateSampleError,
    Family,
    SpecError,
    TestSpec,
    UsageError,
)


class TrialStatus(str, Enum):
    ACTIVE = "active"
    REJECTED_H0 = "rejected_H0"
    ACCEPTED_H0 = "accepted_H0"


@dataclass
class TrialState:
    """Sufficient statistics and log-LR trajectory of one running trial.

    Two-sample trials advance one *pair* per step; a lone value passed to
    :func:`update` is buffered until its partner arrives and is not scored.
    """

    spec: TestSpec
    n: int = 0
    sum_x: float = 0.0
    sum_x2: float = 0.0
    successes: int = 0
    sum_x_2nd: float = 0.0      # group-2 running sum (two-sample)
    sum_x2_2nd: float = 0.0     # group-2 running sum of squares
    pending: float | None = None
    log_lr: float | None = None
    trajectory: list[tuple[int, float]] = field(default_factory=list)
    status: TrialStatus = TrialStatus.ACTIVE

    @property
    def n1(self) -> int:
        return self.n

    @property
    def n2(self) -> int:
        return self.n

    @property
    def evaluable(self) -> bool:
        """True once the log-LR is defined (t families need n >= 2)."""
        min_n = 2 if self.spec.family in (Family.ONE_T, Family.TWO_T) else 1
        return self.n >= min_n


def _t_log_lr(t0: float, shift: float, nu: float, scale: float, expo: float) -> float:
    """log of [(1 + scale*t0^2) / (1 + scale*t1^2)]^expo with t1 = t0 - shift."""
    t1 = t0 - shift
    return expo * (math.log1p(scale * t0 * t0) - math.log1p(scale * t1 * t1))


def log_lr_one_z(n: int, sum_x: float, spec: TestSpec, alt: PointAlt) -> float:
    t0, t1, s2 = spec.null_value, alt.theta1, spec.sigma0 ** 2
    return (t1 - t0) / s2 * sum_x - n * (t1 * t1 - t0 * t0) / (2.0 * s2)


def log_lr_one_t(
    n: int, sum_x: float, sum_x2: float, spec: TestSpec, alt: DataDependentTAlt
) -> float:
    if n < 2:
        raise UsageError("t likelihood ratio needs n >= 2")
    mean = sum_x / n
    var = max((sum_x2 - n * mean * mean) / (n - 1), 0.0)
    if var == 0.0:
        # s_n = 0 collapses the data-dependent alternative onto the null
        if mean == spec.null_value:
            raise DegenerateSampleError(
                "all observations equal the null value; likelihood ratio undefined"
            )
        return 0.0
    s = math.sqrt(var)
    t0 = (mean - spec.null_value) / s
    return _t_log_lr(t0, alt.slope, n - 1, n / (n - 1.0), n / 2.0)


def log_lr_one_prop(n: int, successes: int, spec: TestSpec, alt: MixtureAlt) -> float:
    p0 = spec.null_value

    def comp(p: float) -> float:
        return n * (math.log1p(-p) - math.log1p(-p0)) + successes * (
            math.log(p / (1.0 - p)) - math.log(p0 / (1.0 - p0))
        )

    w_low, w_high = alt.weights
    a, b = comp(alt.p_low), comp(alt.p_high)
    if w_low == 0.0:
        return b
    if w_high == 0.0:
        return a
    m = max(a, b)
    return m + math.log(w_low * math.exp(a - m) + w_high * math.exp(b - m))


def log_lr_two_z(n: int, sum_diff: float, spec: TestSpec, alt: PointAlt) -> float:
    var_d = 2.0 * spec.sigma0 ** 2
    return alt.theta1 / var_d * sum_diff - n * alt.theta1 ** 2 / (2.0 * var_d)


def log_lr_two_t(
    n: int,
    sum1: float,
    sumsq1: float,
    sum2: float,
    sumsq2: float,
    spec: TestSpec,
    alt: DataDependentTAlt,
) -> float:
    if n < 2:
        raise UsageError("t likelihood ratio needs n >= 2 per group")
    m1, m2 = sum1 / n, sum2 / n
    ss1 = max(sumsq1 - n * m1 * m1, 0.0)
    ss2 = max(sumsq2 - n * m2 * m2, 0.0)
    nu = 2 * n - 2
    pooled_var = (ss1 + ss2) / nu
    diff = m2 - m1
    if pooled_var == 0.0:
        if diff == 0.0:
            raise DegenerateSampleError(
                "zero pooled spread with zero mean difference; ratio undefined"
            )
        return 0.0
    se = math.sqrt(pooled_var * 2.0 / n)
    t0 = diff / se
    # alternative difference = slope * pooled_s, so its t-shift is
    # slope / sqrt(2/n)
    shift = alt.slope / math.sqrt(2.0 / n)
    return _t_log_lr(t0, shift, nu, 1.0 / nu, n)


def compute_log_lr(state: TrialState, alt) -> float:
    """Recompute the current log-LR from the state's sufficient statistics."""
    spec = state.spec
    if spec.family is Family.ONE_Z:
        return log_lr_one_z(state.n, state.sum_x, spec, alt)
    if spec.family is Family.ONE_T:
        return log_lr_one_t(state.n, state.sum_x, state.sum_x2, spec, alt)
    if spec.family is Family.ONE_PROP:
        return log_lr_one_prop(state.n, state.successes, spec, alt)
    if spec.family is Family.TWO_Z:
        return log_lr_two_z(state.n, state.sum_x_2nd - state.sum_x, spec, alt)
    if spec.family is Family.TWO_T:
        return log_lr_two_t(
            state.n, state.sum_x, state.sum_x2,
            state.sum_x_2nd, state.sum_x2_2nd, spec, alt,
        )
    raise SpecError(f"unsupported family {spec.family}")


def update(state: TrialState, obs, alt) -> TrialState:
    """Advance a trial by one observation (or pair) and refresh its log-LR.

    Returns the mutated state.  For two-sample specs ``obs`` may be a
    (group1, group2) pair or a lone value, which is buffered.
    """
    spec = state.spec
    if state.status is not TrialStatus.ACTIVE:
        raise UsageError("trial already reached a terminal decision")
    if state.n >= spec.max_n:
        raise UsageError(f"trial already holds the maximum of {spec.max_n} steps")

    if spec.is_two_sample:
        if isinstance(obs, (tuple, list)):
            if len(obs) != 2:
                raise SpecError("two-sample observations must be pairs")
            x1, x2 = float(obs[0]), float(obs[1])
        else:
            if state.pending is None:
                state.pending = float(obs)
                return state
            x1, state.pending = state.pending, None
            x2 = float(obs)
        state.n += 1
        state.sum_x += x1
        state.sum_x2 += x1 * x1
        state.sum_x_2nd += x2
        state.sum_x2_2nd += x2 * x2
    elif spec.family is Family.ONE_PROP:
        if obs not in (0, 1, 0.0, 1.0, False, True):
            raise SpecError(f"proportion tests take binary observations, got {obs!r}")
        state.n += 1
        state.successes += int(obs)
    else:
        x = float(obs)
        state.n += 1
        state.sum_x += x
        state.sum_x2 += x * x

    if state.evaluable:
        state.log_lr = compute_log_lr(state, alt)
        state.trajectory.append((state.n, state.log_lr))
    return state
