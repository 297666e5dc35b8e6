"""The sequential stopping-rule state machine.

One-sided trials stop at the Wald boundaries (A rejects, B accepts, ties
stop) and fall back to the termination threshold gamma when the maximum
sample size is exhausted.  Two-sided tests run a right and a left
size-alpha/2 trial on the same data: either crossing A rejects, the null
is accepted only when both sit at or below B, and at the maximum sample
size the larger terminal ratio is compared against the shared gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .likelihood import TrialState, TrialStatus, update
from .spec import Side, TestSpec, UsageError


class DecisionKind(str, Enum):
    CONTINUE_SAMPLING = "continue_sampling"
    REJECT_NULL = "reject_null"
    ACCEPT_NULL = "accept_null"


class DecisionCause(str, Enum):
    CROSSED_A = "crossed_A"
    CROSSED_B = "crossed_B"
    TERMINATION_GAMMA_REJECT = "termination_gamma_reject"
    TERMINATION_GAMMA_ACCEPT = "termination_gamma_accept"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    at_n: int
    cause: DecisionCause | None = None

    @property
    def terminal(self) -> bool:
        return self.kind is not DecisionKind.CONTINUE_SAMPLING


@dataclass
class TwoSidedTrial:
    """Right and left size-alpha/2 sub-trials fed the same observations."""

    right: TrialState
    left: TrialState

    @property
    def n(self) -> int:
        return self.right.n

    @property
    def status(self) -> TrialStatus:
        return self.right.status


def new_trial(design) -> TrialState | TwoSidedTrial:
    """Fresh trial state for a design (a pair of states when two-sided)."""
    spec: TestSpec = design.spec
    if spec.side is Side.TWO_SIDED:
        return TwoSidedTrial(
            right=TrialState(spec=spec.one_sided(Side.RIGHT)),
            left=TrialState(spec=spec.one_sided(Side.LEFT)),
        )
    return TrialState(spec=spec)


def _classify(log_lr: float, n: int, n_max: int, log_a: float, log_b: float,
              log_gamma: float) -> Decision:
    if log_lr >= log_a:
        return Decision(DecisionKind.REJECT_NULL, n, DecisionCause.CROSSED_A)
    if log_lr <= log_b:
        return Decision(DecisionKind.ACCEPT_NULL, n, DecisionCause.CROSSED_B)
    if n >= n_max:
        if log_lr >= log_gamma:
            return Decision(
                DecisionKind.REJECT_NULL, n, DecisionCause.TERMINATION_GAMMA_REJECT
            )
        return Decision(
            DecisionKind.ACCEPT_NULL, n, DecisionCause.TERMINATION_GAMMA_ACCEPT
        )
    return Decision(DecisionKind.CONTINUE_SAMPLING, n)


def _apply(trial: TrialState, decision: Decision) -> Decision:
    if decision.kind is DecisionKind.REJECT_NULL:
        trial.status = TrialStatus.REJECTED_H0
    elif decision.kind is DecisionKind.ACCEPT_NULL:
        trial.status = TrialStatus.ACCEPTED_H0
    return decision


def step(trial: TrialState, obs, design) -> Decision:
    """Score one observation and return the resulting decision."""
    if isinstance(trial, TwoSidedTrial):
        return two_sided_step(trial, obs, design)
    if trial.status is not TrialStatus.ACTIVE:
        raise UsageError("cannot step a trial past its terminal decision")
    before = trial.n
    update(trial, obs, design.alternative)
    if trial.n == before or not trial.evaluable:
        return Decision(DecisionKind.CONTINUE_SAMPLING, trial.n)
    decision = _classify(
        trial.log_lr, trial.n, trial.spec.max_n,
        math.log(design.boundaries.A), math.log(design.boundaries.B),
        math.log(design.gamma),
    )
    return _apply(trial, decision)


def two_sided_step(trial: TwoSidedTrial, obs, design) -> Decision:
    if trial.right.status is not TrialStatus.ACTIVE:
        raise UsageError("cannot step a trial past its terminal decision")
    if trial.right.spec.side is not Side.RIGHT or trial.left.spec.side is not Side.LEFT:
        raise UsageError("two-sided trial must hold a (right, left) pair")
    if trial.right.spec.alpha != trial.left.spec.alpha:
        raise UsageError("two-sided sub-trials must share the same size")
    alt_r, alt_l = design.alternative
    before = trial.right.n
    update(trial.right, obs, alt_r)
    update(trial.left, obs, alt_l)
    if trial.right.n == before or not trial.right.evaluable:
        return Decision(DecisionKind.CONTINUE_SAMPLING, trial.right.n)
    n, n_max = trial.right.n, trial.right.spec.max_n
    log_a = math.log(design.boundaries.A)
    log_b = math.log(design.boundaries.B)
    peak = max(trial.right.log_lr, trial.left.log_lr)
    if peak >= log_a:
        decision = Decision(DecisionKind.REJECT_NULL, n, DecisionCause.CROSSED_A)
    elif trial.right.log_lr <= log_b and trial.left.log_lr <= log_b:
        decision = Decision(DecisionKind.ACCEPT_NULL, n, DecisionCause.CROSSED_B)
    elif n >= n_max:
        if peak >= math.log(design.gamma):
            decision = Decision(
                DecisionKind.REJECT_NULL, n, DecisionCause.TERMINATION_GAMMA_REJECT
            )
        else:
            decision = Decision(
                DecisionKind.ACCEPT_NULL, n, DecisionCause.TERMINATION_GAMMA_ACCEPT
            )
    else:
        decision = Decision(DecisionKind.CONTINUE_SAMPLING, n)
    _apply(trial.right, decision)
    _apply(trial.left, decision)
    return decision


def run_batch(observations, design) -> tuple[Decision, TrialState | TwoSidedTrial]:
    """Fold :func:`step` over a sequence; stops at the first terminal decision.

    An empty or exhausted sequence leaves the trial active and returns a
    continue decision.
    """
    trial = new_trial(design)
    decision = Decision(DecisionKind.CONTINUE_SAMPLING, 0)
    for obs in observations:
        decision = step(trial, obs, design)
        if decision.terminal:
            break
    return decision, trial
