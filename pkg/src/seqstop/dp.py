"""Exact calibration and operating characteristics for proportion tests.

The proportion log-likelihood ratio depends on the data only through
(n, successes), so the trial's reachable states form a triangular lattice
of at most n_max(n_max+1)/2 points.  A forward pass propagates exact state
probabilities, removing mass absorbed at the stopping boundaries, which
yields error rates and average sample numbers without simulation error.
"""

from __future__ import annotations

import math

import numpy as np

from .alternatives import derive_alternative
from .design import DP_METHOD, DesignResult, OCResult
from .spec import Family, Side, SpecError, TestSpec, UsageError, WaldBoundaries


def _lattice_log_lr(spec: TestSpec, alt, n: int) -> np.ndarray:
    """log L_n at successes s = 0..n (vector of length n + 1)."""
    p0 = spec.null_value
    s = np.arange(n + 1, dtype=float)
    w_low, w_high = alt.weights
    out = None
    for p, w in ((alt.p_low, w_low), (alt.p_high, w_high)):
        if w == 0.0:
            continue
        comp = (
            math.log(w)
            + n * (math.log1p(-p) - math.log1p(-p0))
            + s * (math.log(p / (1.0 - p)) - math.log(p0 / (1.0 - p0)))
        )
        out = comp if out is None else np.logaddexp(out, comp)
    return out


def _forward(spec: TestSpec, alt, p: float, log_gamma: float | None):
    """Propagate exact state mass under success probability ``p``.

    Returns (p_reject, p_accept, asn, stop_dist, survivors) where
    ``survivors`` is the list of (log_lr, mass) still active at n_max when
    ``log_gamma`` is None, and empty otherwise.
    """
    n_max = spec.max_n
    bounds = WaldBoundaries.from_spec(spec)
    log_a, log_b = math.log(bounds.A), math.log(bounds.B)
    mass = np.array([1.0])
    p_reject = p_accept = asn = 0.0
    stop_dist = np.zeros(n_max + 1)
    survivors: list[tuple[float, float]] = []
    for n in range(1, n_max + 1):
        new_mass = np.zeros(n + 1)
        new_mass[: n] += mass * (1.0 - p)
        new_mass[1:] += mass * p
        log_lr = _lattice_log_lr(spec, alt, n)
        reject = log_lr >= log_a
        accept = (~reject) & (log_lr <= log_b)
        if n == n_max:
            live = ~(reject | accept)
            if log_gamma is None:
                survivors = [
                    (float(log_lr[s]), float(new_mass[s]))
                    for s in np.nonzero(live)[0]
                    if new_mass[s] > 0.0
                ]
                # without gamma the terminal survivors are counted as accepts
                accept = accept | live
            else:
                reject = reject | (live & (log_lr >= log_gamma))
                accept = ~reject
        stopped = reject | accept
        stop_here = float(new_mass[stopped].sum())
        p_reject += float(new_mass[reject].sum())
        p_accept += float(new_mass[accept].sum())
        asn += n * stop_here
        stop_dist[n] = stop_here
        new_mass[stopped] = 0.0
        mass = new_mass
    return p_reject, p_accept, asn, stop_dist, survivors


def _require_prop(spec: TestSpec):
    if spec.family is not Family.ONE_PROP:
        raise SpecError("exact calibration applies to proportion tests only")
    if spec.side is Side.TWO_SIDED:
        raise UsageError("exact calibration supports one-sided tests only")


def design_exact_prop(spec: TestSpec) -> DesignResult:
    """Calibrate the termination threshold exactly on the success lattice."""
    _require_prop(spec)
    alt = derive_alternative(spec)
    bounds = WaldBoundaries.from_spec(spec)
    r_a, _, _, _, survivors = _forward(spec, alt, spec.null_value, None)

    if r_a > spec.alpha:
        gamma, type1 = float("inf"), r_a
    elif not survivors:
        gamma, type1 = bounds.A, r_a
    else:
        # the threshold lands just above the largest lattice value whose
        # inclusion in the rejection region would push the size past alpha
        survivors.sort(key=lambda sm: sm[0], reverse=True)
        cum, largest_accepted = 0.0, None
        for log_lr, m in survivors:
            if r_a + cum + m <= spec.alpha + 1e-15:
                cum += m
            else:
                largest_accepted = log_lr
                break
        if largest_accepted is None:
            gamma = 0.5 * (math.exp(survivors[-1][0]) + bounds.B)
        else:
            gamma = math.exp(largest_accepted) * (1.0 + 1e-9)
        type1 = r_a + cum

    if math.isfinite(gamma):
        _, _, asn, _, _ = _forward(spec, alt, spec.null_value, math.log(gamma))
    else:
        _, _, asn, _, _ = _forward(spec, alt, spec.null_value, math.inf)
    return DesignResult(
        spec=spec,
        boundaries=bounds,
        alternative=alt,
        gamma=gamma,
        type1_est=type1,
        asn_null=asn,
        n_reps=0,
        seed=None,
        method=DP_METHOD,
    )


def oc_exact_prop(design_result: DesignResult, theta: float) -> OCResult:
    """Exact operating characteristics at success probability ``theta``.

    The stop-time histogram holds probabilities (it sums to 1) and
    ``n_reps`` is 0, marking the result as exact.
    """
    spec = design_result.spec
    _require_prop(spec)
    if not 0.0 < theta < 1.0:
        raise SpecError(f"success probability must lie in (0, 1), got {theta}")
    log_gamma = (
        math.log(design_result.gamma)
        if math.isfinite(design_result.gamma)
        else math.inf
    )
    p_reject, _, asn, stop_dist, _ = _forward(
        spec, design_result.alternative, theta, log_gamma
    )
    return OCResult(
        theta=theta,
        type2_est=1.0 - p_reject,
        asn=asn,
        stop_time_histogram=stop_dist,
        n_reps=0,
        seed=None,
    )
