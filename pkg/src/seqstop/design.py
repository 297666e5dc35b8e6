"""Design calibration and operating characteristics via Monte Carlo.

The termination threshold gamma is the smallest value that keeps the
rejection probability under the null at (continuous families) or below
(discrete families) the nominal size.  Replications run in fixed-size
blocks, each owning its own counter-based random stream, so results are
bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .alternatives import derive_alternative, prop_cutoff, point_umpbt_one_prop
from .dists import RngSeed, binom_tail, make_generator, std_normal_quantile, t_quantile
from .spec import (
    Family,
    InfeasibleDesignError,
    Side,
    SpecError,
    TestSpec,
    WaldBoundaries,
)

CHUNK = 20_000

MC_METHOD = "monte_carlo"
DP_METHOD = "exact_dp"
SUPPLIED_METHOD = "supplied"


@dataclass(frozen=True)
class DesignResult:
    """A calibrated sequential design and its null-hypothesis estimates."""

    spec: TestSpec
    boundaries: WaldBoundaries
    alternative: object
    gamma: float
    type1_est: float
    asn_null: float
    n_reps: int
    seed: RngSeed | None
    method: str

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.gamma)

    @classmethod
    def from_gamma(cls, spec: TestSpec, gamma: float) -> "DesignResult":
        """Wrap an externally supplied termination threshold."""
        return cls(
            spec=spec,
            boundaries=WaldBoundaries.from_spec(spec),
            alternative=_alternative_for(spec),
            gamma=gamma,
            type1_est=float("nan"),
            asn_null=float("nan"),
            n_reps=0,
            seed=None,
            method=SUPPLIED_METHOD,
        )


@dataclass(frozen=True)
class OCResult:
    """Error rate, average sample number, and stop-time distribution."""

    theta: float
    type2_est: float
    asn: float
    stop_time_histogram: np.ndarray
    n_reps: int
    seed: RngSeed | None

    @property
    def power(self) -> float:
        return 1.0 - self.type2_est


def _alternative_for(spec: TestSpec):
    if spec.side is Side.TWO_SIDED:
        return (
            derive_alternative(spec.one_sided(Side.RIGHT)),
            derive_alternative(spec.one_sided(Side.LEFT)),
        )
    return derive_alternative(spec)


def _as_seed(seed) -> RngSeed:
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed))


# ---------------------------------------------------------------------------
# Vectorized trajectory simulation
# ---------------------------------------------------------------------------

def _gen_data(spec: TestSpec, theta: float, reps: int, gen: np.random.Generator):
    n = spec.max_n
    fam = spec.family
    if fam is Family.ONE_Z:
        return gen.normal(theta, spec.sigma0, size=(reps, n))
    if fam is Family.ONE_T:
        # theta is a mean at unit SD (standardized-effect convention)
        return gen.normal(theta, 1.0, size=(reps, n))
    if fam is Family.ONE_PROP:
        return gen.random(size=(reps, n)) < theta
    if fam is Family.TWO_Z:
        # paired accrual: only the per-pair difference matters
        return gen.normal(theta, math.sqrt(2.0) * spec.sigma0, size=(reps, n))
    if fam is Family.TWO_T:
        x1 = gen.normal(0.0, 1.0, size=(reps, n))
        x2 = gen.normal(theta, 1.0, size=(reps, n))
        return x1, x2
    raise SpecError(f"unsupported family {fam}")


def _t_matrix(t0, shift, nu, scale, expo):
    t1 = t0 - shift
    return expo * (np.log1p(scale * t0 * t0) - np.log1p(scale * t1 * t1))


def _log_lr_matrix(spec: TestSpec, alt, data) -> np.ndarray:
    """(reps, n_max) matrix of log L_n; t families carry 0.0 at n = 1."""
    n_max = spec.max_n
    n = np.arange(1, n_max + 1, dtype=float)
    fam = spec.family
    if fam is Family.ONE_Z:
        s2 = spec.sigma0 ** 2
        t0, t1 = spec.null_value, alt.theta1
        return (t1 - t0) / s2 * np.cumsum(data, axis=1) - n * (
            (t1 * t1 - t0 * t0) / (2.0 * s2)
        )
    if fam is Family.TWO_Z:
        var_d = 2.0 * spec.sigma0 ** 2
        return alt.theta1 / var_d * np.cumsum(data, axis=1) - n * (
            alt.theta1 ** 2 / (2.0 * var_d)
        )
    if fam is Family.ONE_PROP:
        p0 = spec.null_value
        s = np.cumsum(data, axis=1, dtype=np.int64).astype(float)
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
    if fam is Family.ONE_T:
        s1 = np.cumsum(data, axis=1)
        s2 = np.cumsum(data * data, axis=1)
        mean = s1 / n
        var = np.maximum((s2 - n * mean * mean) / np.maximum(n - 1.0, 1.0), 1e-60)
        t0 = (mean - spec.null_value) / np.sqrt(var)
        out = _t_matrix(t0, alt.slope, n - 1.0, n / np.maximum(n - 1.0, 1.0), n / 2.0)
        out[:, 0] = 0.0
        return out
    if fam is Family.TWO_T:
        x1, x2 = data
        s1, q1 = np.cumsum(x1, axis=1), np.cumsum(x1 * x1, axis=1)
        s2, q2 = np.cumsum(x2, axis=1), np.cumsum(x2 * x2, axis=1)
        m1, m2 = s1 / n, s2 / n
        ss = (q1 - n * m1 * m1) + (q2 - n * m2 * m2)
        nu = np.maximum(2.0 * n - 2.0, 1.0)
        pooled_var = np.maximum(ss / nu, 1e-60)
        se = np.sqrt(pooled_var * 2.0 / n)
        t0 = (m2 - m1) / se
        shift = alt.slope * np.sqrt(n / 2.0)
        out = _t_matrix(t0, shift, nu, 1.0 / nu, n)
        out[:, 0] = 0.0
        return out
    raise SpecError(f"unsupported family {fam}")


@dataclass
class SimResult:
    stop_n: np.ndarray        # first decision step (N when gamma decides)
    early_reject: np.ndarray  # crossed A at stop_n
    early_accept: np.ndarray  # crossed B at stop_n
    log_lr_final: np.ndarray  # terminal log L_N for survivors, NaN otherwise

    @property
    def n_reps(self) -> int:
        return self.stop_n.size

    @property
    def survivor(self) -> np.ndarray:
        return ~(self.early_reject | self.early_accept)


def _scan_boundaries(log_lr, log_a, log_b) -> SimResult:
    up = log_lr >= log_a
    dn = log_lr <= log_b
    hit = up | dn
    any_hit = hit.any(axis=1)
    first = np.where(any_hit, hit.argmax(axis=1), log_lr.shape[1] - 1)
    rows = np.arange(log_lr.shape[0])
    early_reject = any_hit & up[rows, first]
    early_accept = any_hit & ~early_reject
    final = np.where(any_hit, np.nan, log_lr[:, -1])
    return SimResult(
        stop_n=(first + 1).astype(np.int32),
        early_reject=early_reject,
        early_accept=early_accept,
        log_lr_final=final,
    )


def _scan_two_sided(lr_right, lr_left, log_a, log_b) -> SimResult:
    up = (lr_right >= log_a) | (lr_left >= log_a)
    dn = (lr_right <= log_b) & (lr_left <= log_b)
    hit = up | dn
    any_hit = hit.any(axis=1)
    first = np.where(any_hit, hit.argmax(axis=1), lr_right.shape[1] - 1)
    rows = np.arange(lr_right.shape[0])
    early_reject = any_hit & up[rows, first]
    early_accept = any_hit & ~early_reject
    final = np.where(any_hit, np.nan, np.maximum(lr_right[:, -1], lr_left[:, -1]))
    return SimResult(
        stop_n=(first + 1).astype(np.int32),
        early_reject=early_reject,
        early_accept=early_accept,
        log_lr_final=final,
    )


def _simulate(spec: TestSpec, alt, theta: float, n_reps: int, seed: RngSeed,
              threads: int = 1) -> SimResult:
    """Boundary-scan simulation at parameter ``theta``.

    Work is split into fixed CHUNK-sized blocks with per-block streams;
    the thread count never changes the result.
    """
    bounds = WaldBoundaries.from_spec(spec)
    log_a, log_b = math.log(bounds.A), math.log(bounds.B)
    sizes = [CHUNK] * (n_reps // CHUNK)
    if n_reps % CHUNK:
        sizes.append(n_reps % CHUNK)

    def work(idx_reps):
        idx, reps = idx_reps
        gen = make_generator(seed.stream(idx))
        data = _gen_data(spec, theta, reps, gen)
        if spec.side is Side.TWO_SIDED:
            alt_r, alt_l = alt
            lr_r = _log_lr_matrix(spec, alt_r, data)
            lr_l = _log_lr_matrix(spec, alt_l, data)
            return _scan_two_sided(lr_r, lr_l, log_a, log_b)
        return _scan_boundaries(_log_lr_matrix(spec, alt, data), log_a, log_b)

    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]
    return SimResult(
        stop_n=np.concatenate([p.stop_n for p in parts]),
        early_reject=np.concatenate([p.early_reject for p in parts]),
        early_accept=np.concatenate([p.early_accept for p in parts]),
        log_lr_final=np.concatenate([p.log_lr_final for p in parts]),
    )


def _null_theta(spec: TestSpec) -> float:
    if spec.family in (Family.TWO_Z, Family.TWO_T):
        return 0.0
    return spec.null_value


def _choose_gamma(sim: SimResult, alpha: float, bounds: WaldBoundaries,
                  discrete: bool) -> float:
    n_reps = sim.n_reps
    r_a = int(sim.early_reject.sum())
    budget = int(math.floor(alpha * n_reps))
    if r_a > budget:
        return float("inf")
    survivors = np.sort(sim.log_lr_final[sim.survivor])[::-1]
    k = budget - r_a
    if discrete:
        # terminal values sit on a lattice; the threshold lands just above the
        # largest value whose inclusion would push the size past alpha
        if survivors.size == 0:
            return bounds.A
        values, counts = np.unique(np.round(survivors, 12), return_counts=True)
        cum = r_a
        largest_accepted = None
        for v, c in zip(values[::-1], counts[::-1]):
            if cum + c <= budget:
                cum += int(c)
            else:
                largest_accepted = float(v)
                break
        if largest_accepted is None:
            # every surviving value is rejectable within the budget
            return 0.5 * (math.exp(float(values[0])) + bounds.B)
        return math.exp(largest_accepted) * (1.0 + 1e-9)
    if survivors.size == 0:
        return bounds.A
    if k <= 0:
        return 0.5 * (math.exp(survivors[0]) + bounds.A)
    if k >= survivors.size:
        return 0.5 * (math.exp(survivors[-1]) + bounds.B)
    # midpoint of the two order statistics bracketing the size constraint
    return 0.5 * (math.exp(survivors[k - 1]) + math.exp(survivors[k]))


def design(spec: TestSpec, n_reps: int = 1_000_000, seed=0,
           threads: int = 1) -> DesignResult:
    """Calibrate the termination threshold by simulation under the null."""
    seed = _as_seed(seed)
    alt = _alternative_for(spec)
    bounds = WaldBoundaries.from_spec(spec)
    sim = _simulate(spec, alt, _null_theta(spec), n_reps, seed, threads)
    discrete = spec.family is Family.ONE_PROP
    gamma = _choose_gamma(sim, spec.alpha, bounds, discrete)
    if math.isfinite(gamma):
        rejects = sim.early_reject.sum() + np.nansum(
            sim.log_lr_final[sim.survivor] >= math.log(gamma)
        )
        type1 = float(rejects) / n_reps
    else:
        type1 = float(sim.early_reject.sum()) / n_reps
    return DesignResult(
        spec=spec,
        boundaries=bounds,
        alternative=alt,
        gamma=gamma,
        type1_est=type1,
        asn_null=float(sim.stop_n.mean()),
        n_reps=n_reps,
        seed=seed,
        method=MC_METHOD,
    )


def oc(design_result: DesignResult, theta: float, n_reps: int = 1_000_000,
       seed=1, threads: int = 1) -> OCResult:
    """Operating characteristics of a calibrated design at ``theta``."""
    if not design_result.feasible:
        raise InfeasibleDesignError("cannot evaluate an infeasible design")
    seed = _as_seed(seed)
    spec = design_result.spec
    sim = _simulate(spec, design_result.alternative, theta, n_reps, seed, threads)
    log_gamma = math.log(design_result.gamma)
    reject = sim.early_reject | (sim.survivor & (sim.log_lr_final >= log_gamma))
    hist = np.bincount(sim.stop_n, minlength=spec.max_n + 1)
    return OCResult(
        theta=theta,
        type2_est=float(1.0 - reject.mean()),
        asn=float(sim.stop_n.mean()),
        stop_time_histogram=hist,
        n_reps=n_reps,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Fixed-design helper computations
# ---------------------------------------------------------------------------

def _fixed_power_z(effect_over_sigma: float, n: float, alpha: float) -> float:
    z_a = std_normal_quantile(1.0 - alpha)
    return float(stats.norm.sf(z_a - effect_over_sigma * math.sqrt(n)))

def _fixed_power_t(effect: float, n: int, alpha: float) -> float:
    tq = t_quantile(1.0 - alpha, n - 1)
    return float(stats.nct.sf(tq, n - 1, effect * math.sqrt(n)))

def _fixed_power_two_t(effect: float, n: int, alpha: float) -> float:
    nu = 2 * n - 2
    tq = t_quantile(1.0 - alpha, nu)
    return float(stats.nct.sf(tq, nu, effect * math.sqrt(n / 2.0)))

def _fixed_power_prop(p: float, p0: float, n: int, alpha: float) -> float:
    c0, _ = prop_cutoff(p0, n, alpha)
    return binom_tail(c0, n, p)


def fixed_design_alt(spec: TestSpec) -> float:
    """Effect size at which the size-alpha, sample-n_max fixed test has
    power 1 - beta.

    For t families this is the standardized effect; for proportions the
    conservative (non-randomized) test's power is used, which matches the
    reference outputs.
    """
    alpha = spec.alpha / 2.0 if spec.side is Side.TWO_SIDED else spec.alpha
    sign = -1.0 if spec.side is Side.LEFT else 1.0
    target = 1.0 - spec.beta
    fam = spec.family
    if fam is Family.ONE_Z:
        z = std_normal_quantile(1.0 - alpha) + std_normal_quantile(target)
        return spec.null_value + sign * z * spec.sigma0 / math.sqrt(spec.n_max)
    if fam is Family.TWO_Z:
        z = std_normal_quantile(1.0 - alpha) + std_normal_quantile(target)
        return sign * z * spec.sigma0 * math.sqrt(1.0 / spec.n1_max + 1.0 / spec.n2_max)
    if fam is Family.ONE_T:
        f = lambda e: _fixed_power_t(e, spec.n_max, alpha) - target
        return sign * optimize.brentq(f, 1e-9, 20.0, xtol=1e-12)
    if fam is Family.TWO_T:
        f = lambda e: _fixed_power_two_t(e, spec.n1_max, alpha) - target
        return sign * optimize.brentq(f, 1e-9, 20.0, xtol=1e-12)
    if fam is Family.ONE_PROP:
        p0 = spec.null_value
        if spec.side is Side.LEFT:
            flipped = fixed_design_alt(
                TestSpec(family=fam, side=Side.RIGHT, null_value=1.0 - p0,
                         alpha=alpha, beta=spec.beta, n_max=spec.n_max)
            )
            return 1.0 - flipped
        f = lambda p: _fixed_power_prop(p, p0, spec.n_max, alpha) - target
        return optimize.brentq(f, p0 + 1e-12, 1.0 - 1e-12, xtol=1e-12)
    raise SpecError(f"unsupported family {fam}")


def _fixed_power(spec: TestSpec, effect: float, n: int, alpha: float) -> float:
    fam = spec.family
    if fam is Family.ONE_Z:
        return _fixed_power_z((effect - spec.null_value) / spec.sigma0, n, alpha)
    if fam is Family.TWO_Z:
        return _fixed_power_z(effect / (spec.sigma0 * math.sqrt(2.0)), n, alpha)
    if fam is Family.ONE_T:
        return _fixed_power_t(effect, n, alpha)
    if fam is Family.TWO_T:
        return _fixed_power_two_t(effect, n, alpha)
    if fam is Family.ONE_PROP:
        return _fixed_power_prop(effect, spec.null_value, n, alpha)
    raise SpecError(f"unsupported family {fam}")


def find_n_star(spec: TestSpec, target_alpha: float = 0.005) -> int:
    """Smallest sample size at which a fixed test of size ``target_alpha``
    recovers the power the given spec attains at its own fixed-design
    alternative."""
    theta_star = fixed_design_alt(spec)
    target = 1.0 - spec.beta
    n_min = 2 if spec.family in (Family.ONE_T, Family.TWO_T) else 1
    n_cap = max(64 * spec.max_n, 1000)
    for n in range(n_min, n_cap + 1):
        try:
            if _fixed_power(spec, theta_star, n, target_alpha) >= target:
                return n
        except InfeasibleDesignError:
            continue
    raise InfeasibleDesignError(
        f"no sample size up to {n_cap} reaches power {target} at size {target_alpha}"
    )


def effective_n(n_max: int, p0: float, alpha: float,
                side: Side = Side.RIGHT) -> int:
    """Largest sample size at which the point proportion alternative sets a
    strict record minimum distance from the null (proportion tests only)."""
    candidates = []
    best = float("inf")
    for n in range(1, n_max + 1):
        try:
            spec = TestSpec(family=Family.ONE_PROP, side=side, null_value=p0,
                            alpha=alpha, beta=0.2, n_max=n)
            p = point_umpbt_one_prop(spec).theta1
        except (InfeasibleDesignError, SpecError):
            continue
        distance = abs(p - p0)
        if distance < best:
            best = distance
            candidates.append(n)
    return max(candidates) if candidates else n_max


def cost_multiple(spec_reference: TestSpec, design_result: DesignResult,
                  pi0: float, n_reps: int = 100_000, seed=2,
                  threads: int = 1) -> float:
    """Average sample size of the calibrated sequential design, as a multiple
    of the reference fixed design's sample size, when a fraction ``pi0`` of
    tested nulls is true."""
    if not 0.0 <= pi0 <= 1.0:
        raise SpecError(f"pi0 must lie in [0, 1], got {pi0}")
    theta_star = fixed_design_alt(spec_reference)
    spec = design_result.spec
    if spec.family in (Family.ONE_T,):
        theta_oc = spec.null_value + theta_star
    elif spec.family is Family.TWO_T:
        theta_oc = theta_star
    else:
        theta_oc = theta_star
    asn_null = design_result.asn_null
    asn_alt = oc(design_result, theta_oc, n_reps=n_reps, seed=seed,
                 threads=threads).asn
    return (pi0 * asn_null + (1.0 - pi0) * asn_alt) / spec_reference.max_n
