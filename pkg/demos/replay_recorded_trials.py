"""Replay recorded observation sequences through the stopping rule.

Each dataset is fed one observation at a time into a truncated sequential
probability ratio test with a fixed termination threshold, printing the
running likelihood ratio and the final verdict.
"""

import math

import seqstop as sq

ONE_Z = [
    4.060319, 5.275465, 3.746557, 7.392921, 5.494262,
    3.769297, 5.731144, 6.107487, 5.863672,
]
GAMMA_ONE_Z = 27.856


def main():
    spec = sq.TestSpec(family="one_z", null_value=3.0, sigma0=1.5,
                       alpha=0.005, beta=0.2, n_max=30)
    d = sq.DesignResult.from_gamma(spec, GAMMA_ONE_Z)
    alt = d.alternative
    print(f"testing H0: mu = 3 vs the implied alternative mu = {alt.theta1:.4f}")
    print(f"continue while L in ({d.boundaries.B:.4f}, {d.boundaries.A:.1f}); "
          f"at n = {spec.n_max} reject iff L >= {d.gamma}")
    print()

    trial = sq.new_trial(d)
    for i, x in enumerate(ONE_Z, 1):
        decision = sq.step(trial, x, d)
        print(f"  n = {i:2d}  x = {x:5.2f}  L = {math.exp(trial.log_lr):9.3f}"
              f"  -> {decision.kind.value}")
        if decision.terminal:
            break
    print()
    print(f"decision: {decision.kind.value} at n = {decision.at_n}"
          f" ({decision.cause.value})")


if __name__ == "__main__":
    main()
