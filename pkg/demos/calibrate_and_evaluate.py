"""Calibrate a truncated sequential test and map out its performance.

Derives the implied alternative, calibrates the termination threshold by
Monte Carlo, cross-checks the proportion case against the exact lattice
recursion, and prints power and average sample number over a grid of
effect sizes.
"""

import numpy as np

import seqstop as sq
from seqstop.dp import design_exact_prop, oc_exact_prop


def normal_mean_example():
    spec = sq.TestSpec(family="one_z", null_value=0.0, sigma0=1.0,
                       alpha=0.005, beta=0.2, n_max=30)
    d = sq.design(spec, n_reps=200_000, seed=17, threads=4)
    print("known-variance mean test, N = 30, alpha = 0.005")
    print(f"  implied alternative  theta1 = {d.alternative.theta1:.4f}")
    print(f"  termination threshold gamma = {d.gamma:.3f}")
    print(f"  size estimate {d.type1_est:.4f}, null ASN {d.asn_null:.2f}")
    print()
    print("  theta    power     ASN")
    for theta in np.linspace(0.0, 1.2, 7):
        r = sq.oc(d, float(theta), n_reps=100_000, seed=1, threads=4)
        print(f"  {theta:5.2f}  {r.power:7.4f}  {r.asn:6.2f}")
    print()


def proportion_example():
    spec = sq.TestSpec(family="one_prop", null_value=0.2,
                       alpha=0.005, beta=0.2, n_max=30)
    exact = design_exact_prop(spec)
    mc = sq.design(spec, n_reps=200_000, seed=7, threads=4)
    print("success-rate test, p0 = 0.2, N = 30")
    print(f"  exact lattice: gamma = {exact.gamma:.4f}, "
          f"size = {exact.type1_est:.5f}, null ASN = {exact.asn_null:.3f}")
    print(f"  Monte Carlo:   gamma = {mc.gamma:.4f}, "
          f"size = {mc.type1_est:.5f}, null ASN = {mc.asn_null:.3f}")
    print()
    print("  p       power     ASN   (exact)")
    for p in (0.2, 0.3, 0.4, 0.5):
        r = oc_exact_prop(exact, p)
        print(f"  {p:4.2f}  {r.power:8.5f}  {r.asn:6.2f}")
    print()


def sample_size_helpers():
    spec = sq.TestSpec(family="one_z", null_value=0.0, sigma0=1.0,
                       alpha=0.05, beta=0.2, n_max=30)
    theta_a = sq.fixed_design_alt(spec)
    n_star = sq.find_n_star(spec, target_alpha=0.005)
    print("fixed-design bookkeeping")
    print(f"  a size-0.05 N=30 test has power 0.8 at theta_a = {theta_a:.4f}")
    print(f"  a size-0.005 test needs N* = {n_star} for the same power there")
    print(f"  proportion effective N for (N=30, p0=0.2): "
          f"{sq.effective_n(30, 0.2, 0.005)}")


if __name__ == "__main__":
    normal_mean_example()
    proportion_example()
    sample_size_helpers()
