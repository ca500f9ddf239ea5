# example_usage.py
"""
Example usage of the sparsity library.
This script walks through the samplers, the closed-form bounds and a small
simulated verification without going through the CLI.
"""

import math

from bounds import helper_bound, marginal_exceed_prob, theorem1_bound, theorem3_bound
from experiments import ExperimentConfig, check_threshold_construction, reproduce_figure
from samplers import DirichletSpec, StreamSeed, derive_stream, sample_dirichlet_log, sparsity_count
from special_functions import inverse_upper_tail


def example_sample():
    """Example: Draw one Dirichlet point and count its large coordinates."""
    print("=" * 60)
    print("Example 1: Sample a sparse Dirichlet point")
    print("=" * 60)

    n = 1024
    spec = DirichletSpec(n=n, alpha=1.0 / n)
    stream = derive_stream(StreamSeed(master=0, index=0))
    point = sample_dirichlet_log(stream, spec)

    print(f"\nDir(1/{n}) draw, largest coordinate: {math.exp(point.log_coords.max()):.4f}")
    for c in (1, 2, 3):
        epsilon = n ** -c
        print(f"  coordinates >= n^-{c}: {sparsity_count(point, epsilon)} (6c ln n = {6 * c * math.log(n):.1f})")


def example_bounds():
    """Example: Evaluate the closed-form bounds."""
    print("\n\n" + "=" * 60)
    print("Example 2: Closed-form bounds")
    print("=" * 60)

    result = theorem1_bound(100, 1.0)
    print(f"\nTheorem 1 at n=100, c0=1: {result.lower_bound:.4f}")
    print(f"  derived from theorem2 = {result.parent.lower_bound:.6f} (implied: {result.implied_by_parent})")

    result = theorem3_bound(64)
    print(f"Theorem 3 constant: {result.lower_bound:.6f}")

    result = helper_bound(1.0 / 9.0, 1.0 / 9.0, 5, 3)
    print(f"Helper bound at eps=alpha=1/9, k=5, n=3: {result.lower_bound:.6f}")

    print(f"Pr[X_1 >= 1/64] under Dir(1/64), n=64: {marginal_exceed_prob(64, 1.0 / 64, 1.0 / 64):.6f}")


def example_threshold():
    """Example: The threshold used inside the main lemma."""
    print("\n\n" + "=" * 60)
    print("Example 3: Threshold construction")
    print("=" * 60)

    c = inverse_upper_tail(1.0, 3.0 / 12.0)
    print(f"\nPr[Gamma(1) >= c] = 1/4 at c = {c:.12f} (ln 4 = {math.log(4):.12f})")

    report = check_threshold_construction(1e-4, 5, 100, 1e-4)
    print(f"alpha=1e-4, k=5, n=100: c = {report.c:.3e}, max gap {report.max_gap:.3e}, holds={report.holds}")


def example_verify():
    """Example: A small simulated verification."""
    print("\n\n" + "=" * 60)
    print("Example 4: Simulated verification")
    print("=" * 60)

    config = ExperimentConfig(alpha_mode="inverse_n_squared", n_grid=[4, 16, 64], threshold_exponents=[2.0], trials=200)
    report = reproduce_figure(config)
    for verdict in report.verdicts:
        print(f"  {verdict.bound_name:<10} n={verdict.event.n:<4} rate={verdict.empirical_success_rate:.3f} "
              f"bound={verdict.theoretical_lower_bound:.3f} pass={verdict.passed}")
    print(f"\nAll passed: {report.all_passed}")


if __name__ == "__main__":
    print("\n" + "=" * 60)
    print("Dirichlet Sparsity - Example Usage")
    print("=" * 60 + "\n")

    example_sample()
    example_bounds()
    example_threshold()
    example_verify()

    print("\n\n" + "=" * 60)
    print("Examples completed!")
    print("=" * 60)
