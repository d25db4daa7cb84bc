"""
Estimating the WRVE from data
=============================

A Gaussian kernel density estimate is plugged into the definition. A small
Monte Carlo study shows the bias and how the MSE shrinks with n. A bootstrap
on a real data set compares the estimate with a fitted parametric model.
"""

from wvarent import (Exponential, KernelEstimate, bootstrap_study, load_dataset, monte_carlo_study,
                     wrve_estimate)

truth = Exponential(5.5)
sample = truth.sample(200, seed=1)
est = KernelEstimate.fit(sample)
print(f"n=200, Silverman bandwidth {est.bandwidth:.4f}: estimate at t=0.1 is {wrve_estimate(est, 0.1):.4f}")

report = monte_carlo_study(truth, [0.1, 0.2], [50, 100, 200], replications=100, seed=20240601)
print("\nMonte Carlo (100 replications)")
print(report.to_csv(), end="")

covid = load_dataset("builtin:covid")
boot = bootstrap_study(covid.values, covid.fitted_distribution(), [0.01, 0.2], covid.bandwidth,
                       resamples=200, seed=7)
print(f"\nbootstrap on {covid.name} ({len(covid)} values, b_n = {covid.bandwidth})")
print(boot.to_csv(), end="")
