"""
Weighted varentropy of common lifetime laws
===========================================

Varentropy is the variance of the information content -log f(X). Weighting
it by x stresses large lifetimes. Two laws with the same varentropy can have
very different weighted varentropy.
"""

import math

from wvarent import (Exponential, Uniform, Weibull, WeightFunction, closed_form_wve,
                     varentropy, weighted_varentropy)

# Every exponential law has varentropy 1. The weighted version scales like 1/lambda^2.
for lam in (0.5, 1.0, 2.0, 8.0):
    d = Exponential(lam)
    print(f"Exp({lam:<4}) VE = {varentropy(d):.6f}   WVE = {weighted_varentropy(d):9.5f}"
          f"   closed form = {closed_form_wve(d):9.5f}")

# A uniform law has zero varentropy because -log f is constant. With the weight x,
# only the spread of x is left, scaled by log(b - a).
u = Uniform(1.0, 1.0 + math.e)
print(f"\nUniform(1, 1+e): VE = {varentropy(u):.2e}, WVE = {weighted_varentropy(u):.6f}"
      f" (e^2/12 = {math.e ** 2 / 12:.6f})")

# The weight can be swapped out, e.g. for x^2.
w = Weibull(2.0)
print(f"\nWeibull(2): WVE with x = {weighted_varentropy(w):.5f},"
      f" with x^2 = {weighted_varentropy(w, WeightFunction.square()):.5f}")
