"""
Transforming a lifetime
=======================

For Y = phi(X) with monotone phi, the WVE and WRVE of Y can be written in
terms of moments of X. Here the identities are checked against direct
quadrature on the law of Y.
"""

from wvarent import (Exponential, MonotoneMap, Power, TransformedDistribution, weighted_varentropy,
                     wrve, wrve_affine, wrve_monotone, wve_location, wve_monotone)

x = Exponential(1.0)

# Squaring an Exp(1) lifetime gives a Weibull law with shape 1/2.
sq = MonotoneMap.square()
y = TransformedDistribution(x, sq)
print(f"WVE of X^2: identity {wve_monotone(x, sq):.6f}, direct {weighted_varentropy(y):.6f}")
print(f"WRVE of X^2 at t=1: identity {wrve_monotone(x, sq, 1.0):.4f}, direct {wrve(y, 1.0):.4f}")

# Decreasing maps turn residual conditioning into past conditioning on X.
p = Power(2.0, 1.0)
en = MonotoneMap.exp_neg(1.0)
z = TransformedDistribution(p, en)
print(f"\nWRVE of exp(-X), X ~ Power(2,1), t=0.6: identity {wrve_monotone(p, en, 0.6):.6f},"
      f" direct {wrve(z, 0.6):.6f}")

# A location shift adds a cross term that the shortcut VE^x - b VE leaves out.
print(f"\nWVE of X + 1: exact {wve_location(x, 1.0):.4f}, shortcut {wve_location(x, 1.0, printed=True):.4f}")
print(f"WRVE of 2X + 1 at t=2: exact {wrve_affine(x, 2.0, 1.0, 2.0):.4f},"
      f" published corollary {wrve_affine(x, 2.0, 1.0, 2.0, printed=True):.4f}")
