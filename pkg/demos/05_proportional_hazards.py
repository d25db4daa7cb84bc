"""
Proportional hazard rates and series systems
============================================

Raising a survival function to the power a gives the PHR law; a series
system of n i.i.d. components is the case a = n. Its WRVE can be computed
in the y = S(x)^a coordinate or directly in x.
"""

from wvarent import (Exponential, PHRModel, Weibull, series_exponential_wrve, wrve, wrve_phr)

for a in (1.0, 2.0, 3.0):
    m = PHRModel(Weibull(1.5), a)
    print(f"Weibull(1.5), a={a:.0f}: y-route {wrve_phr(m, 0.3):.8f}, x-route {wrve(m, 0.3):.8f}")

# With exponential components everything is closed form, and the WRVE grows with t.
print("\nseries of n Exp(1) components")
for n in (1, 2, 4):
    row = "  ".join(f"{series_exponential_wrve(n, 1.0, t):8.4f}" for t in (0.0, 0.5, 1.0, 2.0))
    print(f"n={n}: {row}")
print(f"\ncheck n=2, t=0.5 against Exp(2): {wrve(Exponential(2.0), 0.5):.4f}")
