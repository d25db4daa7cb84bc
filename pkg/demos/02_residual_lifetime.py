"""
Weighted residual varentropy as a function of age
=================================================

Conditioning on survival past t gives the residual law f(x)/S(t) on (t, inf).
Its weighted varentropy (WRVE) tracks how uncertain the remaining life
of a used item is.
"""

import numpy as np

from wvarent import Exponential, Lomax, Weibull, rve, wrve, wrve_derivative, wrve_lower_bound

ts = np.linspace(0.0, 2.0, 5)
laws = {"Exp(1)": Exponential(1.0), "Weibull(2)": Weibull(2.0), "Lomax(1, 5)": Lomax(1.0, 5.0)}

# The unweighted residual varentropy of an exponential law stays at 1 (memorylessness).
# The weighted one still grows with t because the weight x grows.
print("t     " + "".join(f"{name:>26}" for name in laws))
for t in ts:
    cells = [f"{wrve(d, t):10.4f} (RVE {rve(d, t):6.3f})" for d in laws.values()]
    print(f"{t:4.1f} " + "".join(f"{c:>26}" for c in cells))

# The slope in t is available three ways. The published derivative formula
# disagrees with the other two; see ERRATUM.md.
r = wrve_derivative(Exponential(1.0), 1.0)
print(f"\nd/dt WRVE at t=1 for Exp(1): finite difference {r.finite_difference_value:.6f},"
      f" derived {r.derived_value:.6f}, published formula {r.formula_value:.1f}")

# A variance lower bound from a Stein-type identity.
b = wrve_lower_bound(Weibull(2.0), 0.5)
print(f"\nWeibull(2) at t=0.5: lower bound {b.bound:.5f} <= WRVE {b.measure:.5f}")
