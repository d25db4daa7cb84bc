"""
Coherent systems through distortion functions
=============================================

A system of i.i.d. components has CDF q(F(x)) for a distortion q fixed by its
structure. The quantile-space functional and the WVE of the system lifetime
coincide only for q(u) = u.
"""

import math

from wvarent import (DistortionFunction, LogUniform, Power, closed_form_parallel2_power,
                     distortion_k_of_n, wve_coherent, wve_coherent_bounds, wve_system_direct)

comp = Power(2.0, 1.0)
for q in (DistortionFunction.identity(), DistortionFunction.parallel(2), DistortionFunction.series(2),
          distortion_k_of_n(2, 3)):
    print(f"{q.label:>12}: q(0.5) = {float(q(0.5)):.4f}   u-form {wve_coherent(q, comp):.6f}"
          f"   system WVE {wve_system_direct(q, comp):.6f}")

# The parallel pair of Power(k, a) components has a closed-form u-functional.
print(f"\nclosed form, parallel:2 of Power(2,1): {closed_form_parallel2_power(2.0, 1.0):.6f}")

# Upper bounds through beta = sup phi(q(u)) / phi(u); the density floor bound needs f >= L.
b = wve_coherent_bounds(DistortionFunction.series(2), LogUniform(1.0, 3.0), 1.0, 2.0, L=1 / (3 * math.log(3)))
print(f"\nseries:2 of LogUniform(1,3): value {b.value:.5f}, bounds {b.bound_wve:.5f} (WVE route),"
      f" {b.bound_density_floor:.5f} (density floor), holds: {b.holds()}")
