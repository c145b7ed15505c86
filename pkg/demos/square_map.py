"""The disk map onto the square with vertices 1, i, -1, -i.

Its conformal radius has a closed form through the integral of
(1 - t^4)^(-1/2) over [0, 1]; we compare against scipy's quad, then look at
the Taylor coefficients (only n = 1 mod 4 survive) and the area identity.
"""
import numpy as np
from scipy.integrate import quad

from steinersym import conformal as cf
from steinersym.geom import Polygon

sq = Polygon.from_complex(np.array([1, 1j, -1, -1j]))
m = cf.build_map(sq, 0j, 1e-8)
oracle = 1 / quad(lambda t: (1 - t ** 4) ** -0.5, 0, 1)[0]
print(f"f'(0) = {m.fprime0:.12f}   closed form {oracle:.12f}   boundary error {m.eps_b:.1e}")

a = cf.taylor_coefficients(m, 21).a
for n in range(1, 22, 4):
    print(f"  a_{n:<2d} = {a[n].real:+.10f}")

partial, tail = cf.area_from_coefficients(m)
print(f"pi sum n|a_n|^2 = {partial:.8f} + tail {tail:.2e} = {partial + tail:.8f}  (area 2)")

for p in (2, 4, np.inf):
    iv = cf.hardy_norm(m, p)
    print(f"||f||_{p:g} in [{iv.lo:.8f}, {iv.hi:.8f}]")
