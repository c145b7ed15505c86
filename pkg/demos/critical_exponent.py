"""Where does the Steiner mean inequality stop holding?

At p = 2 the mean of |f| on |z| = r never exceeds that of the symmetrized
map.  For large p a domain with mass far from the symmetry axis can win.
This scans the finger and the off-axis disk, then checks the disk against
closed-form Moebius maps.
"""
import numpy as np
from scipy.optimize import brentq

from steinersym import verify

store = verify.MapStore(1e-4)
for name in ("square_axis", "finger", "disk_offaxis"):
    res = verify.search_p0(verify.get_fixtures([name])[0], store)
    if res.p_star is None:
        print(f"{name:14s} no violation up to p = 200")
    else:
        print(f"{name:14s} p* = {res.p_star:.3f}, bracket {res.bracket}")

# the disk B(c, R) and its symmetrization B(Re c, R) have explicit maps
c, R, r = 0.2 + 0.4j, 0.8, 0.9
z = r * np.exp(2j * np.pi * np.arange(1 << 14) / (1 << 14))


def disk_map(c):
    return np.abs(c + (R * z - c) / (1 - np.conj(c) * z / R))


f, g = disk_map(c), disk_map(complex(c.real))
crossing = brentq(lambda p: np.log(np.mean(f ** p) / np.mean(g ** p)) / p, 2, 20)
print(f"closed-form crossing for the off-axis disk: p = {crossing:.4f}")
