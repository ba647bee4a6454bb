"""
Limits: distinguishable photons, identical photons, and the WKB envelope
========================================================================

At eta = 0 every photon picks its port independently, which is two binomials
convolved.  At eta = 1 only the top channel survives and the OID is a squared
Wigner d column.  Inside the classical region that column oscillates under a
smooth envelope 1 / (pi sqrt(R)).
"""

import math

import numpy as np

from multihom import (
    ExperimentConfig,
    bsc_oid,
    oid,
    turning_points,
    wigner_d_column,
    wkb_envelope,
)

cfg0 = ExperimentConfig.build(500, 100, 0.0, 1.2)
d0, b0 = oid(cfg0), bsc_oid(cfg0)
print(f"eta=0, n=500: max |OID - BSC| = {np.max(np.abs(d0.probs - b0.probs)):.2e}")
print(f"  mean {b0.mean():.6f} vs m cos(theta) = {50 * math.cos(1.2):.6f}")
print(f"  variance {b0.variance():.6f} vs (n/4) sin^2(theta) = {125 * math.sin(1.2) ** 2:.6f}")

cfg1 = ExperimentConfig.build(240, 40, 1.0, 2.0)
d1 = oid(cfg1)
col = wigner_d_column(240, 40, 2.0) ** 2
print(f"eta=1, n=240: max |OID - d^2| = {np.max(np.abs(d1.probs - col)):.2e}")

# the j = 60 column against its envelope, averaged over +-6 neighbours
j2, theta = 120, math.pi / 3
col = wigner_d_column(j2, 0, theta) ** 2
lo, hi = turning_points(j2, 0, theta)
print(f"\nj=60, m=0: turning points {lo:.2f}, {hi:.2f}")
print("   m'   window avg   envelope")
for mp in range(-50, 51, 10):
    k = mp + 60
    avg = col[k - 6: k + 7].mean()
    print(f"{mp:5d}   {avg:.6f}    {wkb_envelope(j2, 0, 2 * mp, theta):.6f}")
