"""
Two-photon interference through the channel picture
===================================================

Two photons, one per port, meet on a beam splitter.  The triplet channel
(j = 1) behaves like a pair of identical bosons, the singlet (j = 0) sends
one photon to each side no matter the angle.  Varying the overlap eta moves
weight between the two.
"""

import math

import numpy as np

from multihom import ExperimentConfig, channel_table, oid

# channel weights as a function of the overlap
for eta in (0.0, 0.5, 0.9, 1.0):
    cfg = ExperimentConfig.build(2, 0, eta, math.pi / 2)
    weights = dict(channel_table(cfg))
    print(f"eta={eta:.1f}  p(j=1)={weights[2]:.4f}  p(j=0)={weights[0]:.4f}")

# coincidence probability p(m'=0) against eta at a 50:50 splitter: the dip
print()
print("  eta   p(0|0)")
for eta in np.linspace(0, 1, 11):
    d = oid(ExperimentConfig.build(2, 0, float(eta), math.pi / 2))
    print(f"{eta:5.2f}   {d[0]:.6f}")

# identical photons: the coincidence vanishes exactly
print("\nexact dip:", oid(ExperimentConfig.build(2, 0, 1.0, math.pi / 2))[0] == 0.0)
