"""
Where do 240 photons go?
========================

With many photons the channel weights p(j|m) cluster tightly around one
spin j*.  The OID inherits the shape of that channel's squared d column and
shows two horns close to the turning points of a random-phase classical wave.
"""

import math

import numpy as np

from multihom import ExperimentConfig, channel_table, classical_oid_density, jstar, oid

n, eta, theta = 240, 0.4, math.pi / 3
cfg = ExperimentConfig.build(n, 0, eta, theta)

table = channel_table(cfg)
print(f"most probable channel j = {table.argmax() / 2:g}, predicted n*jbar* = {n * jstar(0, eta):g}")

# the weight is concentrated on a handful of channels
j = table.spins / 2
top = np.argsort(table.probs)[::-1][:5]
for k in sorted(top):
    print(f"  j={j[k]:5.1f}  p={table.probs[k]:.4f}")

# OID coarse-grained in bins of 4, next to the random-phase classical density
d = oid(cfg)
mp = d.support / 2
edges = np.arange(-n / 2, n / 2 + 1, 4)
hist, _ = np.histogram(mp, bins=edges, weights=d.probs)
centers = (edges[:-1] + edges[1:]) / 2
classical = 4 * classical_oid_density(centers / n, cfg) / n

turn = eta * n / 2 * math.sin(theta)
print(f"\nclassical turning points: +-{turn:.1f}")
print("   m'     quantum   classical")
for c, q, cl in zip(centers, hist, classical):
    if abs(c) <= 60:
        print(f"{c:6.0f}  {q:9.5f}  {cl:9.5f}  " + "#" * int(400 * q))
