"""
Large deviations of the channel distribution
============================================

-(1/n) ln p(j|m) settles onto a rate function r(jbar) whose zero sits at
jbar*.  Close to the minimum the distribution is Gaussian; its width follows
from the curvature of r.
"""

import math

import numpy as np

from multihom import (
    ExperimentConfig,
    ScaledPoint,
    channel_table,
    gaussian_width,
    jstar,
    log_channel_probability,
    rate_derivative2,
    rate_function,
)

eta = 0.4
print(f"jbar* = {jstar(0.0, eta):.4f}")

print("\n jbar     n=120     n=240     n=480     n=960     rate")
for jbar in (0.1, 0.2, 0.25, 0.35, 0.45):
    row = []
    for n in (120, 240, 480, 960):
        lp = log_channel_probability(int(round(2 * jbar * n)), ExperimentConfig.build(n, 0, eta, 1.0))[0]
        row.append(-lp / n)
    r = rate_function(ScaledPoint(jbar, 0.0, eta))
    print(f"{jbar:5.2f}  " + "  ".join(f"{v:8.5f}" for v in row) + f"  {r:8.5f}")

# curvature at the minimum against the Gaussian width
js = jstar(0.0, eta)
curv = rate_derivative2(ScaledPoint(js, 0.0, eta))
print(f"\nr''(jbar*) = {curv:.4f}")
for n in (120, 480, 960):
    tab = channel_table(ExperimentConfig.build(n, 0, eta, 1.0))
    jb = tab.spins / (2 * n)
    mean = np.sum(jb * tab.probs)
    sd = math.sqrt(np.sum((jb - mean) ** 2 * tab.probs))
    print(f"n={n:4d}  std(jbar)={sd:.5f}  width={gaussian_width(0.0, eta, n):.5f}  "
          f"1/sqrt(n r'')={1 / math.sqrt(n * curv):.5f}")
