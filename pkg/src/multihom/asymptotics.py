"""Large-n behaviour: channel-probability rate function, WKB envelope, BSC rate.

Scaled variables are ``jbar = j/n`` and ``mbar = m/n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .combinatorics import binary_relative_entropy, twice

__all__ = [
    "ScaledPoint",
    "xbar_minimizer",
    "rate_function",
    "rate_derivative1",
    "rate_derivative2",
    "jstar",
    "gaussian_width",
    "wkb_region",
    "turning_points",
    "wkb_envelope",
    "bsc_rate_function",
]


@dataclass(frozen=True)
class ScaledPoint:
    jbar: float
    mbar: float
    eta: float

    def __post_init__(self):
        if not -0.5 <= self.mbar <= 0.5:
            raise ValueError(f"mbar must lie in [-1/2, 1/2], got {self.mbar}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")


def _check_domain(p: ScaledPoint):
    if not abs(p.mbar) <= p.jbar <= 0.5:
        raise ValueError(f"need |mbar| <= jbar <= 1/2, got jbar={p.jbar}, mbar={p.mbar}")


def xbar_minimizer(p: ScaledPoint) -> float:
    """Dominant scaled summation index of the hypergeometric sum."""
    _check_domain(p)
    eta = p.eta
    if eta == 1.0:
        raise ValueError("minimizer is singular at eta = 1")
    if eta == 0.0:
        return 0.0
    root = math.sqrt(max(p.jbar**2 - (1 - eta**2) * p.mbar**2, 0.0))
    x = eta / (1 - eta**2) * (root - eta * p.jbar)
    return min(max(x, 0.0), p.jbar - abs(p.mbar))


def rate_function(p: ScaledPoint) -> float:
    """``r(jbar|mbar) = -lim (1/n) ln p(j|m)`` for ``0 < eta < 1``."""
    _check_domain(p)
    if not 0.0 < p.eta < 1.0:
        raise ValueError("rate function needs 0 < eta < 1")
    j, m, eta = p.jbar, p.mbar, p.eta
    x = xbar_minimizer(p)
    q = eta / (1 + eta)
    r = (binary_relative_entropy(0.5 + j, (1 + eta) / 2)
         - binary_relative_entropy(0.5 + m, 0.5))
    for w in (j + m, j - m):
        if w > 0:
            r += w * binary_relative_entropy(x / w, q)
    return float(r)


def _interior(p: ScaledPoint):
    _check_domain(p)
    if not 0.0 < p.eta < 1.0:
        raise ValueError("derivatives need 0 < eta < 1")
    if p.jbar == abs(p.mbar) or p.jbar == 0.5:
        raise ValueError("derivative is singular on the boundary")


def rate_derivative1(p: ScaledPoint) -> float:
    _interior(p)
    j, m, eta = p.jbar, p.mbar, p.eta
    x = xbar_minimizer(p)
    return math.log((1 - eta**2) / eta**2 * (1 + 2 * j) / (1 - 2 * j) * x**2 / (j**2 - m**2))


def rate_derivative2(p: ScaledPoint) -> float:
    _interior(p)
    j, m, eta = p.jbar, p.mbar, p.eta
    return (4 / (1 - 4 * j**2)
            + 2 * eta * m**2 / ((j**2 - m**2) * math.sqrt(j**2 - (1 - eta**2) * m**2)))


def jstar(mbar: float, eta: float) -> float:
    """Scaled spin of the dominant channel."""
    if abs(mbar) > 0.5:
        raise ValueError(f"|mbar| must not exceed 1/2, got {mbar}")
    return math.sqrt(eta**2 / 4 + (1 - eta**2) * mbar**2)


def gaussian_width(mbar: float, eta: float, n: int) -> float:
    """Standard deviation of ``j/n`` in the Gaussian regime (0 at eta in {0, 1})."""
    if eta in (0.0, 1.0) or abs(mbar) == 0.5:
        return 0.0
    return (eta * math.sqrt(1 - eta**2) * math.sqrt(1 - 4 * mbar**2)
            / (4 * math.sqrt(n) * jstar(mbar, eta)))


def wkb_region(j2, m2, mp2, theta: float) -> float:
    """``(J^2 - m^2) sin^2(theta) - (m' - m cos(theta))^2`` with ``J = j + 1/2``.

    Positive in the oscillatory (classical) region.  ``mp2`` may be any real
    doubled value, e.g. twice a turning point.
    """
    big_j = (twice(j2) + 1) / 2
    m, mp = twice(m2) / 2, float(mp2) / 2
    return (big_j**2 - m**2) * math.sin(theta) ** 2 - (mp - m * math.cos(theta)) ** 2


def turning_points(j2, m2, theta: float) -> tuple[float, float]:
    big_j = (twice(j2) + 1) / 2
    m = twice(m2) / 2
    if big_j**2 < m**2:
        raise ValueError("no classical region: J^2 < m^2")
    half = math.sqrt(big_j**2 - m**2) * abs(math.sin(theta))
    center = m * math.cos(theta)
    return center - half, center + half


def wkb_envelope(j2, m2, mp2, theta: float) -> float:
    """Phase-averaged WKB value ``1 / (pi sqrt(R))`` of ``d^j_{m'm}(theta)**2``."""
    r = wkb_region(j2, m2, mp2, theta)
    if r <= 0:
        return 0.0
    return 1.0 / (math.pi * math.sqrt(r))


def bsc_rate_function(mpbar: float, mbar: float, f: float) -> float:
    """Rate of the distinguishable-photon OID, ``-lim (1/n) ln p(m'|m)``.

    The infimum over the scaled count through the straight path is found by
    bounded scalar minimization; outside the reachable range it is ``+inf``.
    """
    if abs(mbar) > 0.5 or abs(mpbar) > 0.5:
        raise ValueError("imbalances must lie in [-1/2, 1/2]")
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"f must lie in [0, 1], got {f}")
    a, b = 0.5 + mbar, 0.5 - mbar          # scaled port occupations
    target = 0.5 + mpbar                   # scaled n1'

    if f in (0.0, 1.0):
        image = a if f == 0.0 else b
        return 0.0 if math.isclose(target, image, abs_tol=1e-15) else math.inf

    def objective(k):
        out = 0.0
        if a > 0:
            out += a * binary_relative_entropy(k / a, 1 - f)
        if b > 0:
            out += b * binary_relative_entropy((target - k) / b, f)
        return out

    lo = max(0.0, target - b)
    hi = min(a, target)
    if lo > hi:
        return math.inf
    if hi - lo < 1e-15:
        return float(objective(lo))
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    # the bounded method never evaluates the endpoints
    return float(min(res.fun, objective(lo), objective(hi)))
