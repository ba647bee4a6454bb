"""Output-imbalance statistics of the two-port interferometer.

The output imbalance distribution (OID) of ``n`` photons with input imbalance
``m`` is a mixture over spin-j channels,

    p(m'|m) = sum_j p(j|m) p(m'|j,m),

with channel probabilities depending only on the indistinguishability ``eta``
and channel OIDs ``d^j_{m'm}(theta)**2`` depending only on the beam splitter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .combinatorics import (
    check_imbalance,
    log_binomial,
    log_binomial_pmf,
    log_multiplicity,
    twice,
)
from .representations import GramMatrix, Rotation, log_gl2_diag_element, wigner_d_column

__all__ = [
    "ExperimentConfig",
    "Distribution",
    "ChannelTable",
    "channel_probability",
    "log_channel_probability",
    "channel_table",
    "channel_oid",
    "channel_oid_column",
    "oid",
    "bsc_oid",
    "classical_imbalance",
    "classical_oid_density",
]

NORM_TOL = 1e-9
FAST_CUTOFF = 1e-16


@dataclass(frozen=True)
class ExperimentConfig:
    """One interferometer run: ``n`` photons, imbalance ``m2/2``, overlap ``eta * exp(i chi)``."""

    n: int
    m2: int
    eta: float
    rotation: Rotation = field(default_factory=lambda: Rotation(math.pi / 2))
    chi: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "m2", twice(self.m2))
        check_imbalance(self.m2, self.n)
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")

    @classmethod
    def build(cls, n, m2, eta, theta, chi=0.0, phi=0.0, psi=0.0) -> "ExperimentConfig":
        return cls(n, m2, eta, Rotation(theta, phi, psi), chi)

    @classmethod
    def from_ports(cls, n1, n2, eta, theta, chi=0.0) -> "ExperimentConfig":
        if n1 < 0 or n2 < 0:
            raise ValueError("port occupations must be nonnegative")
        return cls.build(n1 + n2, n1 - n2, eta, theta, chi)

    @property
    def n1(self) -> int:
        return (self.n + self.m2) // 2

    @property
    def n2(self) -> int:
        return (self.n - self.m2) // 2

    @property
    def theta(self) -> float:
        return self.rotation.theta

    @property
    def gram(self) -> GramMatrix:
        return GramMatrix(self.eta, self.chi)

    def spins(self) -> np.ndarray:
        """Doubled spins ``|m| <= j <= n/2`` of the open channels."""
        return np.arange(abs(self.m2), self.n + 1, 2)

    def imbalances(self) -> np.ndarray:
        """Doubled output imbalances ``-n/2 .. n/2``."""
        return np.arange(-self.n, self.n + 1, 2)

    def as_dict(self) -> dict:
        return {
            "n": self.n, "m_twice": self.m2, "n1": self.n1, "n2": self.n2,
            "eta": self.eta, "chi": self.chi, "theta": self.rotation.theta,
            "phi": self.rotation.phi, "psi": self.rotation.psi,
        }


@dataclass
class Distribution:
    """Probabilities on a grid of doubled half-integers."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.support.shape != self.probs.shape:
            raise ValueError("support and probs differ in shape")
        if np.any(np.diff(self.support) <= 0):
            raise ValueError("support must be strictly increasing")

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.total - 1.0) <= tol and bool(np.all(self.probs >= 0))

    def mean(self) -> float:
        """Mean of the half-integer variable (not the doubled one)."""
        return math.fsum(0.5 * self.support * self.probs) / self.total

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum((0.5 * self.support - mu) ** 2 * self.probs) / self.total

    def __getitem__(self, twice_value: int) -> float:
        idx = np.searchsorted(self.support, twice_value)
        if idx < self.support.size and self.support[idx] == twice_value:
            return float(self.probs[idx])
        return 0.0


@dataclass
class ChannelTable:
    config: ExperimentConfig
    spins: np.ndarray
    probs: np.ndarray

    def argmax(self) -> int:
        """Doubled spin of the most probable channel."""
        return int(self.spins[np.argmax(self.probs)])

    def as_distribution(self) -> Distribution:
        return Distribution(self.spins, self.probs)

    def __iter__(self):
        return iter(zip(self.spins.tolist(), self.probs.tolist()))


def log_channel_probability(j2, cfg: ExperimentConfig):
    """ln p(j|m), vectorized over doubled spins; ``-inf`` for closed channels."""
    j2 = np.atleast_1d(np.asarray(j2, dtype=np.int64))
    out = np.full(j2.shape, -np.inf)
    ok = (j2 >= abs(cfg.m2)) & (j2 <= cfg.n) & ((j2 - cfg.n) % 2 == 0)
    base = -log_binomial(cfg.n, cfg.n1)
    for i in np.flatnonzero(ok):
        jj = int(j2[i])
        out[i] = (log_multiplicity(jj, cfg.n) + base
                  + log_gl2_diag_element(jj, cfg.n, cfg.m2, cfg.gram))
    return out


def channel_probability(j2, cfg: ExperimentConfig) -> float:
    """Probability that the photons pass through the spin-j channel."""
    return float(np.exp(log_channel_probability(twice(j2), cfg)[0]))


def channel_table(cfg: ExperimentConfig) -> ChannelTable:
    spins = cfg.spins()
    probs = np.exp(log_channel_probability(spins, cfg))
    return ChannelTable(cfg, spins, probs)


@lru_cache(maxsize=4096)
def _column(j2: int, m2: int, theta: float) -> np.ndarray:
    col = wigner_d_column(j2, m2, theta)
    col = col * col
    col.setflags(write=False)
    return col


def channel_oid_column(j2: int, cfg: ExperimentConfig) -> np.ndarray:
    """``p(m'|j,m)`` on the full grid ``cfg.imbalances()`` (zeros where ``|m'| > j``)."""
    j2 = twice(j2)
    out = np.zeros(cfg.n + 1)
    if j2 < abs(cfg.m2) or j2 > cfg.n or (j2 - cfg.n) % 2:
        return out
    off = (cfg.n - j2) // 2
    out[off: off + j2 + 1] = _column(j2, cfg.m2, float(cfg.theta))
    return out


def channel_oid(mp2, j2, cfg: ExperimentConfig) -> float:
    mp2, j2 = twice(mp2), twice(j2)
    if (mp2 - cfg.n) % 2:
        raise ValueError(f"parity mismatch: 2m'={mp2}, n={cfg.n}")
    if j2 < max(abs(cfg.m2), abs(mp2)) or j2 > cfg.n:
        return 0.0
    return float(_column(j2, cfg.m2, float(cfg.theta))[(mp2 + j2) // 2])


def oid(cfg: ExperimentConfig, fast: bool = False) -> Distribution:
    """Output imbalance distribution ``p(m'|m)`` on every ``m'`` of matching parity.

    Channels are accumulated in increasing ``j``.  With ``fast=True`` channels
    below ``1e-16`` of the largest weight are skipped.
    """
    table = channel_table(cfg)
    probs = np.zeros(cfg.n + 1)
    cutoff = FAST_CUTOFF * table.probs.max() if fast else -1.0
    for j2, pj in zip(table.spins, table.probs):
        if pj == 0.0 or pj < cutoff:
            continue
        probs += pj * channel_oid_column(int(j2), cfg)
    return Distribution(cfg.imbalances(), probs)


def bsc_oid(cfg: ExperimentConfig) -> Distribution:
    """OID of fully distinguishable photons (``eta`` is ignored).

    ``n1' = k1 + k2`` with ``k1 ~ Bin(n1, 1-f)`` and ``k2 ~ Bin(n2, f)``,
    ``f = sin(theta/2)**2``.
    """
    f = cfg.rotation.reflectivity
    k1 = np.exp(log_binomial_pmf(np.arange(cfg.n1 + 1), cfg.n1, 1.0 - f))
    k2 = np.exp(log_binomial_pmf(np.arange(cfg.n2 + 1), cfg.n2, f))
    conv = np.convolve(np.atleast_1d(k1), np.atleast_1d(k2))
    # n1' = 0..n  <->  2m' = 2 n1' - n
    return Distribution(cfg.imbalances(), conv)


def classical_imbalance(phi, cfg: ExperimentConfig):
    """Output imbalance of two classical waves with relative phase ``phi``."""
    m = cfg.m2 / 2
    amp = cfg.eta * math.sqrt(cfg.n**2 / 4 - m**2) * math.sin(cfg.theta)
    return m * math.cos(cfg.theta) + amp * np.cos(np.asarray(phi) - cfg.chi)


def classical_oid_density(mp_bar, cfg: ExperimentConfig):
    """Density of ``m'/n`` when the relative phase is uniformly random.

    Arcsine law ``1 / (pi sqrt(A^2 - (x - c)^2))`` with ``c = (m/n) cos(theta)``
    and ``A = eta sqrt(1/4 - (m/n)^2) |sin(theta)|``; zero outside ``(c-A, c+A)``.
    Per unit of unscaled ``m'`` divide by ``n``.
    """
    mbar = cfg.m2 / (2 * cfg.n)
    center = mbar * math.cos(cfg.theta)
    amp_sq = cfg.eta**2 * (0.25 - mbar**2) * math.sin(cfg.theta) ** 2
    x = np.asarray(mp_bar, dtype=float)
    radicand = amp_sq - (x - center) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(radicand > 0, 1.0 / (math.pi * np.sqrt(radicand)), 0.0)
    return float(out) if out.ndim == 0 else out
