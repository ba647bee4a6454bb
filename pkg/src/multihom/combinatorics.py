"""Exact half-integer bookkeeping and log-domain combinatorics.

Spin labels ``j`` and imbalances ``m`` are half-integral whenever the photon
number is odd, so every public function in this package takes them as
*doubled* integers (``j2 = 2*j``, ``m2 = 2*m``).  Floating point indices are
never used.

Binomials at a few hundred photons overflow doubles, so everything here is
expressed through logarithms; :func:`signed_log_sum` handles sums whose terms
alternate in sign.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

__all__ = [
    "HalfIndex",
    "SignedLogValue",
    "twice",
    "check_spin",
    "check_imbalance",
    "log_factorial",
    "log_binomial",
    "log_binomial_row",
    "multiplicity",
    "log_multiplicity",
    "binary_relative_entropy",
    "log_binomial_pmf",
    "signed_log_sum",
]

LOG_ZERO = float("-inf")


@dataclass(frozen=True, order=True)
class HalfIndex:
    """A half-integer stored exactly as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or isinstance(self.twice, bool):
            raise TypeError(f"twice must be an integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def from_value(cls, value: float) -> "HalfIndex":
        t = 2 * value
        if t != round(t):
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(round(t)))

    @property
    def value(self) -> float:
        return self.twice / 2

    def __int__(self):
        return self.twice

    def __index__(self):
        return self.twice

    def __str__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


def twice(x) -> int:
    """Doubled integer of ``x`` (an ``int`` already doubled, or a :class:`HalfIndex`)."""
    if isinstance(x, HalfIndex):
        return x.twice
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    raise TypeError(f"expected a doubled integer or HalfIndex, got {x!r}")


def check_spin(j2: int, n: int) -> None:
    """Raise ``ValueError`` unless ``0 <= 2j <= n`` with ``2j = n (mod 2)``."""
    if n < 0:
        raise ValueError(f"photon number must be nonnegative, got n={n}")
    if not 0 <= j2 <= n:
        raise ValueError(f"spin 2j={j2} outside [0, n={n}]")
    if (j2 - n) % 2:
        raise ValueError(f"parity mismatch: 2j={j2} and n={n}")


def check_imbalance(m2: int, n: int) -> None:
    if abs(m2) > n:
        raise ValueError(f"imbalance 2m={m2} outside [-n, n] for n={n}")
    if (m2 - n) % 2:
        raise ValueError(f"parity mismatch: 2m={m2} and n={n}")


class SignedLogValue(NamedTuple):
    """``sign * exp(log_abs)``; ``sign == 0`` encodes an exact zero."""

    sign: int
    log_abs: float

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return cls(0, LOG_ZERO)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def __float__(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


# ---------------------------------------------------------------------------
# log factorials

_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


class _LogFactorialTable:
    """Lazily grown table of ln k!, shared by the whole process."""

    def __init__(self, cap: int = 10**6):
        self.cap = cap
        self._table = np.zeros(1)
        self._lock = threading.Lock()

    def ensure(self, kmax: int) -> np.ndarray:
        if kmax >= self._table.size:
            with self._lock:
                if kmax >= self._table.size:
                    size = min(max(2 * kmax, 1024), self.cap) + 1
                    self._table = gammaln(np.arange(size, dtype=float) + 1.0)
        return self._table


_LOG_FACT = _LogFactorialTable()


def _stirling(k):
    k = np.asarray(k, dtype=float)
    inv = 1.0 / k
    inv2 = inv * inv
    series = inv * (_STIRLING[0] + inv2 * (_STIRLING[1] + inv2 * (_STIRLING[2] + inv2 * _STIRLING[3])))
    return (k + 0.5) * np.log(k) - k + _HALF_LOG_2PI + series


def _log_factorial_scalar(k: int) -> float:
    if k < 0:
        raise ValueError("log_factorial of a negative integer")
    if k > _LOG_FACT.cap:
        return float(_stirling(k))
    return float(_LOG_FACT.ensure(k)[k])


def log_factorial(k):
    """ln(k!) for a nonnegative integer or integer array.

    Values up to ``10**6`` come from a memo table; larger arguments use the
    Stirling series, which is exact to double precision there.
    """
    if isinstance(k, (int, np.integer)):
        return _log_factorial_scalar(int(k))
    arr = np.asarray(k)
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("log_factorial needs integer arguments")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValueError("log_factorial of a negative integer")
    cap = _LOG_FACT.cap
    if arr.ndim == 0:
        kk = int(arr)
        if kk > cap:
            return float(_stirling(kk))
        return float(_LOG_FACT.ensure(kk)[kk])
    if arr.size == 0:
        return np.zeros(arr.shape)
    big = arr > cap
    table = _LOG_FACT.ensure(int(min(arr.max(), cap)))
    out = table[np.minimum(arr, cap)]
    if np.any(big):
        out = np.where(big, _stirling(np.maximum(arr, 1)), out)
    return out


def log_binomial_row(n: int, k: np.ndarray) -> np.ndarray:
    """ln C(n, k) for a fixed ``n`` and an integer array ``k`` inside ``[0, n]``."""
    if n > _LOG_FACT.cap:
        return log_binomial(n, k)
    table = _LOG_FACT.ensure(n)
    return table[n] - (table[k] + table[n - k])


def log_binomial(n, k):
    """ln C(n, k); ``-inf`` when ``k`` lies outside ``[0, n]`` (an empty term)."""
    # adding the two denominators first makes C(n,k) and C(n,n-k) bit-identical
    if isinstance(n, (int, np.integer)) and isinstance(k, (int, np.integer)):
        n, k = int(n), int(k)
        if not 0 <= k <= n:
            return LOG_ZERO
        lf = _log_factorial_scalar
        return lf(n) - (lf(k) + lf(n - k))
    n_arr = np.asarray(n, dtype=np.int64)
    k_arr = np.asarray(k, dtype=np.int64)
    n_b, k_b = np.broadcast_arrays(n_arr, k_arr)
    valid = (k_b >= 0) & (k_b <= n_b)
    kk = np.where(valid, k_b, 0)
    nn = np.where(valid, n_b, 0)
    out = log_factorial(nn) - (log_factorial(kk) + log_factorial(nn - kk))
    out = np.where(valid, out, LOG_ZERO)
    if out.ndim == 0:
        return float(out)
    return out


def multiplicity(j2: int, n: int) -> int:
    """Dimension of the permutation-group irrep paired with spin j in n spin-1/2s.

    Hook-length count ``C(n, n/2+j) (2j+1) / (n/2+j+1)``, exact integer.
    """
    j2 = twice(j2)
    check_spin(j2, n)
    upper = (n + j2) // 2
    num = math.comb(n, upper) * (j2 + 1)
    q, r = divmod(num, upper + 1)
    assert r == 0
    return q


def log_multiplicity(j2, n: int):
    """Natural log of :func:`multiplicity`, vectorized over ``j2``."""
    if isinstance(j2, (int, np.integer)):
        j2 = int(j2)
        if not 0 <= j2 <= n or (j2 - n) % 2:
            raise ValueError(f"invalid spin 2j={j2} for n={n}")
        upper = (n + j2) // 2
        return log_binomial(n, upper) + math.log(j2 + 1.0) - math.log(upper + 1.0)
    j2 = np.asarray(j2, dtype=np.int64)
    if np.any((j2 < 0) | (j2 > n) | ((j2 - n) % 2 != 0)):
        raise ValueError(f"invalid spin(s) 2j={j2} for n={n}")
    upper = (n + j2) // 2
    out = log_binomial(n, upper) + np.log(j2 + 1.0) - np.log(upper + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def binary_relative_entropy(kbar, p):
    """D(kbar || p) between Bernoulli laws, with ``0 ln 0 = 0``.

    Returns ``+inf`` when ``p`` sits on the boundary but ``kbar`` does not.
    """
    kbar = np.asarray(kbar, dtype=float)
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (xlogy(kbar, kbar) - xlogy(kbar, p)
               + xlog1py(1 - kbar, -kbar) - xlog1py(1 - kbar, -p))
    out = np.where(np.isnan(out), np.inf, out)
    # rounding can leave a tiny negative number at kbar == p
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _stirling_error(k):
    """``ln k! - [(k + 1/2) ln k - k + ln sqrt(2 pi)]`` for integer ``k >= 1``."""
    k = np.asarray(k, dtype=float)
    small = k <= 15
    out = np.empty_like(k)
    if np.any(small):
        ks = k[small]
        out[small] = gammaln(ks + 1.0) - (ks + 0.5) * np.log(ks) + ks - _HALF_LOG_2PI
    if np.any(~small):
        kb = k[~small]
        inv = 1.0 / kb
        inv2 = inv * inv
        out[~small] = inv * (_STIRLING[0] + inv2 * (_STIRLING[1] + inv2 * (_STIRLING[2] + inv2 * _STIRLING[3])))
    return out


def _deviance(x, mu):
    """``x ln(x/mu) + mu - x`` without cancellation when ``x`` is close to ``mu``."""
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = x / mu
        out = xlogy(x, ratio) + mu - x
        # the ratio overflows for tiny mu although the log is still finite
        huge = np.isinf(ratio) & (mu > 0)
        if np.any(huge):
            out = np.where(huge, x * (np.log(x) - np.log(mu)) + mu - x, out)
        close = np.abs(x - mu) < 0.1 * (x + mu)
        v = np.where(close, (x - mu) / (x + mu), 0.0)
    if np.any(close):
        # x ln(x/mu) + mu - x = (x - mu) v + 2 x sum_{i>=1} v^(2i+1)/(2i+1)
        v2 = v * v
        term = 2 * x * v
        acc = (x - mu) * v
        for i in range(1, 16):
            term = term * v2
            acc = acc + term / (2 * i + 1)
        out = np.where(close, acc, out)
    return out


def log_binomial_pmf(k, n, p):
    """ln of ``C(n,k) p^k (1-p)^(n-k)``; ``-inf`` outside the support.

    Interior values use the saddle-point form (Stirling remainders plus
    deviances) so the result is accurate relative to itself rather than to
    ``ln n!``.
    """
    k_arr = np.asarray(k, dtype=np.int64)
    n_arr = np.asarray(n, dtype=np.int64)
    p = float(p)
    k_b, n_b = np.broadcast_arrays(k_arr, n_arr)
    out = np.full(k_b.shape, LOG_ZERO)
    valid = (k_b >= 0) & (k_b <= n_b)
    q = 1.0 - p
    with np.errstate(divide="ignore"):
        edge_lo = valid & (k_b == 0)
        edge_hi = valid & (k_b == n_b) & ~edge_lo
        out[edge_lo] = n_b[edge_lo] * np.log1p(-p) if p < 1 else np.where(n_b[edge_lo] == 0, 0.0, LOG_ZERO)
        out[edge_hi] = n_b[edge_hi] * np.log(p) if p > 0 else LOG_ZERO
    inner = valid & (k_b > 0) & (k_b < n_b)
    if np.any(inner) and 0.0 < p < 1.0:
        kk = k_b[inner].astype(float)
        nn = n_b[inner].astype(float)
        out[inner] = (_stirling_error(nn) - _stirling_error(kk) - _stirling_error(nn - kk)
                      - _deviance(kk, nn * p) - _deviance(nn - kk, nn * q)
                      + 0.5 * np.log(nn / (2 * math.pi * kk * (nn - kk))))
    return float(out) if out.ndim == 0 else out


def signed_log_sum(terms: Iterable[SignedLogValue]) -> tuple[SignedLogValue, float]:
    """Sum signed log-domain values.

    Terms are shifted by the largest log-magnitude and accumulated with
    :func:`math.fsum`, so the only error left is the rounding of each shifted
    term.  The second return value is the cancellation indicator
    ``|sum| / max|term|`` (1 for same-sign sums, 0 on exact cancellation);
    when it is small the result carries correspondingly fewer digits.
    """
    terms = [t for t in terms if t[0] != 0 and t[1] != LOG_ZERO]
    if not terms:
        return SignedLogValue(0, LOG_ZERO), 0.0
    top = max(t[1] for t in terms)
    if math.isinf(top):
        raise OverflowError("infinite term in signed_log_sum")
    total = math.fsum(s * math.exp(lg - top) for s, lg in terms)
    if total == 0.0:
        return SignedLogValue(0, LOG_ZERO), 0.0
    return SignedLogValue(1 if total > 0 else -1, top + math.log(abs(total))), abs(total)
