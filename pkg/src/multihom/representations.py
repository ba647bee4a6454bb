"""SU(2) and GL(2, C) representation matrix elements.

Conventions
-----------
Index 1 of the two-dimensional space is spin up (``m = +1/2``).  The spin-j
matrix of a 2x2 matrix ``g`` is the homogeneous polynomial

    D^j_{m'm}(g) = sqrt((j+m)!(j-m)!(j+m')!(j-m')!)
                   * sum_x g11^(j+m'-x) g12^x g21^(m-m'+x) g22^(j-m-x)
                           / ((j+m'-x)! x! (m-m'+x)! (j-m-x)!)

so that ``D^(1/2)(g) == g``.  Rotations are ``exp(-i theta sigma_y / 2)``,
which gives the usual Wigner small-d signs, e.g. ``d^1_{1,0} = -sin(theta)/sqrt(2)``.
A 50:50 beam splitter is ``theta = pi/2``; the single-photon reflectivity is
``sin(theta/2)**2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import xlogy

from .combinatorics import (
    LOG_ZERO,
    SignedLogValue,
    check_spin,
    log_binomial,
    log_binomial_row,
    log_factorial,
    signed_log_sum,
    twice,
)

__all__ = [
    "Rotation",
    "GramMatrix",
    "OccupationMatrix",
    "rotation_matrix",
    "wigner_d_column",
    "wigner_small_d",
    "wigner_small_d_sum",
    "terminating_2f1",
    "gl2_diag_element",
    "log_gl2_diag_element",
    "gl2_element",
    "louck_coefficient",
]

# estimated relative error above which the float log-domain sum is replaced
# by exact integer accumulation
_EXACT_FALLBACK = 1e-11
_RESCALE = 1e150
# below this |sin(theta)| the column comes from the terminating sum
_TINY_SIN = 1e-100
# |cos| of the double nearest pi/2 is 6.1e-17; its neighbours exceed 1.6e-16
_HALF_PI_COS = 1e-16


@dataclass(frozen=True)
class Rotation:
    """Euler angles of ``exp(-i phi Z/2) exp(-i theta Y/2) exp(-i psi Z/2)``."""

    theta: float
    phi: float = 0.0
    psi: float = 0.0

    @classmethod
    def from_reflectivity(cls, r: float) -> "Rotation":
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"reflectivity must lie in [0, 1], got {r}")
        return cls(2.0 * math.asin(math.sqrt(r)))

    @property
    def reflectivity(self) -> float:
        return math.sin(self.theta / 2) ** 2

    def matrix(self) -> np.ndarray:
        rz = lambda a: np.diag([cmath.exp(-0.5j * a), cmath.exp(0.5j * a)])
        return rz(self.phi) @ rotation_matrix(self.theta) @ rz(self.psi)


@dataclass(frozen=True)
class GramMatrix:
    """Inner-mode Gram matrix ``B^dagger B`` with overlap ``eta * exp(-i chi)``."""

    eta: float
    chi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")

    def matrix(self) -> np.ndarray:
        off = self.eta * cmath.exp(-1j * self.chi)
        return np.array([[1.0, off], [off.conjugate(), 1.0]])

    def det(self) -> float:
        return 1.0 - self.eta**2


@dataclass(frozen=True)
class OccupationMatrix:
    """Joint counts ``w[a][b]`` of symbol pairs; rows are the first register."""

    w11: int
    w12: int
    w21: int
    w22: int

    def __post_init__(self):
        if min(self.w11, self.w12, self.w21, self.w22) < 0:
            raise ValueError("occupations must be nonnegative")

    @classmethod
    def from_sequences(cls, s, sp) -> "OccupationMatrix":
        """Joint type of two sequences over ``{1, 2}``."""
        if len(s) != len(sp):
            raise ValueError("sequences differ in length")
        counts = {(a, b): 0 for a in (1, 2) for b in (1, 2)}
        for a, b in zip(s, sp):
            counts[a, b] += 1
        return cls(counts[1, 1], counts[1, 2], counts[2, 1], counts[2, 2])

    @property
    def n(self) -> int:
        return self.w11 + self.w12 + self.w21 + self.w22

    def as_array(self) -> np.ndarray:
        return np.array([[self.w11, self.w12], [self.w21, self.w22]])

    def row_sums(self) -> tuple[int, int]:
        return self.w11 + self.w12, self.w21 + self.w22

    def col_sums(self) -> tuple[int, int]:
        return self.w11 + self.w21, self.w12 + self.w22


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------------------
# Wigner small-d

def _special_angle(j2, m2, theta):
    """Column for sin(theta) == 0, or None."""
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    col = np.zeros(j2 + 1)
    if s == 0.0:
        col[(m2 + j2) // 2] = 1.0 if c > 0 else (-1.0) ** j2
        return col
    if c == 0.0:
        # d^j_{m'm}(pi) = (-1)^(j+m') delta_{m',-m}, times sign(s)^(2j)
        mp2 = -m2
        sign = (-1) ** ((j2 + mp2) // 2)
        if s < 0:
            sign *= (-1) ** j2
        col[(mp2 + j2) // 2] = sign
        return col
    return None


def wigner_d_column(j2: int, m2: int, theta: float) -> np.ndarray:
    """All ``d^j_{m'm}(theta)`` for ``m' = -j .. j`` (index ``(m'+j)``).

    Three-term recurrence in ``m'`` from the eigen-equation
    ``(cos(theta) J_z + sin(theta) J_x) v = m v``.  It is run inward from both
    edges, where the wanted solution grows, and the two halves are matched by
    least squares on an overlap around ``m cos(theta)``.  The result is
    normalized by column unitarity; its sign is fixed by ``d^j_{-j,m}``.
    """
    j2, m2 = twice(j2), twice(m2)
    if j2 < 0 or abs(m2) > j2 or (j2 - m2) % 2:
        raise ValueError(f"invalid (2j, 2m) = ({j2}, {m2})")
    special = _special_angle(j2, m2, theta)
    if special is not None:
        return special
    size = j2 + 1
    if size == 1:
        return np.ones(1)
    j = j2 / 2
    m = m2 / 2
    mp = -j + np.arange(size)
    ct, st = math.cos(theta), math.sin(theta)
    if abs(st) < _TINY_SIN:
        # one recurrence step would gain ~1/sin(theta)
        return _tiny_angle_column(j2, m2, theta)
    # cos(theta) m' - m must be accurate relative to sin(theta), the scale of
    # the off-diagonals, so avoid 1 -+ cos(theta) cancellations near 0 and pi
    if ct > 0.5:
        diag = (mp - m) - 2.0 * math.sin(theta / 2) ** 2 * mp
    elif ct < -0.5:
        diag = -(mp + m) + 2.0 * math.cos(theta / 2) ** 2 * mp
    else:
        if abs(ct) < _HALF_PI_COS:
            # the double nearest pi/2 stands for a 50:50 splitter
            ct = 0.0
        diag = ct * mp - m
    # up[k] couples v[k+1] into row k, down[k] couples v[k-1]
    up = 0.5 * st * np.sqrt((j - mp) * (j + mp + 1))
    down = 0.5 * st * np.sqrt((j + mp) * (j - mp + 1))

    sh, ch = math.sin(theta / 2), math.cos(theta / 2)
    # sign of d^j_{-j,m} = s^(j+m) c^(j-m)
    start_sign = 1.0
    if sh < 0 and ((j2 + m2) // 2) % 2:
        start_sign = -start_sign
    if ch < 0 and ((j2 - m2) // 2) % 2:
        start_sign = -start_sign

    center = min(max(int(round(m * ct + j)), 0), size - 1)
    lo = max(center - 1, 0)
    hi = min(center + 1, size - 1)

    fwd = np.zeros(hi + 1)
    fwd[0] = start_sign
    for k in range(hi):
        prev = fwd[k - 1] if k > 0 else 0.0
        fwd[k + 1] = -(diag[k] * fwd[k] + down[k] * prev) / up[k]
        if abs(fwd[k + 1]) > _RESCALE:
            fwd[: k + 2] /= _RESCALE

    bwd = np.zeros(size)
    bwd[size - 1] = 1.0
    for k in range(size - 1, lo, -1):
        nxt = bwd[k + 1] if k < size - 1 else 0.0
        bwd[k - 1] = -(diag[k] * bwd[k] + up[k] * nxt) / down[k]
        if abs(bwd[k - 1]) > _RESCALE:
            bwd[k - 1:] /= _RESCALE

    # bring both halves to O(1) before any products
    fwd /= np.abs(fwd).max()
    bwd /= np.abs(bwd).max()
    a = fwd[lo: hi + 1]
    b = bwd[lo: hi + 1]
    scale = float(a @ b) / float(b @ b)
    # each sweep is kept only on its own side, where it grows
    col = np.empty(size)
    col[:center] = fwd[:center]
    col[center:] = scale * bwd[center:]
    col /= np.abs(col).max()
    col /= math.sqrt(math.fsum(col * col))
    return col


def _tiny_angle_column(j2, m2, theta):
    """Column when sin(theta/2) or cos(theta/2) is below ~1e-100.

    Only the term with the lowest power of the tiny factor survives; the next
    one is smaller by its square.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    mp2 = np.arange(-j2, j2 + 1, 2)
    jp_m, jm_m = (j2 + m2) // 2, (j2 - m2) // 2
    jp_mp = (j2 + mp2) // 2
    dm = (m2 - mp2) // 2
    if abs(s) < abs(c):
        x = np.maximum(0, -dm)
    else:
        x = np.minimum(jp_mp, jm_m)
    pc = jp_mp + jm_m - 2 * x
    ps = 2 * x + dm
    with np.errstate(divide="ignore"):
        lg = (0.5 * (log_factorial(jp_m) + log_factorial(jm_m)
                     + log_factorial(jp_mp) + log_factorial(j2 - jp_mp))
              - log_factorial(jp_mp - x) - log_factorial(x)
              - log_factorial(dm + x) - log_factorial(jm_m - x)
              + xlogy(pc, abs(c)) + xlogy(ps, abs(s)))
    sign = np.where(x % 2, -1.0, 1.0)
    if c < 0:
        sign = np.where(pc % 2, -sign, sign)
    if s < 0:
        sign = np.where(ps % 2, -sign, sign)
    return sign * np.exp(lg)


def wigner_small_d(j2: int, mp2: int, m2: int, theta: float, method: str = "recurrence") -> float:
    """Wigner small-d element ``d^j_{m'm}(theta)``; zero when ``|m|`` or ``|m'|`` exceeds ``j``."""
    j2, mp2, m2 = twice(j2), twice(mp2), twice(m2)
    if abs(m2) > j2 or abs(mp2) > j2:
        return 0.0
    if (j2 - m2) % 2 or (j2 - mp2) % 2:
        raise ValueError(f"parity mismatch among 2j={j2}, 2m'={mp2}, 2m={m2}")
    if method == "recurrence":
        return float(wigner_d_column(j2, m2, theta)[(mp2 + j2) // 2])
    if method == "sum":
        return wigner_small_d_sum(j2, mp2, m2, theta)
    raise ValueError(f"unknown method {method!r}")


def _sum_range(j2, mp2, m2):
    jp_m = (j2 + m2) // 2      # j+m
    jm_m = (j2 - m2) // 2      # j-m
    jp_mp = (j2 + mp2) // 2    # j+m'
    dm = (m2 - mp2) // 2       # m-m'
    xlo = max(0, -dm)
    xhi = min(jp_mp, jm_m)
    return jp_m, jm_m, jp_mp, dm, xlo, xhi


def wigner_small_d_sum(j2: int, mp2: int, m2: int, theta: float) -> float:
    """Terminating-sum evaluator of ``d^j_{m'm}(theta)``.

    The alternating sum is accumulated in the signed log domain.  When the
    cancellation indicator and the size of the log-magnitudes leave fewer than
    ~11 reliable digits, the same sum is redone with exact integer arithmetic
    on the binary values of ``cos(theta/2)`` and ``sin(theta/2)``.
    """
    j2, mp2, m2 = twice(j2), twice(mp2), twice(m2)
    if abs(m2) > j2 or abs(mp2) > j2:
        return 0.0
    jp_m, jm_m, jp_mp, dm, xlo, xhi = _sum_range(j2, mp2, m2)
    jm_mp = j2 - jp_mp
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    # factors: c^(j+m'-x) (-s)^x s^(m-m'+x) c^(j-m-x)
    lc = math.log(abs(c)) if c != 0 else LOG_ZERO
    ls = math.log(abs(s)) if s != 0 else LOG_ZERO
    prefactor = 0.5 * (log_factorial(jp_m) + log_factorial(jm_m)
                       + log_factorial(jp_mp) + log_factorial(jm_mp))
    terms, scales = [], []
    for x in range(xlo, xhi + 1):
        pc = jp_mp - x + jm_m - x
        ps = x + dm + x
        if (pc and c == 0) or (ps and s == 0):
            continue
        sign = -1 if x % 2 else 1
        if c < 0 and pc % 2:
            sign = -sign
        if s < 0 and ps % 2:
            sign = -sign
        pow_c = pc * lc if pc else 0.0
        pow_s = ps * ls if ps else 0.0
        denom = (log_factorial(jp_mp - x) + log_factorial(x)
                 + log_factorial(dm + x) + log_factorial(jm_m - x))
        terms.append(SignedLogValue(sign, prefactor + pow_c + pow_s - denom))
        scales.append(1.0 + prefactor + abs(pow_c) + abs(pow_s) + denom)
    total, indicator = signed_log_sum(terms)
    if not terms:
        return 0.0
    # each term carries ~eps * (sum of |log pieces|) relative error, weighted by its size
    top = max(t.log_abs for t in terms)
    spread = math.fsum(math.exp(t.log_abs - top) * sc for t, sc in zip(terms, scales))
    if indicator > 0 and 1e-15 * spread / indicator < _EXACT_FALLBACK:
        return float(total)
    return _wigner_sum_exact(j2, mp2, m2, c, s)


def _wigner_sum_exact(j2, mp2, m2, c, s):
    jp_m, jm_m, jp_mp, dm, xlo, xhi = _sum_range(j2, mp2, m2)
    # c = C / 2^e and s = S / 2^e exactly
    fc, fs = Fraction(c), Fraction(s)
    den = max(fc.denominator, fs.denominator)
    cn = fc.numerator * (den // fc.denominator)
    sn = fs.numerator * (den // fs.denominator)
    acc = 0
    for x in range(xlo, xhi + 1):
        coeff = math.comb(jp_m, jp_mp - x) * math.comb(jm_m, x)
        term = coeff * cn ** (jp_mp + jm_m - 2 * x) * sn ** (2 * x + dm)
        acc += -term if x % 2 else term
    # d = sqrt((j+m')!(j-m')!/((j+m)!(j-m)!)) * acc / den^(2j)
    if acc == 0:
        return 0.0
    log_ratio = 0.5 * (log_factorial(jp_mp) + log_factorial(j2 - jp_mp)
                       - log_factorial(jp_m) - log_factorial(jm_m))
    sign = 1 if acc > 0 else -1
    # den is a power of two: split acc / den^(2j) into a 64-bit mantissa and
    # an exact binary exponent so no large logs are subtracted
    mag = abs(acc)
    shift = max(mag.bit_length() - 64, 0)
    exponent = shift - j2 * (den.bit_length() - 1)
    log_acc = math.log(mag >> shift) + exponent * _LN2
    return sign * math.exp(log_acc + log_ratio)


_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# GL(2) elements

def terminating_2f1(j2: int, m2: int, eta_sq: float) -> SignedLogValue:
    """``2F1(-j-m, -j+m; 1; eta^2) = sum_x C(j+m, x) C(j-m, x) eta^(2x)``.

    All terms are positive; accumulated by log-sum-exp.
    """
    j2, m2 = twice(j2), twice(m2)
    if abs(m2) > j2 or (j2 - m2) % 2:
        raise ValueError(f"invalid (2j, 2m) = ({j2}, {m2})")
    if not 0.0 <= eta_sq <= 1.0:
        raise ValueError(f"eta_sq must lie in [0, 1], got {eta_sq}")
    a, b = (j2 + m2) // 2, (j2 - m2) // 2
    x = np.arange(min(a, b) + 1)
    with np.errstate(divide="ignore"):
        logs = log_binomial_row(a, x) + log_binomial_row(b, x) + xlogy(x, eta_sq)
    top = logs.max()
    return SignedLogValue(1, float(top + math.log(math.fsum(np.exp(logs - top)))))


def log_gl2_diag_element(j2: int, n: int, m2: int, gram: GramMatrix) -> float:
    """ln of the diagonal GL(2) element of the inner-mode Gram matrix.

    ``(1-eta^2)^(n/2-j) 2F1(-j-m, -j+m; 1; eta^2)`` with ``0^0 = 1``; ``-inf``
    for a vanishing element.  The phase ``chi`` never enters.
    """
    j2, m2 = twice(j2), twice(m2)
    check_spin(j2, n)
    eta_sq = gram.eta**2
    power = (n - j2) // 2
    with np.errstate(divide="ignore"):
        det_part = float(xlogy(power, 1.0 - eta_sq))
    return det_part + terminating_2f1(j2, m2, eta_sq).log_abs


def gl2_diag_element(j2: int, n: int, m2: int, gram: GramMatrix) -> float:
    return math.exp(log_gl2_diag_element(j2, n, m2, gram))


def _poly_element(j2, mp2, m2, g):
    """Polynomial expansion of ``D^j_{m'm}(g)`` for a complex 2x2 ``g``."""
    jp_m, jm_m, jp_mp, dm, xlo, xhi = _sum_range(j2, mp2, m2)
    jm_mp = j2 - jp_mp
    prefactor = 0.5 * (log_factorial(jp_m) + log_factorial(jm_m)
                       + log_factorial(jp_mp) + log_factorial(jm_mp))
    g11, g12, g21, g22 = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    logs, phases = [], []
    for x in range(xlo, xhi + 1):
        powers = ((g11, jp_mp - x), (g12, x), (g21, dm + x), (g22, jm_m - x))
        lg = prefactor - (log_factorial(jp_mp - x) + log_factorial(x)
                          + log_factorial(dm + x) + log_factorial(jm_m - x))
        phase = 1.0 + 0.0j
        for z, k in powers:
            if k == 0:
                continue
            if z == 0:
                lg = LOG_ZERO
                break
            lg += k * math.log(abs(z))
            phase *= cmath.exp(1j * k * cmath.phase(z))
        if lg != LOG_ZERO:
            logs.append(lg)
            phases.append(phase)
    if not logs:
        return 0.0j
    top = max(logs)
    w = [p * math.exp(lg - top) for lg, p in zip(logs, phases)]
    return complex(math.fsum(z.real for z in w), math.fsum(z.imag for z in w)) * math.exp(top)


def gl2_element(j2: int, n: int, mp2: int, m2: int, g) -> complex:
    """``det(g)^(n/2-j) D^j_{m'm}(g)`` for an invertible complex 2x2 ``g``.

    Meant for moderate ``j``: the expansion alternates for general ``g``.
    """
    j2, mp2, m2 = twice(j2), twice(mp2), twice(m2)
    check_spin(j2, n)
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise ValueError("g must be 2x2")
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(det) == 0.0:
        raise ValueError("g is singular")
    if abs(m2) > j2 or abs(mp2) > j2:
        return 0.0j
    if (j2 - m2) % 2 or (j2 - mp2) % 2:
        raise ValueError("parity mismatch")
    return complex(det ** ((n - j2) // 2) * _poly_element(j2, mp2, m2, g))


def louck_coefficient(j2: int, n: int, m2: int, mp2: int, w: OccupationMatrix) -> float:
    """Coefficient ``C^{j,n}_{m'm}(W)`` of the monomial expansion

        det(g)^(n/2-j) D^j_{m'm}(g) = sum_W C(W) n!/prod(W_ab!) prod g_ab^W_ab

    where the rows of ``W`` sum to ``n/2 +- m'`` and the columns to
    ``n/2 +- m``.  Extracted with exact rational arithmetic (``n <= 30``).
    """
    j2, m2, mp2 = twice(j2), twice(m2), twice(mp2)
    check_spin(j2, n)
    if n > 30:
        raise ValueError("louck_coefficient is limited to n <= 30")
    if w.n != n:
        raise ValueError(f"occupations sum to {w.n}, expected n={n}")
    if w.row_sums() != ((n + mp2) // 2, (n - mp2) // 2) or w.col_sums() != ((n + m2) // 2, (n - m2) // 2):
        raise ValueError(f"occupation matrix {w} inconsistent with 2m'={mp2}, 2m={m2}")
    if abs(m2) > j2 or abs(mp2) > j2:
        return 0.0
    lam2 = (n - j2) // 2
    jp_m, jm_m, jp_mp, dm, xlo, xhi = _sum_range(j2, mp2, m2)
    # det^lam2 = sum_k C(lam2, k) (g11 g22)^(lam2-k) (-g12 g21)^k;  W12 = k + x
    total = Fraction(0)
    for k in range(lam2 + 1):
        x = w.w12 - k
        if not xlo <= x <= xhi:
            continue
        if (w.w11 != lam2 - k + jp_mp - x or w.w21 != k + dm + x
                or w.w22 != lam2 - k + jm_m - x):
            continue
        denom = (math.factorial(jp_mp - x) * math.factorial(x)
                 * math.factorial(dm + x) * math.factorial(jm_m - x))
        total += Fraction((-1) ** k * math.comb(lam2, k), denom)
    if total == 0:
        return 0.0
    weight = Fraction(math.factorial(n), math.prod(math.factorial(v) for v in
                                                   (w.w11, w.w12, w.w21, w.w22)))
    root = (math.factorial(jp_m) * math.factorial(jm_m)
            * math.factorial(jp_mp) * math.factorial(j2 - jp_mp))
    return float(total / weight) * math.sqrt(root)
