"""Brute-force first-quantized reference for small photon numbers.

States of ``n`` photons with a two-level port (P) and a two-level inner mode
(Q) are stored as ``2^n x 2^n`` amplitude matrices ``psi[s, s']`` over pairs
of binary sequences.  Sequence ``s`` is encoded as an integer whose bit
``n-1-k`` is 0 when the k-th symbol is 1 (spin up) and 1 when it is 2.

Everything here is dense and exponential in ``n``; it exists to certify the
fast formulas in :mod:`multihom.channels` and :mod:`multihom.representations`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import Distribution, ExperimentConfig
from .combinatorics import multiplicity, twice
from .representations import OccupationMatrix, louck_coefficient

__all__ = [
    "MAX_PHOTONS",
    "ResourceError",
    "StateVector",
    "SchurBasis",
    "inner_mode_map",
    "prepare_input",
    "evolve_and_measure",
    "clebsch_gordan_half",
    "schur_basis",
    "csb_state",
    "fock_state",
    "verify_x_matrix_element",
    "fock_csb_overlap",
    "entanglement_entropy",
]

MAX_PHOTONS = 12


class ResourceError(RuntimeError):
    """Raised when a dense computation would exceed the photon-number guard."""


def _guard(n, limit=MAX_PHOTONS):
    if n > limit:
        raise ResourceError(f"n={n} exceeds the dense-oracle limit of {limit}")


@dataclass
class StateVector:
    """Amplitudes ``psi[s, s']`` of ``sum psi(s, s') |s>_P |s'>_Q``."""

    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return int(round(math.log2(self.amplitudes.shape[0])))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def schmidt_coefficients(self) -> np.ndarray:
        """Squared Schmidt coefficients across the P/Q cut, descending."""
        sv = np.linalg.svd(self.amplitudes, compute_uv=False)
        return sv**2

    def permuted(self, perm) -> "StateVector":
        """Apply the same permutation of photon slots to P and Q."""
        n = self.n
        t = self.amplitudes.reshape((2,) * (2 * n))
        axes = list(perm) + [n + p for p in perm]
        return StateVector(t.transpose(axes).reshape(2**n, 2**n))


def sequence_index(seq) -> int:
    """Integer code of a sequence over ``{1, 2}``."""
    idx = 0
    for a in seq:
        if a not in (1, 2):
            raise ValueError(f"symbols must be 1 or 2, got {a!r}")
        idx = 2 * idx + (a - 1)
    return idx


def _popcounts(n):
    return np.array([bin(i).count("1") for i in range(2**n)])


def _apply_each(op, mat, n, axis):
    """Apply the 2x2 ``op`` to every photon of one register of ``mat``."""
    shape = (2,) * n + (mat.shape[1 - axis],)
    t = np.moveaxis(mat, axis, 0).reshape(shape)
    for k in range(n):
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [k])), 0, k)
    out = t.reshape(2**n, -1)
    return np.moveaxis(out, 0, axis)


def inner_mode_map(eta: float, chi: float = 0.0) -> np.ndarray:
    """A matrix ``B`` with ``B|1> = |Gamma_1>`` and ``B|2> = |Gamma_2>``.

    ``<Gamma_2|Gamma_1> = eta exp(i chi)``, so ``B^dagger B`` matches
    :class:`multihom.representations.GramMatrix`.
    """
    return np.array([[1.0, eta * np.exp(-1j * chi)],
                     [0.0, math.sqrt(max(1.0 - eta**2, 0.0))]])


def prepare_input(cfg: ExperimentConfig) -> StateVector:
    """``(1 x B^(x)n) |n1,0,0,n2>`` in first quantization, normalized."""
    n = cfg.n
    _guard(n)
    ones = _popcounts(n)  # number of symbol-2 entries
    diag = (ones == cfg.n2).astype(complex)
    psi = np.diag(diag) / math.sqrt(math.comb(n, cfg.n1))
    b = inner_mode_map(cfg.eta, cfg.chi)
    psi = _apply_each(b, psi, n, axis=1)
    psi /= np.linalg.norm(psi)
    return StateVector(psi)


def evolve_and_measure(state: StateVector, cfg: ExperimentConfig) -> Distribution:
    """Apply the beam splitter to every P factor and histogram the output imbalance."""
    n = state.n
    if n != cfg.n:
        raise ValueError("state and config disagree on n")
    u = cfg.rotation.matrix()
    out = _apply_each(u, state.amplitudes, n, axis=0)
    weight = np.sum(np.abs(out) ** 2, axis=1)
    ones = _popcounts(n)
    probs = np.zeros(n + 1)
    # index by n1' = n - ones; 2m' = 2 n1' - n
    np.add.at(probs, n - ones, weight)
    return Distribution(np.arange(-n, n + 1, 2), probs)


def entanglement_entropy(state: StateVector) -> float:
    lam = state.schmidt_coefficients()
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log(lam)))


# ---------------------------------------------------------------------------
# Schur transform

def clebsch_gordan_half(j2: int, m2: int, spin2: int, jnew2: int) -> float:
    """``<j_new, m+s | j, m; 1/2, s>`` with ``spin2 = 2s = +-1``."""
    j2, m2, jnew2 = twice(j2), twice(m2), twice(jnew2)
    if spin2 not in (1, -1) or abs(m2) > j2:
        return 0.0
    big_m2 = m2 + spin2
    if abs(big_m2) > jnew2 or jnew2 < 0:
        return 0.0
    denom = j2 + 1
    plus = (j2 + big_m2 + 1) / (2 * denom)   # (j + M + 1/2)/(2j+1)
    minus = (j2 - big_m2 + 1) / (2 * denom)  # (j - M + 1/2)/(2j+1)
    if jnew2 == j2 + 1:
        return math.sqrt(plus) if spin2 == 1 else math.sqrt(minus)
    if jnew2 == j2 - 1:
        return -math.sqrt(minus) if spin2 == 1 else math.sqrt(plus)
    return 0.0


@dataclass
class SchurBasis:
    """Real orthonormal basis ``|j, m, tau>`` of ``(C^2)^(x)n``.

    ``paths[j2]`` lists the intermediate doubled spins ``(2j_1, .., 2j_n)`` in
    lexicographic order; ``tau`` indexes into it.
    """

    n: int
    paths: dict[int, list[tuple[int, ...]]]
    vectors: dict[tuple[int, int, int], np.ndarray] = field(repr=False)

    def vector(self, j2, m2, tau) -> np.ndarray:
        return self.vectors[twice(j2), twice(m2), tau]

    def multiplicity(self, j2) -> int:
        return len(self.paths.get(twice(j2), []))

    def matrix(self) -> np.ndarray:
        """Rows are the basis vectors in key order."""
        return np.array([self.vectors[k] for k in sorted(self.vectors)])


def schur_basis(n: int) -> SchurBasis:
    """Schur-Weyl basis built by coupling one spin-1/2 at a time."""
    _guard(n)
    if n < 1:
        raise ValueError("n must be positive")
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    # level 1
    level = {(1, 1, (1,)): up, (1, -1, (1,)): down}
    for _ in range(n - 1):
        nxt = {}
        for (j2, m2, path), _v in level.items():
            for jnew2 in (j2 + 1, j2 - 1):
                if jnew2 < 0:
                    continue
                newpath = path + (jnew2,)
                for mnew2 in range(-jnew2, jnew2 + 1, 2):
                    key = (jnew2, mnew2, newpath)
                    if key in nxt:
                        continue
                    vec = 0.0
                    for spin2, e in ((1, up), (-1, down)):
                        old = (j2, mnew2 - spin2, path)
                        if old not in level:
                            continue
                        cg = clebsch_gordan_half(j2, mnew2 - spin2, spin2, jnew2)
                        if cg:
                            vec = vec + cg * np.kron(level[old], e)
                    nxt[key] = vec
        level = nxt
    paths: dict[int, list] = {}
    for j2, _m2, path in level:
        paths.setdefault(j2, set()).add(path)
    paths = {j2: sorted(p) for j2, p in sorted(paths.items())}
    vectors = {}
    for (j2, m2, path), vec in level.items():
        vectors[j2, m2, paths[j2].index(path)] = np.asarray(vec, dtype=float)
    return SchurBasis(n, paths, vectors)


def csb_state(j2, mp2_port, mq2_inner, basis: SchurBasis) -> StateVector:
    """Coordinated spin state ``gamma^(-1/2) sum_tau |j,mP,tau>_P |j,mQ,tau>_Q``."""
    j2 = twice(j2)
    mp, mq = twice(mp2_port), twice(mq2_inner)
    gamma = basis.multiplicity(j2)
    if gamma == 0 or abs(mp) > j2 or abs(mq) > j2:
        raise ValueError(f"no CSB state for 2j={j2}, 2mP={mp}, 2mQ={mq}")
    psi = sum(np.outer(basis.vector(j2, mp, t), basis.vector(j2, mq, t)) for t in range(gamma))
    return StateVector(psi / math.sqrt(gamma))


def fock_state(n11: int, n12: int, n21: int, n22: int) -> StateVector:
    """Symmetrized first-quantized Fock state of occupations ``n_ab`` (P symbol a, Q symbol b)."""
    n = n11 + n12 + n21 + n22
    _guard(n)
    psi = np.zeros((2**n, 2**n))
    slots = [(1, 1)] * n11 + [(1, 2)] * n12 + [(2, 1)] * n21 + [(2, 2)] * n22
    for arrangement in set(itertools.permutations(slots)):
        s = sequence_index([a for a, _ in arrangement])
        sp = sequence_index([b for _, b in arrangement])
        psi[s, sp] += 1.0
    psi /= np.linalg.norm(psi)
    return StateVector(psi)


def verify_x_matrix_element(j2, m2, mp2, s, sp, basis: SchurBasis) -> tuple[float, float]:
    """Both sides of ``<s|X_{j,m,m'}|s'> = gamma C^{j,n}_{m m'}(W(s, s'))``.

    The left side sums Schur-basis components over ``tau``; the right side
    comes from :func:`multihom.representations.louck_coefficient`.
    """
    n = basis.n
    _guard(n, 8)
    j2, m2, mp2 = twice(j2), twice(m2), twice(mp2)
    if len(s) != n or len(sp) != n:
        raise ValueError("sequence length must equal n")
    gamma = basis.multiplicity(j2)
    i, k = sequence_index(s), sequence_index(sp)
    if abs(m2) > j2 or abs(mp2) > j2:
        lhs = 0.0
    else:
        lhs = math.fsum(basis.vector(j2, m2, t)[i] * basis.vector(j2, mp2, t)[k] for t in range(gamma))
    w = OccupationMatrix.from_sequences(s, sp)
    if w.row_sums() != ((n + m2) // 2, (n - m2) // 2) or w.col_sums() != ((n + mp2) // 2, (n - mp2) // 2):
        rhs = 0.0
    else:
        rhs = gamma * louck_coefficient(j2, n, mp2, m2, w)
    return lhs, rhs


def fock_csb_overlap(j2, m2, mp2, occupations) -> float:
    """``<j, m, m' | n11, n12, n21, n22>`` from the Louck coefficient.

    Equals ``sqrt(gamma * n!/prod(n_ab!)) C^{j,n}_{m m'}(W)`` with ``W = (n_ab)``;
    rows of ``W`` are the port (P) symbols, so ``m`` is the port imbalance and
    ``m'`` the inner-mode imbalance.
    """
    n11, n12, n21, n22 = occupations
    n = n11 + n12 + n21 + n22
    _guard(n, 8)
    j2, m2, mp2 = twice(j2), twice(m2), twice(mp2)
    w = OccupationMatrix(n11, n12, n21, n22)
    if w.row_sums() != ((n + m2) // 2, (n - m2) // 2) or w.col_sums() != ((n + mp2) // 2, (n - mp2) // 2):
        raise ValueError(f"occupations {occupations} inconsistent with 2m={m2}, 2m'={mp2}")
    if j2 < max(abs(m2), abs(mp2)) or j2 > n or (j2 - n) % 2:
        return 0.0
    gamma = multiplicity(j2, n)
    weight = math.factorial(n) // math.prod(math.factorial(v) for v in occupations)
    return math.sqrt(gamma * weight) * louck_coefficient(j2, n, mp2, m2, w)
