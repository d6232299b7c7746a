"""Removing a qubit pair from the 2J symmetric qubits of a spin J.

A Dicke state with ``k = J + m`` qubits up decomposes over a pair of qubits
and the 2J-2 others as

    |D^{2J}_k> = sum_{k1} sqrt(C(2,k1) C(2J-2,k-k1) / C(2J,k)) |D^2_{k1}> |D^{2J-2}_{k-k1}>

which defines three pair-annihilation operators ``P_mu`` (``mu = k1 - 1``)
from spin J to spin J-1. Everything in this module is built on them.

Pair states are 3x3 matrices in the spin-1 basis ordered
``(|1,+1> = |uu>, |1,0> = symmetric, |1,-1> = |dd>)``; note that this is the
*reverse* of the Dicke ordering used for :class:`SpinState`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .angular import (
    HERMITIAN_TOL,
    TRACE_TOL,
    AngularMomentum,
    Direction,
    SpinLike,
    SpinState,
    as_spin,
    rotation_unitary,
    twice,
)

PAIR_MUS = (1, 0, -1)

POLARIZATION_TO_MU = {"sigma-": 1, "pi": 0, "sigma+": -1}

SPIN_ONE = AngularMomentum(2)

_FLIP3 = np.eye(3)[::-1]


@dataclass(frozen=True, eq=False)
class PairState:
    """Spin-1 density matrix of a symmetric qubit pair, basis ``(+1, 0, -1)``."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.shape != (3, 3):
            raise ValueError(f"pair state must be 3x3, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("pair matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ValueError(f"pair matrix trace is {np.trace(rho).real}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_spin_state(cls, state: SpinState) -> "PairState":
        """Reinterpret a J=1 state as a pair state (reorders the basis)."""
        if state.j != SPIN_ONE:
            raise ValueError("only a J=1 state is a pair state")
        return cls(_FLIP3 @ state.matrix @ _FLIP3)

    @classmethod
    def pure(cls, vector) -> "PairState":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls) -> "PairState":
        return cls(np.eye(3) / 3)

    def to_spin_state(self) -> SpinState:
        return SpinState(SPIN_ONE, _FLIP3 @ self.matrix @ _FLIP3)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_physical(self, tol: float = 1e-9) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def rotated(self, n: Direction) -> "PairState":
        r = spin_one_rotation(n)
        return PairState(r @ self.matrix @ r.conj().T)

    def allclose(self, other: "PairState", atol: float = 1e-12) -> bool:
        return np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)


@dataclass(frozen=True)
class PairAnnihilators:
    """The three operators ``P_mu`` mapping spin J to spin J-1."""

    j: AngularMomentum
    ops: dict

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.ops[mu]

    def __iter__(self):
        return (self.ops[mu] for mu in PAIR_MUS)


def spin_one_rotation(n: Direction) -> np.ndarray:
    """Spin-1 rotation ``R(n)`` in the pair basis order ``(+1, 0, -1)``."""
    return _FLIP3 @ rotation_unitary(SPIN_ONE, n) @ _FLIP3


def spin_one_coherent_vector(theta, phi) -> np.ndarray:
    """``R(n)|1,+1>`` in pair order; broadcasts over array-valued angles.

    The first axis of the result indexes the three components.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    return np.array([c * c * np.exp(-1j * phi), math.sqrt(2) * c * s + 0j * phi, s * s * np.exp(1j * phi)])


def q_dicke(j: SpinLike, m, exact: bool = False):
    """Probability that a pair drawn from ``|J, m>`` is ``|uu>_z``.

    ``(J+m)(J+m-1) / (2J(2J-1))``; returned as a Fraction when ``exact``.
    """
    j = as_spin(j)
    if j.two_j < 2:
        raise ValueError("a pair needs at least two qubits (J >= 1)")
    k = (twice(m) + j.two_j) // 2
    j.index(m)
    n = j.two_j
    value = Fraction(k * (k - 1), n * (n - 1))
    return value if exact else float(value)


@lru_cache(maxsize=None)
def _pair_ops(two_j: int) -> dict:
    n = two_j
    ops = {}
    for mu in PAIR_MUS:
        k1 = mu + 1
        p = np.zeros((n - 1, n + 1))
        for k in range(n + 1):
            rest = k - k1
            if 0 <= rest <= n - 2:
                p[rest, k] = math.sqrt(math.comb(2, k1) * math.comb(n - 2, rest) / math.comb(n, k))
        p.setflags(write=False)
        ops[mu] = p
    return ops


def pair_annihilation_ops(j: SpinLike) -> PairAnnihilators:
    """``<J-1, m-mu| P_mu |J, m>`` for ``mu = +1, 0, -1``."""
    j = as_spin(j)
    if j.two_j < 2:
        raise ValueError("pair annihilation needs J >= 1")
    return PairAnnihilators(j, _pair_ops(j.two_j))


def reduced_pair_state(state: SpinState) -> PairState:
    """Two-qubit marginal ``(rho_pair)_{mu nu} = Tr(P_mu rho P_nu^dagger)``."""
    ops = pair_annihilation_ops(state.j)
    left = [p @ state.matrix for p in ops]
    rho = np.array([[np.sum(a * ops[nu]) for nu in PAIR_MUS] for a in left])
    return PairState(rho)


def remove_pair(state: SpinState) -> SpinState:
    """State of the remaining 2J-2 qubits after losing a random pair."""
    ops = pair_annihilation_ops(state.j)
    rho = sum(p @ state.matrix @ p.T for p in ops)
    return SpinState(AngularMomentum(state.j.two_j - 2), rho)


def projection_probabilities(state: SpinState, n: Direction) -> np.ndarray:
    """``Pi_m(n) = <m| R(n)^dagger rho R(n) |m>`` for ``m = -J ... J``."""
    r = rotation_unitary(state.j, n)
    probs = np.einsum("ji,jk,ki->i", r.conj(), state.matrix, r).real
    return np.clip(probs, 0.0, None)


def pair_husimi_grid(pair: PairState, theta, phi) -> np.ndarray:
    """``<uu_n| rho_pair |uu_n>`` evaluated on arrays of angles."""
    v = spin_one_coherent_vector(theta, phi)
    q = np.einsum("i...,ij,j...->...", v.conj(), pair.matrix, v).real
    return q


def pair_husimi(state: SpinState | PairState, n: Direction) -> float:
    """Probability that a qubit pair is polarized ``|uu>`` along ``n``."""
    pair = state if isinstance(state, PairState) else reduced_pair_state(state)
    return float(pair_husimi_grid(pair, n.theta, n.phi))


def pair_husimi_weighted(state: SpinState, n: Direction) -> float:
    """Same quantity as :func:`pair_husimi`, as ``sum_m Q_m Pi_m(n)``."""
    j = state.j
    q = np.array([q_dicke(j, m) for m in j.ms])
    return float(q @ projection_probabilities(state, n))


def projected_excited_state(state: SpinState, polarization: str = "sigma-"):
    """Unnormalized excited-manifold state after absorbing a photon.

    ``sigma-`` light removes a ``|uu>`` pair, ``pi`` a symmetric pair and
    ``sigma+`` a ``|dd>`` pair. Returns ``(matrix, ratio)`` where ``ratio``
    is the trace, equal to the light-shift ratio ``V / V0``.
    """
    try:
        mu = POLARIZATION_TO_MU[polarization]
    except KeyError:
        raise ValueError(f"unknown polarization {polarization!r}; use one of {sorted(POLARIZATION_TO_MU)}")
    p = pair_annihilation_ops(state.j)[mu]
    projected = p @ state.matrix @ p.T
    return projected, float(np.trace(projected).real)


def _dicke_embedding(n_qubits: int) -> np.ndarray:
    """Columns are the Dicke states |D^N_k>, k = 0..N, in the 2^N product basis."""
    dim = 2**n_qubits
    ones = np.array([bin(b).count("1") for b in range(dim)])
    v = np.zeros((dim, n_qubits + 1))
    for k in range(n_qubits + 1):
        mask = ones == k
        v[mask, k] = 1.0 / math.sqrt(mask.sum())
    return v


def brute_force_pair_oracle(amplitudes, n_qubits: int | None = None) -> PairState:
    """Two-qubit marginal computed in the full ``2^N`` qubit space.

    ``amplitudes`` is either a Dicke amplitude vector (``m = -J ... J``) or a
    Dicke-basis density matrix. Qubit 1 is the most significant bit and a set
    bit means spin up. Limited to ``N <= 8``.
    """
    a = np.asarray(amplitudes, dtype=complex)
    n = a.shape[0] - 1 if n_qubits is None else n_qubits
    if n > 8:
        raise ValueError("brute-force oracle is limited to N <= 8 qubits")
    if n < 2 or a.shape[0] != n + 1:
        raise ValueError("need at least two qubits and N+1 Dicke amplitudes")
    rho = np.outer(a, a.conj()) if a.ndim == 1 else a
    rho = rho / np.trace(rho)
    v = _dicke_embedding(n)
    full = v @ rho @ v.T
    rest = 2 ** (n - 2)
    two = np.einsum("iaja->ij", full.reshape(4, rest, 4, rest))
    triplet = np.zeros((4, 3))
    triplet[3, 0] = 1.0  # |uu>
    triplet[1, 1] = triplet[2, 1] = 1 / math.sqrt(2)
    triplet[0, 2] = 1.0  # |dd>
    return PairState(triplet.T @ two @ triplet)


def sample_projections(state: SpinState, n: Direction, shots: int, seed: int) -> np.ndarray:
    """Multinomial Stern-Gerlach counts along ``n``.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64), one
    multinomial call per invocation, so a given seed always reproduces the
    same counts.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    p = projection_probabilities(state, n)
    rng = np.random.default_rng(seed)
    return rng.multinomial(int(shots), p / p.sum())
