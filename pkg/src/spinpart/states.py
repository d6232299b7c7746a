"""Constructors for the spin states used throughout the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import (
    Direction,
    SpinLike,
    SpinState,
    as_spin,
    evolve,
    rotation_unitary,
    spin_operators,
)


@dataclass(frozen=True)
class OatParams:
    """One-axis-twisting drive: ``H/hbar = chi Jx^2 + larmor Jz`` for ``duration``.

    ``chi`` and ``larmor`` are angular frequencies (rad/s), ``duration`` is in
    seconds.
    """

    chi: float
    larmor: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        if self.chi < 0:
            raise ValueError("chi must be non-negative")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")

    @classmethod
    def cat_revival(cls, chi: float, larmor: float = 0.0) -> "OatParams":
        """Twisting for ``t = pi / (2 chi)``, where |m=-J> turns into a cat state."""
        return cls(chi=chi, larmor=larmor, duration=math.pi / (2 * chi))


def basis_vector(j: SpinLike, m) -> np.ndarray:
    j = as_spin(j)
    v = np.zeros(j.dim, dtype=complex)
    v[j.index(m)] = 1.0
    return v


def dicke(j: SpinLike, m) -> SpinState:
    """The Dicke state ``|J, m>``."""
    j = as_spin(j)
    return SpinState.pure(j, basis_vector(j, m))


def w_state(j: SpinLike) -> SpinState:
    """``|m = -J + 1>``: a single qubit up among 2J."""
    j = as_spin(j)
    return dicke(j, -j.j + 1)


def coherent_vector(j: SpinLike, n: Direction) -> np.ndarray:
    j = as_spin(j)
    return rotation_unitary(j, n)[:, -1].copy()


def coherent(j: SpinLike, n: Direction) -> SpinState:
    """Spin coherent state ``|m=J>_n`` polarized along ``n``."""
    return SpinState.pure(j, coherent_vector(j, n))


def cat_vector(j: SpinLike, alpha: float = 0.0) -> np.ndarray:
    j = as_spin(j)
    v = np.zeros(j.dim, dtype=complex)
    v[0] = 1.0
    v[-1] = np.exp(1j * alpha)
    return v / math.sqrt(2)


def cat_state(j: SpinLike, alpha: float = 0.0) -> SpinState:
    """``(|m=-J> + e^{i alpha} |m=J>) / sqrt(2)``."""
    return SpinState.pure(j, cat_vector(j, alpha))


def superposition(j: SpinLike, amplitudes) -> SpinState:
    """Normalized pure state from Dicke amplitudes ordered ``m = -J ... J``."""
    j = as_spin(j)
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape != (j.dim,):
        raise ValueError(f"expected {j.dim} amplitudes for J={j}, got shape {amps.shape}")
    if not np.any(amps):
        raise ValueError("amplitude vector is zero")
    return SpinState.pure(j, amps)


def mixture(states, weights=None) -> SpinState:
    """Convex combination of states sharing the same J."""
    states = list(states)
    if not states:
        raise ValueError("empty mixture")
    if weights is None:
        weights = np.full(len(states), 1.0 / len(states))
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("weights must be non-negative and sum to one")
    j = states[0].j
    if any(s.j != j for s in states):
        raise ValueError("all states in a mixture must share J")
    return SpinState(j, sum(w * s.matrix for w, s in zip(weights, states)))


def oat_generator(j: SpinLike, chi: float, larmor: float = 0.0) -> np.ndarray:
    ops = spin_operators(j)
    return chi * (ops.jx @ ops.jx) + larmor * ops.jz


def one_axis_twisting(state: SpinState, p: OatParams) -> SpinState:
    """Evolve ``state`` under ``chi Jx^2 + larmor Jz`` for ``p.duration``."""
    if p.duration == 0:
        return state
    return evolve(state, oat_generator(state.j, p.chi, p.larmor), p.duration)


def larmor_rotation(state: SpinState, phi: float) -> SpinState:
    """Rotate about z by ``phi``: ``exp(-i phi Jz) rho exp(i phi Jz)``."""
    phases = np.exp(-1j * phi * state.j.ms)
    return SpinState(state.j, phases[:, None] * state.matrix * phases.conj()[None, :])


def rotate(state: SpinState, n: Direction) -> SpinState:
    """Apply ``R(n)``, mapping the z axis onto ``n``."""
    r = rotation_unitary(state.j, n)
    return SpinState(state.j, r @ state.matrix @ r.conj().T)
