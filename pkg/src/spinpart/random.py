"""Seeded random states for property tests and synthetic experiments."""

from __future__ import annotations

import numpy as np

from .angular import Direction, SpinLike, SpinState, as_spin
from .partition import PairState, spin_one_coherent_vector


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_vector(dim: int, rng) -> np.ndarray:
    """Haar-random unit vector."""
    rng = _rng(rng)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng, rank: int | None = None) -> np.ndarray:
    """Ginibre-ensemble density matrix ``G G^dagger / Tr``; full rank by default."""
    rng = _rng(rng)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(j: SpinLike, rng) -> SpinState:
    j = as_spin(j)
    return SpinState.pure(j, random_vector(j.dim, rng))


def random_spin_state(j: SpinLike, rng, rank: int | None = None) -> SpinState:
    j = as_spin(j)
    return SpinState(j, random_density_matrix(j.dim, rng, rank))


def random_pair_state(rng, rank: int | None = None) -> PairState:
    return PairState(random_density_matrix(3, rng, rank))


def random_direction(rng) -> Direction:
    rng = _rng(rng)
    v = rng.normal(size=3)
    return Direction.from_vector(v / np.linalg.norm(v))


def random_coherent_mixture(rng, terms: int = 4) -> PairState:
    """Convex mixture of spin-1 coherent pair states: a separable pair."""
    rng = _rng(rng)
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((3, 3), dtype=complex)
    for w in weights:
        n = random_direction(rng)
        v = spin_one_coherent_vector(n.theta, n.phi)
        rho += w * np.outer(v, v.conj())
    return PairState(rho)
