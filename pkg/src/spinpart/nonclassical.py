"""Non-classicality and entanglement diagnostics for spin states and qubit pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .angular import Direction, SpinLike, SpinState, as_spin, spin_operators, unitary_from_generator
from .partition import (
    PairState,
    projection_probabilities,
    reduced_pair_state,
    spin_one_coherent_vector,
)
from .states import OatParams, oat_generator

_PAIR_LZ = np.diag([1.0, 0.0, -1.0]).astype(complex)
_PAIR_LPLUS = np.array([[0, math.sqrt(2), 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=complex)
_PAIR_LX = (_PAIR_LPLUS + _PAIR_LPLUS.conj().T) / 2
_PAIR_LY = (_PAIR_LPLUS - _PAIR_LPLUS.conj().T) / 2j

# 4x3 isometry from the symmetric sector into two qubits |uu>,|ud>,|du>,|dd>
_TRIPLET = np.zeros((4, 3), dtype=complex)
_TRIPLET[0, 0] = 1.0
_TRIPLET[1, 1] = _TRIPLET[2, 1] = 1 / math.sqrt(2)
_TRIPLET[3, 2] = 1.0
_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _as_pair(state) -> PairState:
    if isinstance(state, PairState):
        return state
    if isinstance(state, SpinState):
        return reduced_pair_state(state)
    raise TypeError(f"expected SpinState or PairState, got {type(state).__name__}")


def pair_spin_projection(n: Direction) -> np.ndarray:
    """Spin-1 operator ``L.n`` in the pair basis."""
    nx, ny, nz = n.vector
    return nx * _PAIR_LX + ny * _PAIR_LY + nz * _PAIR_LZ


def z_value(pair, n: Direction) -> float:
    """``Z(n) = 2<L_n^2> - <L_n>^2 - 1``; negative values mean non-classical."""
    rho = _as_pair(pair).matrix
    ln = pair_spin_projection(n)
    mean = np.trace(rho @ ln).real
    second = np.trace(rho @ ln @ ln).real
    return float(2 * second - mean**2 - 1)


_SPECTRAL_FLOOR = 1e-14


def _root_husimi_grid(pair: PairState, theta, phi) -> np.ndarray:
    """``sqrt(Q(n))`` from the spectral form ``sum_k w_k |<uu_n|v_k>|^2``.

    Every term is a squared amplitude, so a small ``Q`` keeps its relative
    accuracy. The direct quadratic form carries absolute rounding of order
    1e-16, which the square root would blow up to 1e-8. Eigenvalues below
    ``_SPECTRAL_FLOOR`` are rounding noise of a rank-deficient matrix and are
    dropped.
    """
    w, v = np.linalg.eigh(pair.matrix)
    w = np.where(w < _SPECTRAL_FLOOR, 0.0, w)
    amps = np.einsum("i...,ik->k...", spin_one_coherent_vector(theta, phi).conj(), v)
    return np.sqrt(np.einsum("k,k...->...", w, np.abs(amps) ** 2))


def c_distribution_grid(pair: PairState, theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    b = _root_husimi_grid(pair, theta, phi)
    a = _root_husimi_grid(pair, np.pi - theta, phi + np.pi)
    return 1.0 - (a + b) ** 2


def c_distribution(state, n: Direction) -> float:
    """``C_n = 1 - (sqrt(Q(-n)) + sqrt(Q(n)))^2`` from the pair Husimi function."""
    return float(c_distribution_grid(_as_pair(state), n.theta, n.phi))


def alpha_c_identity_check(state, n: Direction):
    """Return ``(Z, alpha, C_n)``, which satisfy ``Z = alpha * C_n``."""
    pair = _as_pair(state)
    b = float(_root_husimi_grid(pair, n.theta, n.phi))
    a = float(_root_husimi_grid(pair, math.pi - n.theta, n.phi + math.pi))
    return z_value(pair, n), (a - b) ** 2 - 1, 1.0 - (a + b) ** 2


def fibonacci_sphere(n: int = 512):
    """Deterministic, nearly uniform ``(theta, phi)`` arrays with ``n`` nodes."""
    i = np.arange(n) + 0.5
    theta = np.arccos(1 - 2 * i / n)
    phi = (math.pi * (1 + math.sqrt(5)) * i) % (2 * math.pi)
    return theta, phi


def _canonical(theta: float, phi: float) -> Direction:
    # C_n is even under n -> -n; report the upper hemisphere
    v = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    if v[2] < 0 or (v[2] == 0 and math.atan2(v[1], v[0]) < 0):
        v = -v
    return Direction.from_vector(v)


def max_c_distribution(state, nodes: int = 512, starts: int = 6):
    """Maximize ``C_n`` over the sphere; returns ``(max C_n, Direction)``.

    A Fibonacci lattice (plus both poles) seeds Nelder-Mead refinements from
    the ``starts`` best nodes.
    """
    pair = _as_pair(state)
    theta, phi = fibonacci_sphere(nodes)
    theta = np.concatenate([[0.0, math.pi], theta])
    phi = np.concatenate([[0.0, 0.0], phi])
    values = c_distribution_grid(pair, theta, phi)
    order = np.argsort(values)[::-1][:starts]
    best_val, best_x = values[order[0]], (theta[order[0]], phi[order[0]])

    def objective(x):
        return -float(c_distribution_grid(pair, x[0], x[1]))

    for k in order:
        res = minimize(
            objective,
            x0=[theta[k], phi[k]],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000, "initial_simplex": _simplex(theta[k], phi[k])},
        )
        if -res.fun > best_val:
            best_val, best_x = -res.fun, tuple(res.x)
    return float(best_val), _canonical(*best_x)


def _simplex(theta, phi, step=0.05):
    return np.array([[theta, phi], [theta + step, phi], [theta, phi + step]])


def concurrence_lower_bound(state, nodes: int = 512):
    """``max(0, max_n C_n)`` and the maximizing direction."""
    value, n = max_c_distribution(state, nodes=nodes)
    return max(0.0, value), n


def wootters_concurrence(pair) -> float:
    """Hill-Wootters concurrence of the pair embedded in two qubits.

    With ``rho = A A^dagger``, the decreasing ``lambda_i`` are the singular
    values of ``A^T (sigma_y x sigma_y) A``. Working with ``A`` keeps product
    states at concurrence zero to rounding, where square roots of the
    eigenvalues of ``rho rho~`` would leave residues of order 1e-8.
    """
    rho = _TRIPLET @ _as_pair(pair).matrix @ _TRIPLET.conj().T
    w, v = np.linalg.eigh(rho)
    a = v * np.sqrt(np.where(w < _SPECTRAL_FLOOR, 0.0, w))
    lam = np.linalg.svd(a.T @ _SIGMA_YY @ a, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _density(matrix) -> np.ndarray:
    if isinstance(matrix, (SpinState, PairState)):
        return matrix.matrix
    return np.asarray(matrix)


def min_entropy(matrix) -> float:
    """``-ln(lambda_max)``, natural logarithm."""
    lam = np.linalg.eigvalsh(_density(matrix))[-1]
    return float(-math.log(lam))


def conditional_min_entropy(lambda_max_global: float, lambda_max_pair: float) -> float:
    """``S_min(global) - S_min(pair)`` from the two largest eigenvalues."""
    return -math.log(lambda_max_global) + math.log(lambda_max_pair)


def conditional_min_entropy_14_2(state: SpinState) -> float:
    """Min-entropy of the spin minus that of its two-qubit marginal.

    A negative value certifies that the (2J-2)|2 split is not separable.
    """
    return min_entropy(state) - min_entropy(reduced_pair_state(state))


def spin_uncertainty(state: SpinState, n: Direction) -> float:
    """``sqrt(<(J.n)^2> - <J.n>^2)``."""
    ops = spin_operators(state.j)
    nx, ny, nz = n.vector
    jn = nx * ops.jx + ny * ops.jy + nz * ops.jz
    rho = state.matrix
    mean = np.trace(rho @ jn).real
    var = np.trace(rho @ jn @ jn).real - mean**2
    return float(math.sqrt(max(var, 0.0)))


def equatorial_covariance(state: SpinState) -> np.ndarray:
    """Symmetrized covariance matrix of ``(Jx, Jy)``."""
    ops = spin_operators(state.j)
    rho = state.matrix
    pair = (ops.jx, ops.jy)
    means = [np.trace(rho @ a).real for a in pair]
    cov = np.empty((2, 2))
    for i, a in enumerate(pair):
        for k, b in enumerate(pair):
            cov[i, k] = 0.5 * np.trace(rho @ (a @ b + b @ a)).real - means[i] * means[k]
    return cov


def min_equatorial_uncertainty(state: SpinState):
    """Smallest ``Delta J_n`` over equatorial ``n``; returns ``(Delta J, phi)``.

    The variance along ``(cos phi, sin phi, 0)`` is a quadratic form in the
    (Jx, Jy) covariance, so the minimum is its lowest eigenvalue and needs no
    search. ``phi`` is reported in ``[0, pi)``.
    """
    w, v = np.linalg.eigh(equatorial_covariance(state))
    phi = math.atan2(v[1, 0], v[0, 0]) % math.pi
    return float(math.sqrt(max(w[0], 0.0))), phi


def concurrence_from_squeezing(delta_j_min: float, j: SpinLike) -> float:
    """``(1 - 2 dJ^2 / J) / (2J - 1)``; negative when not squeezed."""
    if delta_j_min < 0:
        raise ValueError("delta_j_min must be non-negative")
    jj = as_spin(j).j
    return (1 - 2 * delta_j_min**2 / jj) / (2 * jj - 1)


def parity_weights(j: SpinLike) -> np.ndarray:
    """``(-1)^(J-m)`` in basis order, so the stretched state ``m = J`` is +1."""
    j = as_spin(j)
    return np.array([(-1.0) ** ((j.two_j - tm) // 2) for tm in j.two_ms])


def sign_weights(j: SpinLike) -> np.ndarray:
    """``sgn(m)`` on even ``m`` and zero on odd ``m`` (``sgn(0) = 0``)."""
    j = as_spin(j)
    if not j.is_integer:
        raise ValueError("the even-m sign observable needs integer J")
    ms = j.two_ms // 2
    return np.where(ms % 2 == 0, np.sign(ms), 0).astype(float)


def parity_expectation(state: SpinState, phi: float) -> float:
    """Mean parity of the spin projection along the equatorial direction ``phi``."""
    probs = projection_probabilities(state, Direction.equatorial(phi))
    return float(parity_weights(state.j) @ probs)


@lru_cache(maxsize=32)
def _echo_unitary(two_j: int, params: OatParams) -> np.ndarray:
    return unitary_from_generator(oat_generator(as_spin(two_j / 2), params.chi, params.larmor), params.duration)


def echo_populations(state: SpinState, phi: float, echo: OatParams) -> np.ndarray:
    """z populations after a Larmor rotation by ``phi`` and a second twisting."""
    u = _echo_unitary(state.j.two_j, echo)
    phases = np.exp(-1j * phi * state.j.ms)
    u = u * phases[None, :]
    return np.clip(np.einsum("ij,jk,ik->i", u, state.matrix, u.conj()).real, 0.0, None)


def sign_expectation(state: SpinState, phi: float, echo: OatParams | None = None) -> float:
    """``<Sigma> = sum_{m even} sgn(m) Pi_m``.

    Without ``echo`` the projections are taken along the equatorial direction
    ``phi``. With ``echo`` the state is rotated about z by ``phi``, twisted
    again with ``echo`` and measured along z.
    """
    weights = sign_weights(state.j)
    if echo is None:
        probs = projection_probabilities(state, Direction.equatorial(phi))
    else:
        probs = echo_populations(state, phi, echo)
    return float(weights @ probs)


@dataclass(frozen=True)
class FourierSeries:
    """``f(phi) = alpha_0/2 + sum_k alpha_k cos(k phi) + beta_k sin(k phi)``."""

    alpha: np.ndarray
    beta: np.ndarray

    @property
    def order(self) -> int:
        return len(self.alpha) - 1

    def amplitude(self, k: int) -> float:
        """Component amplitude ``sqrt(alpha_k^2 + beta_k^2) / 2``.

        With this normalization the order-2J component of ``<A>(phi)`` equals
        ``|a_{J,-J} rho_{-J,J}|``.
        """
        if k == 0:
            return abs(float(self.alpha[0])) / 2
        return float(math.hypot(self.alpha[k], self.beta[k]) / 2)

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        k = np.arange(1, self.order + 1)
        kp = np.multiply.outer(phi, k)
        return self.alpha[0] / 2 + np.cos(kp) @ self.alpha[1:] + np.sin(kp) @ self.beta[1:]


def fourier_components(samples, order: int | None = None) -> FourierSeries:
    """Least-squares Fourier series through ``(phi, value)`` samples.

    ``order`` defaults to the largest order the sample count supports.
    """
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be (phi, value) pairs")
    phi, values = data[:, 0], data[:, 1]
    n = len(phi)
    if order is None:
        order = (n - 1) // 2
    if n < 2 * order + 1:
        raise ValueError(f"{n} samples cannot determine a Fourier series of order {order}")
    wrapped = np.sort(np.mod(phi, 2 * math.pi))
    gaps = np.diff(np.concatenate([wrapped, [wrapped[0] + 2 * math.pi]]))
    if gaps.min() < 1e-12:
        raise ValueError("sample angles must be distinct modulo 2 pi")
    k = np.arange(1, order + 1)
    kp = np.multiply.outer(phi, k)
    design = np.hstack([np.full((n, 1), 0.5), np.cos(kp), np.sin(kp)])
    coef, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("sample angles do not determine the Fourier series (rank deficient)")
    alpha = coef[: order + 1]
    beta = np.concatenate([[0.0], coef[order + 1 :]])
    return FourierSeries(alpha, beta)


def cat_overlap_bound(pi_minus: float, pi_plus: float, coherence: float) -> float:
    """Best overlap with a cat state ``(Pi_-J + Pi_J + 2|rho_{-J,J}|) / 2``."""
    return (pi_minus + pi_plus + 2 * abs(coherence)) / 2


def extremal_coherence(state: SpinState) -> float:
    """``|rho_{-J,J}|``."""
    return float(abs(state.matrix[0, -1]))


def _oat_propagator(j, chi: float, larmor: float):
    w, v = np.linalg.eigh(oat_generator(j, chi, larmor))
    return lambda t: (v * np.exp(-1j * w * t)) @ v.conj().T


def oat_squeezing_scan(state: SpinState, chi: float, times, larmor: float = 0.0):
    """``(Delta J_min, phi_min)`` arrays along a one-axis-twisting trajectory."""
    prop = _oat_propagator(state.j, chi, larmor)
    dj, phis = [], []
    for t in times:
        u = prop(t)
        d, p = min_equatorial_uncertainty(SpinState(state.j, u @ state.matrix @ u.conj().T))
        dj.append(d)
        phis.append(p)
    return np.array(dj), np.array(phis)


@dataclass(frozen=True)
class SqueezingOptimum:
    time: float
    delta_j_min: float
    phi_min: float
    state: SpinState


def oat_squeezing_optimum(state: SpinState, chi: float, t_max: float, larmor: float = 0.0, grid: int = 401):
    """Global minimum of ``Delta J_min`` over ``0 <= t <= t_max``.

    A uniform scan locates the best grid point and a bounded scalar search
    refines it between the neighbouring grid points.
    """
    times = np.linspace(0.0, t_max, grid)
    dj, _ = oat_squeezing_scan(state, chi, times, larmor)
    k = int(np.argmin(dj))
    lo, hi = times[max(k - 1, 0)], times[min(k + 1, grid - 1)]
    prop = _oat_propagator(state.j, chi, larmor)

    def evolved(t):
        u = prop(t)
        return SpinState(state.j, u @ state.matrix @ u.conj().T)

    res = minimize_scalar(
        lambda t: min_equatorial_uncertainty(evolved(t))[0],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-6 * (hi - lo) + 1e-15},
    )
    t_best = float(res.x) if res.fun <= dj[k] else float(times[k])
    best = evolved(t_best)
    d, p = min_equatorial_uncertainty(best)
    return SqueezingOptimum(t_best, d, p, best)
