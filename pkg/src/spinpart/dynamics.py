"""Optical coupling between a ground manifold J and an excited manifold J'.

Coupling operators ``D_q`` (``q = -1, 0, +1``) map the ground manifold to
the excited one with Clebsch-Gordan matrix elements

    <J', m+q| D_q |J, m> = <J, m; 1, q | J', m+q>.

Absorbing a ``sigma+`` photon is ``q = +1``, ``pi`` is ``q = 0`` and
``sigma-`` is ``q = -1``. Spontaneous emission uses the adjoint operators
as jump operators. Because every excited state ``|J', m'>`` has unit total
branching, ``sum_q D_q D_q^dagger`` is the identity on the excited manifold.

Joint ground + excited density matrices are stored block-wise with the
ground manifold first, each block in ``m = -J ... J`` order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import (
    HERMITIAN_TOL,
    TRACE_TOL,
    AngularMomentum,
    SpinLike,
    SpinState,
    as_spin,
    clebsch_gordan,
    unitary_from_generator,
)

POLARIZATION_Q = {"sigma-": -1, "pi": 0, "sigma+": 1}

RICHARDSON_TOL = 1e-8
MAX_REFINEMENTS = 12


class NumericalError(RuntimeError):
    """Integrator could not reach the requested accuracy."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@lru_cache(maxsize=None)
def _coupling_ops(two_jg: int, two_je: int) -> dict:
    jg, je = AngularMomentum(two_jg), AngularMomentum(two_je)
    ops = {}
    for q in (-1, 0, 1):
        d = np.zeros((je.dim, jg.dim))
        for col, m in enumerate(jg.ms):
            mp = m + q
            if abs(mp) <= je.j:
                d[je.index(mp), col] = clebsch_gordan(jg.j, m, 1, q, je.j, mp)
        d.setflags(write=False)
        ops[q] = d
    return ops


@dataclass(frozen=True)
class TransitionSystem:
    """Ground and excited manifolds, decay rate and coupling operators."""

    j_ground: AngularMomentum
    j_excited: AngularMomentum
    gamma: float

    @property
    def coupling(self) -> dict:
        """``{q: D_q}``, each of shape ``(2J'+1, 2J+1)``."""
        return _coupling_ops(self.j_ground.two_j, self.j_excited.two_j)

    @property
    def dims(self) -> tuple:
        return self.j_ground.dim, self.j_excited.dim

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def jump_operators(self) -> list:
        """``L_q = sqrt(gamma) D_q^dagger`` embedded in the joint space."""
        ng, ne = self.dims
        out = []
        for q in (-1, 0, 1):
            op = np.zeros((ng + ne, ng + ne))
            op[:ng, ng:] = math.sqrt(self.gamma) * self.coupling[q].T
            out.append(op)
        return out


def transition_system(j_ground: SpinLike, j_excited: SpinLike, gamma: float = 0.0) -> TransitionSystem:
    """Build the coupling operators between two manifolds.

    Raises:
        ValueError: ``|J' - J| > 1`` or ``J = J' = 0``, or negative gamma.
    """
    jg, je = as_spin(j_ground), as_spin(j_excited)
    if abs(jg.two_j - je.two_j) not in (0, 2) or jg.two_j + je.two_j == 0:
        raise ValueError(f"a dipole transition cannot couple J={jg} to J'={je}")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    return TransitionSystem(jg, je, float(gamma))


def drive_operator(sys: TransitionSystem, polarization) -> np.ndarray:
    """Excited-by-ground block ``sum_q eps_q D_q`` for a normalized polarization.

    ``polarization`` is one of ``"sigma-"``, ``"pi"``, ``"sigma+"``, ``"x"``
    (``(sigma+ + sigma-)/sqrt(2)``) or a mapping ``{q: amplitude}``.
    """
    if isinstance(polarization, str):
        if polarization == "x":
            amps = {1: 1 / math.sqrt(2), -1: 1 / math.sqrt(2)}
        elif polarization in POLARIZATION_Q:
            amps = {POLARIZATION_Q[polarization]: 1.0}
        else:
            raise ValueError(f"unknown polarization {polarization!r}")
    else:
        amps = {int(q): complex(a) for q, a in dict(polarization).items()}
        if any(q not in (-1, 0, 1) for q in amps):
            raise ValueError("polarization components must be q = -1, 0, +1")
        norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
        if not math.isclose(norm, 1.0, abs_tol=1e-12):
            raise ValueError(f"polarization is not normalized (norm {norm})")
    return sum(a * sys.coupling[q] for q, a in amps.items())


def coupling_ratio(sys: TransitionSystem, polarization, m_from, m_to_weak, m_to_strong) -> float:
    """``|<J', m_weak|V|J, m>| / |<J', m_strong|V|J, m>|`` for drive ``V``."""
    v = drive_operator(sys, polarization)
    col = sys.j_ground.index(m_from)
    return abs(v[sys.j_excited.index(m_to_weak), col]) / abs(v[sys.j_excited.index(m_to_strong), col])


def spontaneous_emission_map(sys: TransitionSystem, excited: SpinState) -> SpinState:
    """Ground state after the excited state emits one photon.

    The photon polarization is traced out: ``rho = sum_q D_q^dagger rho' D_q``.
    For ``J' = J + 1`` this is the loss of one qubit pair.

    Raises:
        ValueError: the system is not a ``J' = J + 1`` decay or the state
            lives on the wrong manifold.
    """
    if sys.j_excited.two_j != sys.j_ground.two_j + 2:
        raise ValueError("spontaneous emission map needs J' = J + 1")
    if excited.j != sys.j_excited:
        raise ValueError(f"state has J={excited.j}, expected J'={sys.j_excited}")
    rho = sum(d.T @ excited.matrix @ d for d in sys.coupling.values())
    return SpinState(sys.j_ground, rho)


@dataclass(frozen=True, eq=False)
class JointState:
    """Density matrix on the ground manifold (first) plus the excited one."""

    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        n = sum(self.dims)
        if rho.shape != (n, n):
            raise ValueError(f"joint state must be {n}x{n}, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("joint matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ValueError(f"joint matrix trace is {np.trace(rho).real}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "dims", tuple(self.dims))

    @classmethod
    def from_ground(cls, sys: TransitionSystem, state: SpinState) -> "JointState":
        ng, ne = sys.dims
        rho = np.zeros((ng + ne, ng + ne), dtype=complex)
        rho[:ng, :ng] = state.matrix
        return cls((ng, ne), rho)

    @classmethod
    def from_excited(cls, sys: TransitionSystem, state: SpinState) -> "JointState":
        ng, ne = sys.dims
        rho = np.zeros((ng + ne, ng + ne), dtype=complex)
        rho[ng:, ng:] = state.matrix
        return cls((ng, ne), rho)

    @property
    def ground_block(self) -> np.ndarray:
        ng = self.dims[0]
        return self.matrix[:ng, :ng]

    @property
    def excited_block(self) -> np.ndarray:
        ng = self.dims[0]
        return self.matrix[ng:, ng:]

    @property
    def excited_population(self) -> float:
        return float(np.trace(self.excited_block).real)

    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def ground_state(self, sys: TransitionSystem) -> SpinState:
        """Ground block renormalized to unit trace."""
        block = self.ground_block
        return SpinState(sys.j_ground, block / np.trace(block).real)

    def excited_state(self, sys: TransitionSystem) -> SpinState:
        """Excited block renormalized to unit trace."""
        block = self.excited_block
        return SpinState(sys.j_excited, block / np.trace(block).real)


def _hamiltonian(sys: TransitionSystem, rabi: float, detuning: float, polarization) -> np.ndarray:
    ng, ne = sys.dims
    h = np.zeros((ng + ne, ng + ne), dtype=complex)
    v = drive_operator(sys, polarization)
    h[ng:, :ng] = 0.5 * rabi * v
    h[:ng, ng:] = 0.5 * rabi * v.conj().T
    h[ng:, ng:] -= detuning * np.eye(ne)
    return h


def dominant_coupling(sys: TransitionSystem, ground: SpinState, polarization) -> float:
    """Largest drive matrix element out of a populated ground level."""
    v = np.abs(drive_operator(sys, polarization))
    populated = ground.populations > 1e-12
    return float(v[:, populated].max()) if populated.any() else 0.0


def pulse_duration(sys: TransitionSystem, ground: SpinState, polarization, rabi: float, area: float) -> float:
    """Time for ``area`` on the dominant transition: ``rabi * c * t = area``."""
    c = dominant_coupling(sys, ground, polarization)
    if c == 0 or rabi <= 0:
        raise ValueError("the drive does not couple the populated ground levels")
    return area / (rabi * c)


def calibrated_rabi(sys: TransitionSystem, ground: SpinState, polarization, t_pulse: float, area: float = math.pi) -> float:
    """Rabi frequency that gives ``area`` on the dominant transition in ``t_pulse``."""
    c = dominant_coupling(sys, ground, polarization)
    if c == 0 or t_pulse <= 0:
        raise ValueError("the drive does not couple the populated ground levels")
    return area / (c * t_pulse)


@dataclass(frozen=True)
class RabiResult:
    excited: SpinState
    ground_leakage: float
    joint: JointState


def rabi_pulse_ideal(sys: TransitionSystem, ground: SpinState, polarization, area: float) -> RabiResult:
    """Closed-system Rabi pulse from the ground manifold.

    The pulse area is measured on the strongest drive matrix element ``c``
    leaving a populated ground level, so a two-level transition of coupling
    ``c`` is fully inverted at ``area = pi``. Returns the excited block
    renormalized plus the population left in the ground manifold.

    Raises:
        ValueError: the drive does not couple any populated ground level, or
            nothing reaches the excited manifold.
    """
    c = dominant_coupling(sys, ground, polarization)
    if c == 0:
        raise ValueError("the drive does not couple the populated ground levels")
    # unit Rabi frequency on the dominant transition, time equal to the area
    h = _hamiltonian(sys, 1.0 / c, 0.0, polarization)
    u = unitary_from_generator(h, area)
    joint = JointState.from_ground(sys, ground)
    joint = JointState(joint.dims, u @ joint.matrix @ u.conj().T)
    p_exc = joint.excited_population
    if p_exc < 1e-14:
        raise ValueError("pulse leaves no population in the excited manifold")
    return RabiResult(joint.excited_state(sys), 1.0 - p_exc, joint)


@lru_cache(maxsize=64)
def _lindblad_parts(sys: TransitionSystem, rabi: float, detuning: float, polarization):
    """Non-Hermitian effective Hamiltonian and stacked jump operators."""
    h = _hamiltonian(sys, rabi, detuning, dict(polarization) if isinstance(polarization, tuple) else polarization)
    jumps = np.array(sys.jump_operators(), dtype=complex)
    decay = sum(lop.conj().T @ lop for lop in jumps)
    h_eff = h - 0.5j * decay
    h_eff.setflags(write=False)
    jumps.setflags(write=False)
    return h_eff, jumps


def _rk4(h_eff: np.ndarray, jumps: np.ndarray, rho: np.ndarray, dt: float, steps: int) -> np.ndarray:
    jumps_dag = jumps.conj().transpose(0, 2, 1)

    def rhs(r):
        a = -1j * (h_eff @ r)
        return a + a.conj().T + (jumps @ r @ jumps_dag).sum(axis=0)

    for _ in range(steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def _freeze_polarization(polarization):
    if isinstance(polarization, str):
        return polarization
    return tuple(sorted((int(q), complex(a)) for q, a in dict(polarization).items()))


def lindblad_evolve(
    sys: TransitionSystem,
    joint: JointState,
    rabi: float,
    detuning: float,
    duration: float,
    polarization="pi",
) -> JointState:
    """Driven, decaying evolution of a joint state.

    Integrates ``d rho/dt = -i[H, rho] + sum_q (L_q rho L_q^dagger -
    {L_q^dagger L_q, rho}/2)`` with ``H = (rabi/2)(V + V^dagger) -
    detuning * P_exc`` in the rotating frame, ``V`` the drive operator and
    ``L_q = sqrt(gamma) D_q^dagger``. Fixed-step RK4: the step starts at the
    largest value allowed by ``min(1/(50 rabi), 1/(50 gamma))`` and halves
    until ``n`` and ``2n`` steps agree to ``1e-8`` in trace norm.

    Raises:
        ValueError: negative duration.
        NumericalError: the refinement does not converge.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if duration == 0:
        return joint
    rates = [abs(rabi), sys.gamma, abs(detuning)]
    h_max = min((1 / (50 * r) for r in rates if r > 0), default=duration)
    steps = max(1, math.ceil(duration / h_max))
    h_eff, jumps = _lindblad_parts(sys, float(rabi), float(detuning), _freeze_polarization(polarization))
    rho0 = joint.matrix
    coarse = _rk4(h_eff, jumps, rho0, duration / steps, steps)
    err = math.inf
    for _ in range(MAX_REFINEMENTS):
        fine = _rk4(h_eff, jumps, rho0, duration / (2 * steps), 2 * steps)
        diff = fine - coarse
        err = float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())
        if err < RICHARDSON_TOL:
            return JointState(joint.dims, fine)
        coarse, steps = fine, 2 * steps
    raise NumericalError(
        "RK4 refinement did not converge",
        {"steps": steps, "trace_norm_error": err, "duration": duration},
    )


def lindblad_trajectory(sys, joint, rabi, detuning, times, polarization="pi") -> list:
    """States at each of the increasing ``times``, starting from ``joint`` at t=0."""
    out = []
    t_prev, current = 0.0, joint
    for t in times:
        if t < t_prev:
            raise ValueError("times must be non-decreasing")
        current = lindblad_evolve(sys, current, rabi, detuning, t - t_prev, polarization)
        out.append(current)
        t_prev = t
    return out
