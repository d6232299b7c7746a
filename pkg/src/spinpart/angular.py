"""Angular-momentum algebra in the Dicke basis.

Every matrix in the package is written in the basis ``|J, m>`` ordered from
``m = -J`` up to ``m = +J``. Quantum numbers are carried around as
*twice* their value (``two_j``, ``two_m``) so that half-integer spins never
go through float equality.

Rotations follow a single convention everywhere::

    R(theta, phi) = exp(-i phi Jz) exp(-i theta Jy)

so that ``R(n)|m>`` is the eigenvector of ``J.n`` with eigenvalue ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational, Real
from typing import NamedTuple, Union

import numpy as np

TWO_PI = 2.0 * math.pi

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10


def twice(x) -> int:
    """Return ``2*x`` as an int, refusing anything that is not a half-integer."""
    if isinstance(x, AngularMomentum):
        return x.two_j
    if isinstance(x, Rational):
        doubled = 2 * Fraction(x)
        if doubled.denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        return int(doubled)
    if isinstance(x, Real):
        doubled = 2.0 * float(x)
        rounded = round(doubled)
        if abs(doubled - rounded) > 1e-9:
            raise ValueError(f"{x} is not a half-integer")
        return int(rounded)
    if isinstance(x, str):
        return twice(Fraction(x))
    raise TypeError(f"cannot interpret {x!r} as a half-integer")


@dataclass(frozen=True, order=True)
class AngularMomentum:
    """A spin quantum number stored as ``two_j = 2J``."""

    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 0:
            raise ValueError(f"two_j must be a non-negative integer, got {self.two_j!r}")
        object.__setattr__(self, "two_j", int(self.two_j))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def two_ms(self) -> np.ndarray:
        """Twice the magnetic quantum numbers, in basis order."""
        return np.arange(-self.two_j, self.two_j + 1, 2)

    @property
    def ms(self) -> np.ndarray:
        return self.two_ms / 2

    @property
    def is_integer(self) -> bool:
        return self.two_j % 2 == 0

    def index(self, m) -> int:
        """Basis index of the magnetic sublevel ``m``."""
        two_m = twice(m)
        if abs(two_m) > self.two_j or (two_m + self.two_j) % 2:
            raise ValueError(f"m={m} is not a sublevel of J={self}")
        return (two_m + self.two_j) // 2

    def __str__(self) -> str:
        return str(self.two_j // 2) if self.is_integer else f"{self.two_j}/2"


SpinLike = Union[AngularMomentum, int, float, Fraction, str]


def as_spin(j: SpinLike) -> AngularMomentum:
    """Coerce ``j`` (the value of J, or an AngularMomentum) to AngularMomentum."""
    if isinstance(j, AngularMomentum):
        return j
    return AngularMomentum(twice(j))


@dataclass(frozen=True)
class Direction:
    """A unit vector given by polar angle ``theta`` and azimuth ``phi`` (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not -1e-12 <= theta <= math.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @classmethod
    def from_vector(cls, v) -> "Direction":
        x, y, z = np.asarray(v, dtype=float)
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0:
            raise ValueError("zero vector has no direction")
        return cls(math.acos(max(-1.0, min(1.0, z / r))), math.atan2(y, x))

    @classmethod
    def z(cls) -> "Direction":
        return cls(0.0, 0.0)

    @classmethod
    def equatorial(cls, phi: float) -> "Direction":
        return cls(math.pi / 2, phi)

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpinState:
    """Density matrix of a spin J in the Dicke basis (m = -J ... +J).

    Construction checks shape, Hermiticity and unit trace. Positivity is
    checked by :meth:`is_physical` rather than at construction, because
    least-squares reconstructions are allowed to be slightly unphysical.
    """

    j: AngularMomentum
    matrix: np.ndarray

    def __post_init__(self):
        j = as_spin(self.j)
        rho = np.array(self.matrix, dtype=complex)
        if rho.shape != (j.dim, j.dim):
            raise ValueError(f"matrix shape {rho.shape} does not match J={j} (dim {j.dim})")
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(rho).real}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "matrix", _readonly(rho))

    @classmethod
    def pure(cls, j: SpinLike, vector) -> "SpinState":
        psi = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("cannot build a state from the zero vector")
        psi = psi / norm
        return cls(as_spin(j), np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, j: SpinLike) -> "SpinState":
        j = as_spin(j)
        return cls(j, np.eye(j.dim) / j.dim)

    @property
    def dim(self) -> int:
        return self.j.dim

    @property
    def populations(self) -> np.ndarray:
        """Dicke populations ``rho_{m,m}`` in basis order."""
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_physical(self, tol: float = 1e-9) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def element(self, m1, m2) -> complex:
        """``<m1|rho|m2>``."""
        return complex(self.matrix[self.j.index(m1), self.j.index(m2)])

    def __eq__(self, other):
        return (
            isinstance(other, SpinState)
            and self.j == other.j
            and np.array_equal(self.matrix, other.matrix)
        )

    def allclose(self, other: "SpinState", atol: float = 1e-12) -> bool:
        return self.j == other.j and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)


class SpinOperators(NamedTuple):
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray


@lru_cache(maxsize=None)
def _spin_operators(two_j: int) -> SpinOperators:
    dim = two_j + 1
    two_m = np.arange(-two_j, two_j + 1, 2)
    jz = np.diag(two_m / 2).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    # <m+1|J+|m> = sqrt(J(J+1) - m(m+1)) = sqrt((J-m)(J+m+1))
    for i in range(dim - 1):
        jplus[i + 1, i] = 0.5 * math.sqrt((two_j - two_m[i]) * (two_j + two_m[i] + 2))
    jminus = jplus.conj().T.copy()
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    return SpinOperators(*(_readonly(op) for op in (jx, jy, jz, jplus, jminus)))


def spin_operators(j: SpinLike) -> SpinOperators:
    """Return ``(Jx, Jy, Jz, J+, J-)`` for spin ``j`` as read-only arrays."""
    return _spin_operators(as_spin(j).two_j)


def spin_projection(j: SpinLike, n: Direction) -> np.ndarray:
    """The operator ``J.n``."""
    ops = spin_operators(j)
    nx, ny, nz = n.vector
    return nx * ops.jx + ny * ops.jy + nz * ops.jz


@lru_cache(maxsize=None)
def _jy_eigen(two_j: int):
    w, v = np.linalg.eigh(_spin_operators(two_j).jy)
    return w, v


def rotation_z(j: SpinLike, phi: float) -> np.ndarray:
    """``exp(-i phi Jz)`` (diagonal)."""
    j = as_spin(j)
    return np.diag(np.exp(-1j * phi * j.ms))


def rotation_y(j: SpinLike, theta: float) -> np.ndarray:
    """``exp(-i theta Jy)``, the Wigner small-d matrix."""
    w, v = _jy_eigen(as_spin(j).two_j)
    d = (v * np.exp(-1j * theta * w)) @ v.conj().T
    # d is real for the standard phase convention
    return d.real.astype(complex)


def rotation_unitary(j: SpinLike, n: Direction) -> np.ndarray:
    """``R(n) = exp(-i phi Jz) exp(-i theta Jy)``."""
    return rotation_z(j, n.phi) @ rotation_y(j, n.theta)


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | j m>`` (Condon-Shortley phases).

    Arguments are the quantum numbers themselves (half-integers accepted as
    floats, Fractions or strings like ``"3/2"``). The value is computed from
    the Racah formula in exact rational arithmetic and only the final square
    root is taken in floating point.

    Raises:
        ValueError: if the quantum numbers are not a valid coupling.
    """
    t = tuple(twice(x) for x in (j1, m1, j2, m2, j, m))
    tj1, tm1, tj2, tm2, tj, tm = t
    for tjj, tmm in ((tj1, tm1), (tj2, tm2), (tj, tm)):
        if tjj < 0 or abs(tmm) > tjj or (tjj + tmm) % 2:
            raise ValueError(f"invalid quantum numbers {(j1, m1, j2, m2, j, m)}")
    if not abs(tj1 - tj2) <= tj <= tj1 + tj2 or (tj1 + tj2 + tj) % 2:
        raise ValueError(f"triangle rule violated for ({j1}, {j2}, {j})")
    if tm1 + tm2 != tm:
        return 0.0
    return _cg_twice(*t)


@lru_cache(maxsize=4096)
def _cg_twice(tj1, tm1, tj2, tm2, tj, tm) -> float:
    f = math.factorial
    a = (tj1 + tj2 - tj) // 2
    b = (tj1 - tm1) // 2
    c = (tj2 + tm2) // 2
    d = (tj - tj2 + tm1) // 2
    e = (tj - tj1 - tm2) // 2
    pref = Fraction(
        (tj + 1) * f((tj + tj1 - tj2) // 2) * f((tj - tj1 + tj2) // 2) * f(a),
        f((tj1 + tj2 + tj) // 2 + 1),
    )
    pref *= (
        f((tj + tm) // 2) * f((tj - tm) // 2)
        * f((tj1 - tm1) // 2) * f((tj1 + tm1) // 2)
        * f((tj2 - tm2) // 2) * f((tj2 + tm2) // 2)
    )
    total = Fraction(0)
    for k in range(max(0, -d, -e), min(a, b, c) + 1):
        denom = f(k) * f(a - k) * f(b - k) * f(c - k) * f(d + k) * f(e + k)
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    value = math.sqrt(pref * total * total)
    return value if total > 0 else -value


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.abs(op - op.conj().T).max() <= tol


def unitary_from_generator(generator: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i G t)`` for Hermitian ``G``, via eigendecomposition."""
    if not is_hermitian(generator):
        raise ValueError("generator is not Hermitian")
    g = np.asarray(generator, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve(state: SpinState, generator: np.ndarray, t: float) -> SpinState:
    """Return ``U rho U^dagger`` with ``U = exp(-i generator t)``."""
    if np.shape(generator) != (state.dim, state.dim):
        raise ValueError("generator dimension does not match the state")
    u = unitary_from_generator(generator, t)
    return SpinState(state.j, u @ state.matrix @ u.conj().T)


def expectation(state: SpinState, op: np.ndarray) -> complex:
    """``Tr(rho op)``."""
    op = np.asarray(op)
    if op.shape != state.matrix.shape:
        raise ValueError(f"operator shape {op.shape} does not match state dimension {state.dim}")
    return complex(np.einsum("ij,ji->", state.matrix, op))
