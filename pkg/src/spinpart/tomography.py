"""Spin-1 pair tomography from samples of the pair Husimi function.

A pair density matrix expands on the identity and eight multipole operators,

    rho = 1/3 + sum_m lambda_{1,m} L_m + sum_m lambda_{2,m} Q_m,

and its Husimi function on the matching spherical harmonics,

    Q(n) = 1/3 + sqrt(4 pi / 3) sum_{l,m} lambda_{l,m} Y_l^m(n).

Both use the pair basis order ``(+1, 0, -1)``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .angular import Direction
from .partition import PairState

MULTIPOLE_KEYS = ((1, -1), (1, 0), (1, 1), (2, -2), (2, -1), (2, 0), (2, 1), (2, 2))

# fit parameters: real lambda_{l,0}, then (Re, Im) of lambda_{l,m} for m > 0
_REAL_PARAMS = ((1, 0, "re"), (1, 1, "re"), (1, 1, "im"), (2, 0, "re"), (2, 1, "re"), (2, 1, "im"), (2, 2, "re"), (2, 2, "im"))

UNPHYSICAL_TOL = 1e-6
MAX_CONDITION = 1e8


def _pair_angular_momentum():
    lz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    lplus = np.array([[0, math.sqrt(2), 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=complex)
    return lplus, lplus.conj().T, lz


def multipole_operators() -> dict:
    """The dipole ``L_m`` and quadrupole ``Q_m`` operators keyed by ``(l, m)``."""
    lp, lm, lz = _pair_angular_momentum()
    eye = np.eye(3)
    ops = {
        (1, 0): lz,
        (1, 1): -lp / math.sqrt(2),
        (1, -1): lm / math.sqrt(2),
        (2, 0): math.sqrt(5 / 3) * (3 * lz @ lz - 2 * eye),
        (2, 1): -math.sqrt(5 / 2) * (lp @ lz + lz @ lp),
        (2, -1): math.sqrt(5 / 2) * (lm @ lz + lz @ lm),
        (2, 2): math.sqrt(5 / 2) * lp @ lp,
        (2, -2): math.sqrt(5 / 2) * lm @ lm,
    }
    for op in ops.values():
        op.setflags(write=False)
    return ops


_OPS = multipole_operators()
_NORMS = {key: np.trace(op.conj().T @ op).real for key, op in _OPS.items()}


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal ``Y_l^m`` with the Condon-Shortley phase, for ``l <= 2``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    if abs(m) > l or l not in (0, 1, 2):
        raise ValueError(f"unsupported harmonic ({l}, {m})")
    am = abs(m)
    if l == 0:
        base = np.full_like(ct, 0.5 / math.sqrt(math.pi))
    elif l == 1:
        base = math.sqrt(3 / (4 * math.pi)) * ct if am == 0 else -math.sqrt(3 / (8 * math.pi)) * st
    elif am == 0:
        base = math.sqrt(5 / (16 * math.pi)) * (3 * ct**2 - 1)
    elif am == 1:
        base = -math.sqrt(15 / (8 * math.pi)) * st * ct
    else:
        base = math.sqrt(15 / (32 * math.pi)) * st**2
    y = base * np.exp(1j * am * phi)
    if m < 0:
        y = (-1) ** am * np.conj(y)
    return y


@dataclass(frozen=True)
class MultipoleCoefficients:
    """``lambda_{l,m}`` for ``l = 1, 2`` with fit diagnostics when available."""

    values: dict
    residual_norm: float | None = None
    condition_number: float | None = None

    def __getitem__(self, key) -> complex:
        return self.values[key]

    @classmethod
    def zero(cls) -> "MultipoleCoefficients":
        return cls({key: 0j for key in MULTIPOLE_KEYS})

    def is_conjugation_symmetric(self, tol: float = 1e-12) -> bool:
        return all(
            abs(self.values[(l, -m)] - (-1) ** m * np.conj(self.values[(l, m)])) <= tol
            for l, m in MULTIPOLE_KEYS
        )


def coefficients_of(pair: PairState) -> MultipoleCoefficients:
    """Hilbert-Schmidt projection of ``pair`` onto the multipole basis."""
    rho = pair.matrix
    return MultipoleCoefficients(
        {key: complex(np.trace(op.conj().T @ rho) / _NORMS[key]) for key, op in _OPS.items()}
    )


def husimi_from_coefficients(coeffs: MultipoleCoefficients, theta, phi):
    total = 0.0
    for l, m in MULTIPOLE_KEYS:
        total = total + coeffs[(l, m)] * spherical_harmonic(l, m, theta, phi)
    return (1 / 3 + math.sqrt(4 * math.pi / 3) * total).real


def husimi_forward(pair: PairState, n: Direction) -> float:
    """Pair Husimi function from the harmonic expansion of ``pair``."""
    return float(husimi_from_coefficients(coefficients_of(pair), n.theta, n.phi))


def _design_matrix(theta, phi) -> np.ndarray:
    scale = math.sqrt(4 * math.pi / 3)
    cols = []
    for l, m, part in _REAL_PARAMS:
        y = spherical_harmonic(l, m, theta, phi)
        if m == 0:
            cols.append(scale * y.real)
        elif part == "re":
            # lambda_m Y_m + lambda_-m Y_-m = 2 Re(lambda_m Y_m)
            cols.append(2 * scale * y.real)
        else:
            cols.append(-2 * scale * y.imag)
    return np.column_stack(cols)


def fit_husimi(samples=None, *, theta=None, phi=None, values=None, weights=None) -> MultipoleCoefficients:
    """Least-squares harmonic fit of Husimi samples.

    Pass ``samples`` as ``(Direction, value)`` pairs, or the arrays
    ``theta``, ``phi`` and ``values`` directly. Optional ``weights`` multiply
    each residual. The constant term is pinned at 1/3 so the reconstructed
    state always has unit trace.

    Raises:
        ValueError: fewer than nine samples, or nodes that cannot resolve
            all eight harmonics.
    """
    if samples is not None:
        samples = list(samples)
        theta = np.array([n.theta for n, _ in samples])
        phi = np.array([n.phi for n, _ in samples])
        values = np.array([v for _, v in samples], dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) < 9:
        raise ValueError(f"need at least 9 samples, got {len(values)}")
    a = _design_matrix(theta, phi)
    b = values - 1 / 3
    if weights is not None:
        w = np.sqrt(np.asarray(weights, dtype=float))
        a = a * w[:, None]
        b = b * w
    sv = np.linalg.svd(a, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > MAX_CONDITION:
        raise ValueError(f"rank-deficient sample design (condition number {cond:.3g})")
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.linalg.norm(a @ x - b))
    vals = {}
    for (l, m, part), xi in zip(_REAL_PARAMS, x):
        if m == 0:
            vals[(l, 0)] = complex(xi)
        elif part == "re":
            vals[(l, m)] = complex(xi, vals.get((l, m), 0j).imag)
        else:
            vals[(l, m)] = complex(vals[(l, m)].real, xi)
    for l, m in list(vals):
        if m > 0:
            vals[(l, -m)] = (-1) ** m * np.conj(vals[(l, m)])
    return MultipoleCoefficients(vals, residual_norm=residual, condition_number=cond)


@dataclass(frozen=True)
class Reconstruction:
    """Reconstructed pair state; positivity is reported, not imposed."""

    pair: PairState
    eigenvalues: np.ndarray
    physical: bool
    clipped: bool = False
    coefficients: MultipoleCoefficients | None = field(default=None, compare=False)


def reconstruct_pair_state(coeffs: MultipoleCoefficients, clip: bool = False) -> Reconstruction:
    """Assemble ``1/3 + sum lambda_{1,m} L_m + sum lambda_{2,m} Q_m``.

    With ``clip=True`` negative eigenvalues are set to zero and the trace
    renormalized; the result is flagged as clipped.
    """
    rho = np.eye(3, dtype=complex) / 3
    for key in MULTIPOLE_KEYS:
        rho = rho + coeffs[key] * _OPS[key]
    rho = 0.5 * (rho + rho.conj().T)
    w = np.linalg.eigvalsh(rho)
    physical = bool(w.min() >= -UNPHYSICAL_TOL)
    if clip:
        return Reconstruction(clip_to_physical(PairState(rho)), w, physical, clipped=True, coefficients=coeffs)
    return Reconstruction(PairState(rho), w, physical, coefficients=coeffs)


def clip_to_physical(pair: PairState) -> PairState:
    """Nearest-spectrum physical state: clip negative eigenvalues, renormalize."""
    w, v = np.linalg.eigh(pair.matrix)
    w = np.clip(w, 0.0, None)
    return PairState((v * (w / w.sum())) @ v.conj().T)


def read_husimi_csv(path):
    """Read ``theta_rad,phi_rad,q_value[,weight]``; returns four arrays.

    The weight column is optional; ``weights`` is ``None`` when absent.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header[:3] != ["theta_rad", "phi_rad", "q_value"]:
        raise ValueError(f"{path}: expected header theta_rad,phi_rad,q_value[,weight], got {','.join(header)}")
    data = np.array([[float(x) for x in row] for row in rows[1:] if row], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no samples")
    weights = data[:, 3] if len(header) > 3 and data.shape[1] > 3 else None
    return data[:, 0], data[:, 1], data[:, 2], weights


def write_husimi_csv(path, theta, phi, values, weights=None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["theta_rad", "phi_rad", "q_value"] + (["weight"] if weights is not None else []))
        for i in range(len(values)):
            row = [f"{theta[i]:.15g}", f"{phi[i]:.15g}", f"{values[i]:.15g}"]
            if weights is not None:
                row.append(f"{weights[i]:.15g}")
            writer.writerow(row)


def matrix_to_json(matrix) -> list:
    """Nested ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def reconstruction_to_dict(rec: Reconstruction) -> dict:
    coeffs = rec.coefficients
    return {
        "basis": ["+1", "0", "-1"],
        "matrix": matrix_to_json(rec.pair.matrix),
        "diagnostics": {
            "eigenvalues": [float(x) for x in rec.eigenvalues],
            "physical": rec.physical,
            "clipped": rec.clipped,
            "residual_norm": None if coeffs is None else coeffs.residual_norm,
            "condition_number": None if coeffs is None else coeffs.condition_number,
        },
        "coefficients": None
        if coeffs is None
        else {f"{l},{m}": [float(coeffs[(l, m)].real), float(coeffs[(l, m)].imag)] for l, m in MULTIPOLE_KEYS},
    }


def write_reconstruction_json(path, rec: Reconstruction, metadata: dict | None = None) -> None:
    doc = {"metadata": metadata or {}, **reconstruction_to_dict(rec)}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
