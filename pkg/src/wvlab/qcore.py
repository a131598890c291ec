"""Finite-dimensional quantum state and observable algebra with distance measures.

States are plain immutable wrappers around numpy arrays, validated on
construction.  Distances come in two flavours used throughout the toolkit:
the trace distance D = (1/2) Tr|rho1 - rho2| and the Uhlmann fidelity
F = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).  Pointer-state formulas elsewhere
use the squared (overlap) fidelity convention instead; see
:func:`wvlab.pointer.fidelity_with_initial`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
NORM_ATOL = 1e-12
ORTHONORMAL_ATOL = 1e-12
# Post-selection arithmetic introduces rounding at the 1e-10 scale, so
# eigenvalues are allowed to dip slightly below zero.
EIGENVALUE_FLOOR = -1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen_array(self.amplitudes)
        if amp.ndim != 1 or amp.size == 0:
            raise ValueError(f"amplitudes must be a non-empty vector, got shape {amp.shape}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state vector is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite matrix with unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > HERMITIAN_ATOL:
            raise ValueError("density matrix is not Hermitian")
        trace = m.trace()
        if abs(trace - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace deviates from 1 by {abs(trace - 1.0):.3e}")
        smallest = np.linalg.eigvalsh(m).min()
        if smallest < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return state.density()

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian observable stored pre-diagonalized.

    Every formula in the toolkit is written in the eigenbasis of the
    measured observable, so diagonalization happens once at construction.
    ``eigenvectors`` holds the eigenstates as columns; degenerate
    eigenvalues are allowed.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = _frozen_array(self.eigenvalues, dtype=float)
        vecs = _frozen_array(self.eigenvectors)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("eigenvalues must be a non-empty real vector")
        if vecs.ndim != 2 or vecs.shape != (vals.size, vals.size):
            raise ValueError(
                f"eigenvectors must be a ({vals.size}, {vals.size}) matrix of columns, "
                f"got shape {vecs.shape}"
            )
        gram = vecs.conj().T @ vecs
        if np.abs(gram - np.eye(vals.size)).max() > ORTHONORMAL_ATOL:
            raise ValueError("eigenvectors are not orthonormal")
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @classmethod
    def from_matrix(cls, matrix) -> "Observable":
        m = np.asarray(matrix, dtype=complex)
        if np.abs(m - m.conj().T).max() > HERMITIAN_ATOL:
            raise ValueError("observable matrix is not Hermitian")
        vals, vecs = np.linalg.eigh(m)
        return cls(vals, vecs)

    @property
    def matrix(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T

    def eigenstate(self, index: int) -> PureState:
        return PureState(self.eigenvectors[:, index])


@dataclass(frozen=True, eq=False)
class BlochVector:
    """Real 3-vector with |r| <= 1 describing a qubit state."""

    r: np.ndarray

    def __post_init__(self):
        r = _frozen_array(self.r, dtype=float)
        if r.shape != (3,):
            raise ValueError(f"Bloch vector must have shape (3,), got {r.shape}")
        if np.linalg.norm(r) > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector length {np.linalg.norm(r):.15f} exceeds 1")
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))


def _check_same_dim(a: DensityMatrix, b: DensityMatrix):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Trace distance D = (1/2) Tr|a - b|.

    The difference of two density matrices is Hermitian, so |.| reduces to
    absolute eigenvalues of the difference.
    """
    _check_same_dim(a, b)
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(eigs).sum())


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def uhlmann_fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity F = Tr sqrt(sqrt(a) b sqrt(a)), in [0, 1].

    This is the square-root convention, used for the D <= sqrt(1 - F^2)
    inequality.  For a pure it reduces to sqrt(<phi|b|phi>).
    """
    _check_same_dim(a, b)
    if a.dim == 2:
        # Closed form F^2 = Tr(ab) + 2 sqrt(det(a) det(b)); avoids the
        # sqrt-of-eigenvalue-noise error of the generic route on pure states.
        overlap = np.trace(a.matrix @ b.matrix).real
        det_product = max(np.linalg.det(a.matrix).real, 0.0) * max(
            np.linalg.det(b.matrix).real, 0.0
        )
        squared = overlap + 2.0 * math.sqrt(det_product)
        return float(min(math.sqrt(max(squared, 0.0)), 1.0))
    root = _psd_sqrt(a.matrix)
    inner = root @ b.matrix @ root
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(np.sqrt(vals).sum(), 1.0))


def bloch_vector(rho: DensityMatrix) -> BlochVector:
    """Bloch vector of a qubit state, rho = (1 + r.sigma)/2."""
    if rho.dim != 2:
        raise ValueError(f"Bloch representation requires dim 2, got {rho.dim}")
    r = np.array(
        [
            np.trace(rho.matrix @ PAULI_X).real,
            np.trace(rho.matrix @ PAULI_Y).real,
            np.trace(rho.matrix @ PAULI_Z).real,
        ]
    )
    return BlochVector(r)


def from_bloch_vector(r) -> DensityMatrix:
    """Inverse of :func:`bloch_vector`."""
    vec = r.r if isinstance(r, BlochVector) else np.asarray(r, dtype=float)
    vec = BlochVector(vec).r
    matrix = 0.5 * (np.eye(2, dtype=complex) + vec[0] * PAULI_X + vec[1] * PAULI_Y + vec[2] * PAULI_Z)
    return DensityMatrix(matrix)


def identification_probability(distance: float) -> float:
    """Success probability (1 + D)/2 of telling two states apart optimally."""
    if not 0.0 <= distance <= 1.0:
        raise ValueError(f"trace distance must lie in [0, 1], got {distance}")
    return 0.5 * (1.0 + distance)
