"""Analytic algebra of the Gaussian pointer.

An impulsive coupling of strength g displaces the initial Gaussian into one
shifted copy per observable eigenvalue.  Pointer states after the
interaction therefore live in the span of d shifted Gaussians, and every
paper-level quantity reduces to finite sums against the frame Gram matrix

    G[nu, mu] = exp(-g^2 (a_nu - a_mu)^2 / (8 Delta^2)),

which this module evaluates in closed form.  Dense grids appear only in
:mod:`wvlab.oracle`; :func:`frame_to_grid` is the bridge used to cross-check
the two representations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wvlab.oracle import Grid, TAIL_SIGMAS

TRACE_ATOL = 1e-10
POSITIVITY_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class GaussianPointer:
    """Gaussian pointer wavefunction with position spread delta, centered at 0."""

    delta: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError(f"pointer spread must be positive, got {self.delta}")
        if self.center != 0.0:
            raise ValueError("only pointers centered at q = 0 are supported")

    def wavefunction(self, q, shift: float = 0.0) -> np.ndarray:
        """Sample phi(q - shift) = (2 pi delta^2)^(-1/4) exp(-(q-shift)^2 / (4 delta^2))."""
        q = np.asarray(q, dtype=float)
        return (2.0 * np.pi * self.delta**2) ** -0.25 * np.exp(
            -((q - shift) ** 2) / (4.0 * self.delta**2)
        )


@dataclass(frozen=True, eq=False)
class PointerFrame:
    """The d shifted Gaussians spanned by one coupling, with their Gram matrix."""

    pointer: GaussianPointer
    g: float
    shifts: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        if self.g < 0.0:
            raise ValueError(f"coupling strength must be non-negative, got {self.g}")
        shifts = np.asarray(self.shifts, dtype=float)
        shifts.setflags(write=False)
        gram = np.asarray(self.gram, dtype=float)
        gram.setflags(write=False)
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "gram", gram)

    @classmethod
    def from_eigenvalues(cls, pointer: GaussianPointer, g: float, eigenvalues) -> "PointerFrame":
        if g < 0.0:
            raise ValueError(f"coupling strength must be non-negative, got {g}")
        shifts = g * np.asarray(eigenvalues, dtype=float)
        diff = shifts[:, None] - shifts[None, :]
        gram = np.exp(-(diff**2) / (8.0 * pointer.delta**2))
        return cls(pointer=pointer, g=float(g), shifts=shifts, gram=gram)

    @property
    def dim(self) -> int:
        return self.shifts.size

    @property
    def initial_overlaps(self) -> np.ndarray:
        """Overlaps k_nu = <phi|phi_nu> = exp(-shift_nu^2 / (8 delta^2))."""
        return np.exp(-(self.shifts**2) / (8.0 * self.pointer.delta**2))


def overlap_kernel(frame: PointerFrame, nu: int, mu: int) -> float:
    """Gram entry G[nu, mu]; equals 1 on the diagonal."""
    d = frame.dim
    if not (0 <= nu < d and 0 <= mu < d):
        raise IndexError(f"indices ({nu}, {mu}) out of range for a {d}-vector frame")
    return float(frame.gram[nu, mu])


@dataclass(frozen=True, eq=False)
class FrameOperator:
    """Pointer operator sum_{nu mu} coeff[nu, mu] |phi_nu><phi_mu| in a frame."""

    frame: PointerFrame
    coeff: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeff, dtype=complex)
        d = self.frame.dim
        if c.shape != (d, d):
            raise ValueError(f"coefficients must be ({d}, {d}), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeff", c)

    @property
    def trace(self) -> complex:
        return complex((self.coeff * self.frame.gram).sum())

    @property
    def is_hermitian(self) -> bool:
        return bool(np.abs(self.coeff - self.coeff.conj().T).max() <= 1e-12)

    def frame_eigenvalues(self) -> np.ndarray:
        """Operator eigenvalues on the frame span, via G^(1/2) c G^(1/2)."""
        vals, vecs = np.linalg.eigh(self.frame.gram)
        root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
        return np.linalg.eigvalsh(root @ self.coeff @ root)


def _require_state(op: FrameOperator, check_positive: bool):
    if abs(op.trace - 1.0) > TRACE_ATOL:
        raise ValueError(f"frame operator trace deviates from 1 by {abs(op.trace - 1.0):.3e}")
    if check_positive:
        if not op.is_hermitian:
            raise ValueError("frame operator is not Hermitian")
        smallest = op.frame_eigenvalues().min()
        if smallest < POSITIVITY_FLOOR:
            raise ValueError(f"frame operator has negative eigenvalue {smallest:.3e}")


def frame_position_mean(op: FrameOperator) -> float:
    """Tr(q op) from <phi_mu|q|phi_nu> = (shift_nu + shift_mu)/2 * G[nu, mu]."""
    _require_state(op, check_positive=False)
    s = op.frame.shifts
    moment = 0.5 * (s[:, None] + s[None, :]) * op.frame.gram
    value = (op.coeff * moment).sum()
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ValueError(f"position mean came out non-real: {value}")
    return float(value.real)


def fidelity_with_initial(op: FrameOperator) -> float:
    """Overlap <phi|op|phi>, the squared-convention pointer fidelity."""
    _require_state(op, check_positive=True)
    k = op.frame.initial_overlaps
    value = k @ op.coeff @ k
    return float(value.real)


def frame_to_grid(op: FrameOperator, grid: Grid) -> np.ndarray:
    """Dense position-representation matrix of a frame operator.

    Uses the same square-root trapezoid weight convention as the oracle, so
    traces and products of the result approximate continuum values.
    """
    s = op.frame.shifts
    delta = op.frame.pointer.delta
    margin = TAIL_SIGMAS * delta
    if s.min() - margin < grid.q_min or s.max() + margin > grid.q_max:
        raise ValueError(
            f"grid [{grid.q_min}, {grid.q_max}] too narrow for shifts in "
            f"[{s.min()}, {s.max()}] plus {margin} of Gaussian tail"
        )
    q = grid.points
    sqrt_w = np.sqrt(grid.weights)
    waves = np.stack([sqrt_w * op.frame.pointer.wavefunction(q, shift) for shift in s])
    dense = waves.T @ op.coeff @ waves.conj()
    if abs(np.trace(dense) - op.trace) > 1e-8:
        raise ValueError("grid representation lost trace; widen the grid")
    return dense
