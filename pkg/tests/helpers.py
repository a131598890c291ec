"""Shared test utilities: random-state generators and independent oracles.

The quadrature and small-matrix routines here are deliberately written
against the raw definitions (sampled integrals, generic eigensolvers) so
they stay independent of the closed-form paths they are used to check.
"""

from __future__ import annotations

import numpy as np

from wvlab.qcore import DensityMatrix, Observable, PureState


def random_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    matrix = ginibre @ ginibre.conj().T
    return DensityMatrix(matrix / np.trace(matrix).real)


def random_pure(rng: np.random.Generator, dim: int) -> PureState:
    amp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(amp / np.linalg.norm(amp))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(ginibre)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_observable(rng: np.random.Generator, dim: int, eigenvalues=None) -> Observable:
    if eigenvalues is None:
        eigenvalues = np.sort(rng.uniform(-2.0, 2.0, dim))
    return Observable(np.asarray(eigenvalues, dtype=float), random_unitary(rng, dim))


def random_bloch_density(rng: np.random.Generator) -> DensityMatrix:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    radius = rng.uniform(0.0, 1.0) ** (1.0 / 3.0)
    r = radius * direction
    from wvlab.qcore import from_bloch_vector

    return from_bloch_vector(r)


# ---------------------------------------------------------------------------
# quadrature oracles


def gaussian_wave(q: np.ndarray, delta: float, shift: float = 0.0) -> np.ndarray:
    return (2.0 * np.pi * delta**2) ** -0.25 * np.exp(-((q - shift) ** 2) / (4.0 * delta**2))


def quad_grid(delta: float, shifts, n: int = 4001, span: float = 12.0):
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    lo = shifts.min() - span * delta
    hi = shifts.max() + span * delta
    q = np.linspace(lo, hi, n)
    w = np.full(n, q[1] - q[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return q, w


def quad_overlap(delta: float, s1: float, s2: float) -> float:
    """Trapezoid integral of two shifted Gaussian wavefunctions."""
    q, w = quad_grid(delta, [s1, s2])
    return float((w * gaussian_wave(q, delta, s1) * gaussian_wave(q, delta, s2)).sum())


def quad_frame_matrix(coeff: np.ndarray, shifts, delta: float, n: int = 4001):
    """Dense grid matrix of sum c[nu,mu] |phi_nu><phi_mu| with weights folded in."""
    q, w = quad_grid(delta, shifts, n=n)
    waves = np.stack([np.sqrt(w) * gaussian_wave(q, delta, s) for s in np.atleast_1d(shifts)])
    return q, waves.T @ np.asarray(coeff, dtype=complex) @ waves.conj()


def quad_position_mean(coeff: np.ndarray, shifts, delta: float) -> float:
    """Grid quadrature of q times the frame-operator diagonal."""
    q, dense = quad_frame_matrix(coeff, shifts, delta)
    return float((q * dense.diagonal().real).sum())


def quad_initial_overlap(coeff: np.ndarray, shifts, delta: float) -> float:
    """Grid quadrature of <phi| op |phi> for a frame operator."""
    q, dense = quad_frame_matrix(coeff, shifts, delta)
    w = np.full(q.size, q[1] - q[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    wave = np.sqrt(w) * gaussian_wave(q, delta)
    return float(np.real(wave @ dense @ wave.conj()))


def frame_exact_eigenvalues(coeff: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Eigenvalues of a frame operator via the Gram-embedded small matrix."""
    vals, vecs = np.linalg.eigh(gram)
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    return np.linalg.eigvalsh(root @ coeff @ root)


def frame_exact_trace_distance(
    coeff_a: np.ndarray, shifts_a, coeff_b: np.ndarray, shifts_b, delta: float
) -> float:
    """Trace distance of two frame operators on the joint (possibly rank
    deficient) frame of all their shift vectors."""
    shifts_a = np.atleast_1d(np.asarray(shifts_a, dtype=float))
    shifts_b = np.atleast_1d(np.asarray(shifts_b, dtype=float))
    shifts = np.concatenate([shifts_a, shifts_b])
    diff = shifts[:, None] - shifts[None, :]
    gram = np.exp(-(diff**2) / (8.0 * delta**2))
    na = shifts_a.size
    coeff = np.zeros((shifts.size, shifts.size), dtype=complex)
    coeff[:na, :na] = coeff_a
    coeff[na:, na:] = -np.asarray(coeff_b, dtype=complex)
    return float(0.5 * np.abs(frame_exact_eigenvalues(coeff, gram)).sum())
