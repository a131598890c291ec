"""Exact generalized-measurement sequence for finite-dimensional systems.

The impulsive coupling exp(-i g A p) entangles the system with one shifted
pointer Gaussian per eigenvalue of the measured observable.  Joint states
never materialize a dense pointer dimension: a state is a d x d block
matrix of initial-state elements in the observable eigenbasis paired with
the frame dyads |phi_nu><phi_mu|, and every observable reduces to finite
sums against the frame Gram matrix.  The strong- and weak-coupling limits
(conditional expectation on the pre- and post-selected ensemble, and the
weak value) are implemented as their own closed forms; recovering them from
the exact expression is a test, not the implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from wvlab.pointer import FrameOperator, GaussianPointer, PointerFrame
from wvlab.qcore import DensityMatrix, Observable, PureState

PROBABILITY_FLOOR = 1e-300
IMAG_ATOL = 1e-10


class PostSelectionError(ValueError):
    """Raised when a requested post-selection has vanishing probability."""


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    """Initial state, measured observable, coupling strength and pointer."""

    rho_i: DensityMatrix
    observable: Observable
    g: float
    pointer: GaussianPointer

    def __post_init__(self):
        if self.rho_i.dim != self.observable.dim:
            raise ValueError(
                f"state dimension {self.rho_i.dim} does not match "
                f"observable dimension {self.observable.dim}"
            )
        if self.g < 0.0:
            raise ValueError(f"coupling strength must be non-negative, got {self.g}")


@dataclass(frozen=True, eq=False)
class JointState:
    """System-pointer state after the coupling, optionally post-selected.

    ``blocks`` holds <chi_nu|rho_i|chi_mu>.  Without post-selection the
    system part of block (nu, mu) is |chi_nu><chi_mu|; with post-selection
    it is |f><f| scaled by <f|chi_nu><chi_mu|f> and ``norm`` carries the
    post-selection probability.
    """

    frame: PointerFrame
    observable: Observable
    blocks: np.ndarray
    postselected_on: Optional[PureState] = None
    norm: float = 1.0

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=complex)
        blocks.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return self.observable.dim

    @property
    def is_postselected(self) -> bool:
        return self.postselected_on is not None

    def _final_overlaps(self) -> np.ndarray:
        """<f|chi_nu> for the recorded post-selection."""
        return self.postselected_on.amplitudes.conj() @ self.observable.eigenvectors


def evolve(setup: MeasurementSetup) -> JointState:
    """Joint state after the impulsive coupling (no selection yet)."""
    vecs = setup.observable.eigenvectors
    blocks = vecs.conj().T @ setup.rho_i.matrix @ vecs
    frame = PointerFrame.from_eigenvalues(setup.pointer, setup.g, setup.observable.eigenvalues)
    return JointState(frame=frame, observable=setup.observable, blocks=blocks)


def post_select(js: JointState, f: PureState) -> tuple[JointState, float]:
    """Project the system on |f> and renormalize.

    Returns the selected state together with the probability
    P(f) = sum_{nu mu} <f|chi_nu><chi_mu|f> B[nu, mu] G[nu, mu].
    """
    if js.is_postselected:
        raise ValueError("joint state is already post-selected")
    if f.dim != js.dim:
        raise ValueError(f"post-selection dimension {f.dim} does not match system {js.dim}")
    t = f.amplitudes.conj() @ js.observable.eigenvectors
    probability = np.einsum("n,nm,nm,m->", t, js.blocks, js.frame.gram, t.conj())
    if abs(probability.imag) > IMAG_ATOL:
        raise ValueError(f"post-selection probability came out non-real: {probability}")
    p = float(min(max(probability.real, 0.0), 1.0))
    if p <= PROBABILITY_FLOOR:
        raise PostSelectionError(
            "impossible post-selection: the outcome has vanishing probability"
        )
    selected = JointState(
        frame=js.frame,
        observable=js.observable,
        blocks=js.blocks,
        postselected_on=f,
        norm=p,
    )
    return selected, p


def conditional_pointer_shift(js: JointState) -> float:
    """Exact mean pointer position <q> on the post-selected ensemble.

    Implements (g / P(f)) sum_{nu mu} <f|chi_nu><chi_mu|f> B[nu, mu]
    (a_nu + a_mu)/2 G[nu, mu]; the imaginary part is checked to vanish
    before being discarded.
    """
    if not js.is_postselected:
        raise ValueError("conditional pointer shift needs a post-selected state")
    t = js._final_overlaps()
    s = js.frame.shifts
    moment = 0.5 * (s[:, None] + s[None, :]) * js.frame.gram
    value = np.einsum("n,nm,nm,m->", t, js.blocks, moment, t.conj()) / js.norm
    if abs(value.imag) > IMAG_ATOL * max(1.0, abs(value)):
        raise ValueError(f"conditional pointer shift came out non-real: {value}")
    return float(value.real)


def reduced_system(js: JointState) -> DensityMatrix:
    """Partial trace over the pointer.

    Without post-selection this is the Hadamard product of the blocks with
    the Gram matrix, rotated back from the eigenbasis; the coupling only
    damps coherences between distinct eigenvalues.  For a post-selected
    state the system is |f><f| by construction and is returned directly.
    """
    if js.is_postselected:
        return js.postselected_on.density()
    vecs = js.observable.eigenvectors
    matrix = vecs @ (js.blocks * js.frame.gram) @ vecs.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    return DensityMatrix(matrix)


def reduced_pointer(js: JointState) -> FrameOperator:
    """Partial trace over the system, as a frame operator."""
    if js.is_postselected:
        t = js._final_overlaps()
        coeff = (t[:, None] * js.blocks * t.conj()[None, :]) / js.norm
    else:
        coeff = np.diag(np.diag(js.blocks))
    return FrameOperator(frame=js.frame, coeff=coeff)


def abl_expectation(rho_i: DensityMatrix, observable: Observable, f: PureState) -> float:
    """Conditional expectation for a projective intermediate measurement.

    sum_nu a_nu |<f|chi_nu>|^2 <chi_nu|rho_i|chi_nu> normalized by the same
    sum without a_nu; the strong-coupling limit of the exact sequence.
    """
    if rho_i.dim != observable.dim or f.dim != observable.dim:
        raise ValueError("dimension mismatch between state, observable and post-selection")
    vecs = observable.eigenvectors
    t = f.amplitudes.conj() @ vecs
    populations = np.real(np.einsum("an,ab,bn->n", vecs.conj(), rho_i.matrix, vecs))
    weights = np.abs(t) ** 2 * populations
    denominator = weights.sum()
    if denominator <= PROBABILITY_FLOOR:
        raise PostSelectionError(
            "post-selection impossible after a projective measurement of the observable"
        )
    return float((observable.eigenvalues * weights).sum() / denominator)


def weak_value(rho_i: DensityMatrix, observable: Observable, f: PureState) -> complex:
    """Weak value <f|A rho_i|f> / <f|rho_i|f>; its real part is the g -> 0
    pointer shift per unit coupling."""
    if rho_i.dim != observable.dim or f.dim != observable.dim:
        raise ValueError("dimension mismatch between state, observable and post-selection")
    amp = f.amplitudes
    denominator = np.real(amp.conj() @ rho_i.matrix @ amp)
    if denominator <= PROBABILITY_FLOOR:
        raise PostSelectionError("weak value diverges: pre- and post-selection are orthogonal")
    numerator = amp.conj() @ observable.matrix @ rho_i.matrix @ amp
    return complex(numerator / denominator)


def nonselective_final(js: JointState, basis: Sequence[PureState]) -> DensityMatrix:
    """Re-mix all post-selection outcomes weighted by their probabilities.

    ``basis`` must be a complete orthonormal set of final states; the
    result is sum_f P(f) |f><f|.
    """
    if js.is_postselected:
        raise ValueError("joint state is already post-selected")
    if len(basis) != js.dim:
        raise ValueError(f"need {js.dim} basis states, got {len(basis)}")
    stacked = np.stack([state.amplitudes for state in basis], axis=1)
    if np.abs(stacked.conj().T @ stacked - np.eye(js.dim)).max() > 1e-10:
        raise ValueError("final basis is not orthonormal and complete")

    overlaps = stacked.conj().T @ js.observable.eigenvectors  # [f, nu] = <f|chi_nu>
    probabilities = np.real(
        np.einsum("fn,nm,nm,fm->f", overlaps, js.blocks, js.frame.gram, overlaps.conj())
    )
    total = probabilities.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {total}, not 1")
    matrix = (stacked * probabilities) @ stacked.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    return DensityMatrix(matrix)
