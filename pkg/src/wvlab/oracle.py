"""Brute-force verifier on a position grid.

Everything here is raw numerical linear algebra: the joint state is
materialized as a dense matrix over (system basis) x (grid points) and all
observables are recomputed by plain sums.  No analytic overlap kernels and
no closed-form results enter this module; it depends only on
:mod:`wvlab.qcore` and grid math, so its agreement with the exact engine is
an independent check.

Quadrature is the trapezoid rule with the square-root weights folded into
the sampled wavefunctions, so Euclidean inner products of stored vectors
approximate L2 inner products.  The shifted Gaussians are sampled from the
known analytic action of the impulsive coupling, which keeps discretization
error down to quadrature and tail truncation only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from wvlab.qcore import DensityMatrix, PureState

if TYPE_CHECKING:  # pragma: no cover - annotation only, keeps oracle free of engine code
    from wvlab.engine import MeasurementSetup

TAIL_SIGMAS = 8.0
MIN_POINTS = 256
TRACE_ATOL = 1e-8
LOW_STATISTICS_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform position grid with trapezoid quadrature weights."""

    q_min: float
    q_max: float
    n_points: int = 2048

    def __post_init__(self):
        if self.n_points < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points, got {self.n_points}")
        if not self.q_max > self.q_min:
            raise ValueError(f"empty grid: q_min={self.q_min}, q_max={self.q_max}")

    @classmethod
    def for_setup(cls, setup: "MeasurementSetup", n_points: int = 2048) -> "Grid":
        """Grid spanning every pointer shift g*a_nu plus 8 spreads of tail."""
        reach = float(np.abs(setup.g * setup.observable.eigenvalues).max())
        half_width = reach + TAIL_SIGMAS * setup.pointer.delta
        return cls(-half_width, half_width, n_points)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass(frozen=True, eq=False)
class DenseJoint:
    """Dense system (x) pointer state in the position representation.

    ``matrix`` has shape (d*n, d*n) with the square-root trapezoid weights
    folded into the pointer axis; its plain trace and plain matrix algebra
    therefore approximate the continuum quantities directly.
    """

    grid: Grid
    system_dim: int
    matrix: np.ndarray

    @property
    def tensor(self) -> np.ndarray:
        """View of the matrix as a (d, n, d, n) tensor."""
        n = self.grid.n_points
        d = self.system_dim
        return self.matrix.reshape(d, n, d, n)


@dataclass(frozen=True)
class OracleObservables:
    q_mean: float
    p_f: Optional[float]
    rho_reduced: DensityMatrix
    sigma_reduced: np.ndarray
    low_statistics: bool = False


def _sample_wave(q: np.ndarray, delta: float, shift: float = 0.0) -> np.ndarray:
    return (2.0 * np.pi * delta**2) ** -0.25 * np.exp(-((q - shift) ** 2) / (4.0 * delta**2))


def build_joint(setup: "MeasurementSetup", grid: Grid) -> DenseJoint:
    """Materialize the post-coupling joint state on the grid.

    The impulsive coupling exp(-i g A p) sends the initial Gaussian to a
    Gaussian shifted by g*a_nu on each eigenbranch; those branch waves are
    sampled analytically and the joint matrix assembled from them.
    """
    eigenvalues = np.asarray(setup.observable.eigenvalues, dtype=float)
    shifts = setup.g * eigenvalues
    delta = setup.pointer.delta
    margin = TAIL_SIGMAS * delta
    if shifts.min() - margin < grid.q_min or shifts.max() + margin > grid.q_max:
        raise ValueError(
            f"grid [{grid.q_min}, {grid.q_max}] too narrow for shifts in "
            f"[{shifts.min()}, {shifts.max()}] plus {margin} of Gaussian tail"
        )

    q = grid.points
    sqrt_w = np.sqrt(grid.weights)
    waves = np.stack([sqrt_w * _sample_wave(q, delta, s) for s in shifts])

    vecs = setup.observable.eigenvectors
    blocks = vecs.conj().T @ setup.rho_i.matrix @ vecs
    if np.abs(blocks - blocks.conj().T).max() > 1e-12:
        raise ValueError("initial state is not Hermitian in the measured eigenbasis")

    d = eigenvalues.size
    n = grid.n_points
    # branch[(a, i), nu] = <a|chi_nu> * wave_nu(q_i); joint = branch B branch^dagger
    branch = (vecs[:, None, :] * waves.T[None, :, :]).reshape(d * n, d)
    joint = branch @ (blocks @ branch.conj().T)

    trace = np.trace(joint).real
    if abs(trace - 1.0) > TRACE_ATOL:
        raise ValueError(f"dense joint trace deviates from 1 by {abs(trace - 1.0):.3e}")
    # Hermiticity of branch B branch^dagger follows from B = B^dagger (checked
    # above); spot-check a strided sample rather than forming a full copy.
    sample = joint[:: max(1, d * n // 64), :: max(1, d * n // 64)]
    if np.abs(sample - sample.conj().T).max() > 1e-10:
        raise ValueError("dense joint failed the Hermiticity check")
    return DenseJoint(grid=grid, system_dim=d, matrix=joint)


def oracle_observables(dj: DenseJoint, f: Optional[PureState] = None) -> OracleObservables:
    """Recompute pointer mean, post-selection probability and reduced states.

    All quantities come from plain sums over the dense tensor.  With ``f``
    given, ``q_mean`` and ``sigma_reduced`` describe the post-selected
    pointer and ``rho_reduced`` the post-selected system.
    """
    tensor = dj.tensor
    q = dj.grid.points
    d = dj.system_dim

    system_traced = np.einsum("aibi->ab", tensor)

    if f is None:
        pointer_matrix = np.einsum("aiaj->ij", tensor)
        q_mean = float((q * pointer_matrix.diagonal().real).sum())
        rho = 0.5 * (system_traced + system_traced.conj().T)
        rho = rho / rho.trace().real
        return OracleObservables(
            q_mean=q_mean,
            p_f=None,
            rho_reduced=DensityMatrix(rho),
            sigma_reduced=pointer_matrix,
        )

    if f.dim != d:
        raise ValueError(f"post-selection dimension {f.dim} does not match system {d}")
    amp = f.amplitudes
    p_f = float(np.real(amp.conj() @ system_traced @ amp))
    low_statistics = p_f < LOW_STATISTICS_THRESHOLD
    if p_f <= 0.0:
        raise ValueError("post-selection probability vanished on the grid")

    sigma_f = np.einsum("a,aibj,b->ij", amp.conj(), tensor, amp) / p_f
    q_mean = float((q * sigma_f.diagonal().real).sum())
    rho_f = np.outer(amp, amp.conj())
    return OracleObservables(
        q_mean=q_mean,
        p_f=p_f,
        rho_reduced=DensityMatrix(rho_f),
        sigma_reduced=sigma_f,
        low_statistics=low_statistics,
    )


def initial_pointer_fidelity(sigma: np.ndarray, grid: Grid, delta: float) -> float:
    """Overlap <phi|sigma|phi> of a grid pointer state with the initial Gaussian."""
    wave = np.sqrt(grid.weights) * _sample_wave(grid.points, delta)
    return float(np.real(wave @ sigma @ wave.conj()))


def grid_trace_distance(sigma_a: np.ndarray, sigma_b: np.ndarray) -> float:
    """Trace distance of two grid-represented pointer states."""
    diff = sigma_a - sigma_b
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


@dataclass(frozen=True)
class ConvergenceRow:
    n_points: int
    q_mean_error: float
    p_f_error: float


def convergence_report(
    setup: "MeasurementSetup",
    f: PureState,
    n_list: Sequence[int],
    reference_q_mean: float,
    reference_p_f: float,
) -> list[ConvergenceRow]:
    """Oracle error against caller-supplied exact values for increasing grids.

    The reference values come from the closed-form engine; they are passed
    in so that this module never has to import it.
    """
    if list(n_list) != sorted(n_list) or len(n_list) == 0:
        raise ValueError("n_list must be non-empty and ascending")
    rows = []
    for n in n_list:
        grid = Grid.for_setup(setup, n_points=int(n))
        result = oracle_observables(build_joint(setup, grid), f)
        rows.append(
            ConvergenceRow(
                n_points=int(n),
                q_mean_error=abs(result.q_mean - reference_q_mean),
                p_f_error=abs(result.p_f - reference_p_f),
            )
        )
    return rows
