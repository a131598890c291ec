import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    frame_exact_trace_distance,
    quad_initial_overlap,
    quad_overlap,
    quad_position_mean,
)
from wvlab.oracle import Grid
from wvlab.pointer import (
    FrameOperator,
    GaussianPointer,
    PointerFrame,
    fidelity_with_initial,
    frame_position_mean,
    frame_to_grid,
    overlap_kernel,
)

SPIN_EIGENVALUES = np.array([1.0, -1.0])


def spin_frame(g, delta=1.0):
    return PointerFrame.from_eigenvalues(GaussianPointer(delta=delta), g, SPIN_EIGENVALUES)


def weak_pointer_operator(alpha, g, delta=1.0):
    """Reduced pointer state without post-selection for preparation alpha."""
    populations = np.diag([0.5 * (1 + math.sin(alpha)), 0.5 * (1 - math.sin(alpha))])
    return FrameOperator(frame=spin_frame(g, delta), coeff=populations.astype(complex))


class TestGaussianPointer:
    def test_rejects_nonpositive_spread(self):
        with pytest.raises(ValueError, match="positive"):
            GaussianPointer(delta=0.0)

    def test_rejects_shifted_center(self):
        with pytest.raises(ValueError, match="centered"):
            GaussianPointer(delta=1.0, center=0.3)

    def test_wavefunction_is_normalized(self):
        q = np.linspace(-10, 10, 4001)
        density = GaussianPointer(delta=0.7).wavefunction(q) ** 2
        assert np.trapezoid(density, q) == pytest.approx(1.0, abs=1e-10)


class TestOverlapKernel:
    def test_diagonal_is_one(self):
        frame = spin_frame(1.3)
        assert overlap_kernel(frame, 0, 0) == 1.0
        assert overlap_kernel(frame, 1, 1) == 1.0

    def test_spin_half_overlap_at_unit_coupling(self):
        # exp(-g^2 (a1 - a2)^2 / (8 Delta^2)) = exp(-1/2) for a = +-1, g = Delta
        assert overlap_kernel(spin_frame(1.0), 0, 1) == pytest.approx(
            0.6065306597126334, abs=1e-15
        )

    def test_matches_quadrature_oracle(self, rng):
        for _ in range(20):
            delta = rng.uniform(0.3, 2.0)
            g = rng.uniform(0.0, 3.0)
            a = rng.uniform(-2.0, 2.0, size=3)
            frame = PointerFrame.from_eigenvalues(GaussianPointer(delta=delta), g, a)
            nu, mu = rng.integers(0, 3, size=2)
            expected = quad_overlap(delta, g * a[nu], g * a[mu])
            assert overlap_kernel(frame, int(nu), int(mu)) == pytest.approx(expected, abs=1e-10)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            overlap_kernel(spin_frame(1.0), 0, 2)

    def test_monotone_in_coupling(self):
        values = [overlap_kernel(spin_frame(g), 0, 1) for g in (0.0, 0.5, 1.0, 3.0, 1e3)]
        assert values[0] == 1.0
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] == 0.0


@settings(max_examples=60, deadline=None)
@given(
    g=st.floats(0.0, 5.0),
    delta=st.floats(0.2, 3.0),
    eigenvalues=st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=5),
)
def test_gram_matrix_is_positive_semidefinite(g, delta, eigenvalues):
    frame = PointerFrame.from_eigenvalues(GaussianPointer(delta=delta), g, eigenvalues)
    assert np.abs(frame.gram - frame.gram.T).max() == 0.0
    np.testing.assert_allclose(np.diag(frame.gram), 1.0)
    assert np.linalg.eigvalsh(frame.gram).min() >= -1e-12


class TestFramePositionMean:
    def test_unshifted_frame_stays_at_origin(self):
        frame = PointerFrame.from_eigenvalues(GaussianPointer(), 1.7, np.zeros(3))
        coeff = np.diag([0.2, 0.5, 0.3]).astype(complex)
        assert frame_position_mean(FrameOperator(frame, coeff)) == 0.0

    @pytest.mark.parametrize("alpha", [0.0, 0.3 * math.pi, 1.1 * math.pi])
    def test_unselected_mean_is_initial_expectation(self, alpha):
        # <q> = g <A>_i = g sin(alpha)
        op = weak_pointer_operator(alpha, g=1.4)
        assert frame_position_mean(op) == pytest.approx(1.4 * math.sin(alpha), abs=1e-14)

    def test_matches_grid_quadrature(self, rng):
        for _ in range(10):
            delta = rng.uniform(0.5, 1.5)
            shifts = rng.uniform(-2.0, 2.0, size=3)
            raw = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            coeff = raw @ raw.conj().T
            frame = PointerFrame.from_eigenvalues(GaussianPointer(delta=delta), 1.0, shifts)
            coeff /= (coeff * frame.gram).sum().real
            expected = quad_position_mean(coeff, shifts, delta)
            got = frame_position_mean(FrameOperator(frame, coeff))
            assert got == pytest.approx(expected, abs=1e-8)

    def test_rejects_unnormalized_operator(self):
        op = FrameOperator(spin_frame(1.0), np.diag([1.0, 1.0]).astype(complex))
        with pytest.raises(ValueError, match="trace"):
            frame_position_mean(op)


class TestFidelityWithInitial:
    def test_no_interaction_gives_unit_fidelity(self, rng):
        p = rng.dirichlet(np.ones(2))
        op = FrameOperator(spin_frame(0.0), np.diag(p).astype(complex))
        assert fidelity_with_initial(op) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("alpha", [0.0, 0.25 * math.pi, 0.9 * math.pi, 1.3 * math.pi])
    def test_unselected_fidelity_is_preparation_independent(self, alpha):
        # F(sigma_i, sigma_w) = exp(-g^2/(4 Delta^2)) for any preparation
        op = weak_pointer_operator(alpha, g=1.0)
        assert fidelity_with_initial(op) == pytest.approx(math.exp(-0.25), abs=1e-14)

    def test_postselected_fidelity_value(self):
        # alpha = 0, beta = 0, g/Delta = 1: coefficients t_nu B t_mu / P with
        # B uniform and t = (1, 1)/sqrt(2); frozen from independent arithmetic
        # (1 + cos a) e^(-1/4) / (1 + cos a e^(-1/2)) and the grid oracle.
        p_f = 0.5 * (1.0 + math.exp(-0.5))
        coeff = np.full((2, 2), 0.25) / p_f
        op = FrameOperator(spin_frame(1.0), coeff.astype(complex))
        assert fidelity_with_initial(op) == pytest.approx(0.9695436291402146, abs=1e-12)
        assert quad_initial_overlap(coeff, [1.0, -1.0], 1.0) == pytest.approx(
            0.9695436291402146, abs=1e-8
        )

    def test_rejects_non_hermitian(self):
        coeff = np.array([[0.8, 0.4], [0.0, 0.2]], dtype=complex)
        coeff = coeff / (coeff * spin_frame(1.0).gram).sum()
        with pytest.raises(ValueError, match="Hermitian"):
            fidelity_with_initial(FrameOperator(spin_frame(1.0), coeff))

    def test_rejects_negative_operator(self):
        # trace-one Hermitian but indefinite coefficient matrix
        coeff = np.diag([2.0, -1.0]).astype(complex)
        with pytest.raises(ValueError, match="negative eigenvalue"):
            fidelity_with_initial(FrameOperator(spin_frame(1.0), coeff))


class TestFrameToGrid:
    def test_pure_initial_gaussian(self):
        frame = PointerFrame.from_eigenvalues(GaussianPointer(), 0.0, np.zeros(1))
        op = FrameOperator(frame, np.eye(1, dtype=complex))
        dense = frame_to_grid(op, Grid(-9.0, 9.0, 1024))
        assert np.trace(dense).real == pytest.approx(1.0, abs=1e-8)
        top = np.linalg.eigvalsh(dense).max()
        assert top == pytest.approx(1.0, abs=1e-8)

    def test_trace_preserved_for_random_operator(self, rng):
        raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        coeff = raw @ raw.conj().T
        frame = spin_frame(1.3)
        coeff /= (coeff * frame.gram).sum().real
        op = FrameOperator(frame, coeff)
        dense = frame_to_grid(op, Grid(-12.0, 12.0, 1024))
        assert np.trace(dense) == pytest.approx(op.trace, abs=1e-8)

    def test_pure_shifted_distance_matches_overlap_formula(self):
        # trace distance between pure Gaussians is sqrt(1 - overlap^2)
        g = 1.2
        frame = spin_frame(g)
        grid = Grid(-12.0, 12.0, 1024)
        shifted = frame_to_grid(
            FrameOperator(frame, np.diag([1.0, 0.0]).astype(complex)), grid
        )
        initial = frame_to_grid(
            FrameOperator(
                PointerFrame.from_eigenvalues(GaussianPointer(), 0.0, np.zeros(1)),
                np.eye(1, dtype=complex),
            ),
            grid,
        )
        diff = shifted - initial
        grid_distance = 0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum()
        overlap = math.exp(-(g**2) / 8.0)
        assert grid_distance == pytest.approx(math.sqrt(1 - overlap**2), abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.2, 2.4])
    def test_weak_state_distance_matches_frame_exact_value(self, alpha):
        g = 1.0
        op = weak_pointer_operator(alpha, g)
        grid = Grid(-12.0, 12.0, 1024)
        dense_w = frame_to_grid(op, grid)
        dense_i = frame_to_grid(
            FrameOperator(
                PointerFrame.from_eigenvalues(GaussianPointer(), 0.0, np.zeros(1)),
                np.eye(1, dtype=complex),
            ),
            grid,
        )
        diff = dense_w - dense_i
        grid_distance = 0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum()
        exact = frame_exact_trace_distance(
            op.coeff, op.frame.shifts, np.eye(1, dtype=complex), [0.0], 1.0
        )
        assert grid_distance == pytest.approx(exact, abs=1e-6)

    def test_narrow_grid_rejected(self):
        op = weak_pointer_operator(0.3, g=2.0)
        with pytest.raises(ValueError, match="too narrow"):
            frame_to_grid(op, Grid(-4.0, 4.0, 512))


@pytest.mark.parametrize("z", [0.1, 1.0, 3.0, 10.0])
def test_analytic_moments_agree_with_quadrature(z):
    alpha = 0.4
    op = weak_pointer_operator(alpha, g=z)
    expected_mean = quad_position_mean(np.asarray(op.coeff), op.frame.shifts, 1.0)
    assert frame_position_mean(op) == pytest.approx(expected_mean, abs=1e-6)
    expected_fid = quad_initial_overlap(np.asarray(op.coeff), op.frame.shifts, 1.0)
    assert fidelity_with_initial(op) == pytest.approx(expected_fid, abs=1e-6)
