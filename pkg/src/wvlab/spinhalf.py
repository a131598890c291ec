"""Closed-form results for the spin-1/2 Stern-Gerlach sequence.

Preparation is spin-up along the direction at angle ``alpha`` to the x-axis
in the x-z plane, post-selection is spin-up along angle ``beta``, and the
measured observable is sigma_z.  All density matrices are written in the
sigma_z basis and all couplings enter through the order parameter
z = g/Delta.  These formulas are the analytic twin against which the
generic engine is tested, including the full sensitivity/disturbance
trade-off ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from wvlab.engine import MeasurementSetup
from wvlab.pointer import GaussianPointer
from wvlab.qcore import DensityMatrix, Observable, PureState

_SQRT_HALF = math.sqrt(0.5)


def spin_z() -> Observable:
    """sigma_z with eigenvalues (+1, -1) in its own basis."""
    return Observable(np.array([1.0, -1.0]), np.eye(2, dtype=complex))


def up_state(angle: float) -> PureState:
    """Spin-up along the direction at ``angle`` to the x-axis, sigma_z basis."""
    c = math.cos(0.5 * angle)
    s = math.sin(0.5 * angle)
    return PureState(np.array([(c + s) * _SQRT_HALF, (c - s) * _SQRT_HALF], dtype=complex))


def down_state(angle: float) -> PureState:
    """Spin-down along ``angle``; orthogonal complement of :func:`up_state`."""
    return up_state(angle + math.pi)


@dataclass(frozen=True)
class Scenario:
    """Preparation angle, post-selection angle and coupling over spread."""

    alpha: float
    beta: float = 0.0
    g_over_delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "g_over_delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.g_over_delta < 0.0:
            raise ValueError(f"g_over_delta must be non-negative, got {self.g_over_delta}")


def setup_for(scenario: Scenario, delta: float = 1.0) -> MeasurementSetup:
    """Engine setup realizing the scenario with an explicit pointer spread."""
    return MeasurementSetup(
        rho_i=up_state(scenario.alpha).density(),
        observable=spin_z(),
        g=scenario.g_over_delta * delta,
        pointer=GaussianPointer(delta=delta),
    )


def _decoherence(z: float) -> float:
    return math.exp(-0.5 * z * z)


def exact_conditional(s: Scenario) -> float:
    """Exact conditional expectation of sigma_z on the selected ensemble:
    (sin a + sin b) / (1 + sin a sin b + exp(-z^2/2) cos a cos b)."""
    denominator = (
        1.0
        + math.sin(s.alpha) * math.sin(s.beta)
        + _decoherence(s.g_over_delta) * math.cos(s.alpha) * math.cos(s.beta)
    )
    if abs(denominator) <= 1e-300:
        raise ZeroDivisionError("preparation and post-selection are effectively orthogonal")
    return (math.sin(s.alpha) + math.sin(s.beta)) / denominator


def abl_conditional(alpha: float, beta: float) -> float:
    """Projective-measurement limit (sin a + sin b)/(1 + sin a sin b)."""
    denominator = 1.0 + math.sin(alpha) * math.sin(beta)
    if abs(denominator) <= 1e-300:
        raise ZeroDivisionError("preparation and post-selection are effectively orthogonal")
    return (math.sin(alpha) + math.sin(beta)) / denominator


def weak_value_conditional(alpha: float, beta: float) -> float:
    """Weak-coupling limit sin((a+b)/2) / cos((a-b)/2); tan(a/2) at beta = 0."""
    denominator = math.cos(0.5 * (alpha - beta))
    if abs(denominator) <= 1e-300:
        raise ZeroDivisionError("weak value diverges: states are orthogonal")
    return math.sin(0.5 * (alpha + beta)) / denominator


class StateFamily(NamedTuple):
    rho_i: DensityMatrix
    rho_s: DensityMatrix
    rho_w: DensityMatrix
    rho_f: DensityMatrix


def state_family(s: Scenario) -> StateFamily:
    """Initial, projectively measured, weakly measured and post-selected states."""
    sin_a, cos_a = math.sin(s.alpha), math.cos(s.alpha)
    sin_b, cos_b = math.sin(s.beta), math.cos(s.beta)
    eps = _decoherence(s.g_over_delta)

    def two_level(population: float, coherence: float) -> DensityMatrix:
        return DensityMatrix(
            np.array(
                [[0.5 * (1.0 + population), 0.5 * coherence], [0.5 * coherence, 0.5 * (1.0 - population)]],
                dtype=complex,
            )
        )

    return StateFamily(
        rho_i=two_level(sin_a, cos_a),
        rho_s=two_level(sin_a, 0.0),
        rho_w=two_level(sin_a, cos_a * eps),
        rho_f=two_level(sin_b, cos_b),
    )


def disturbance_weak(s: Scenario) -> float:
    """D(rho_i, rho_w) = |cos a| (1 - exp(-z^2/2)) / 2."""
    return 0.5 * abs(math.cos(s.alpha)) * (1.0 - _decoherence(s.g_over_delta))


def disturbance_strong(alpha: float) -> float:
    """D(rho_i, rho_s) = |cos a| / 2."""
    return 0.5 * abs(math.cos(alpha))


def preserved_coherence(s: Scenario) -> float:
    """D(rho_i, rho_s) - D(rho_i, rho_w) = |cos a| exp(-z^2/2) / 2."""
    return 0.5 * abs(math.cos(s.alpha)) * _decoherence(s.g_over_delta)


class EnsembleDistances(NamedTuple):
    initial: float
    weak: float
    strong: float


def two_ensemble_distances(alpha: float, alpha_prime: float, g_over_delta: float) -> EnsembleDistances:
    """Distinguishability of two preparations before and after measurement.

    The weak-measurement coherences each carry exp(-z^2/2), so their squared
    difference carries exp(-z^2).
    """
    # half-angle form of sqrt([1 - cos(a - a')]/2); exact for tiny separations
    initial = abs(math.sin(0.5 * (alpha - alpha_prime)))
    ds = math.sin(alpha) - math.sin(alpha_prime)
    dc = math.cos(alpha) - math.cos(alpha_prime)
    weak = 0.5 * math.sqrt(ds * ds + dc * dc * math.exp(-g_over_delta * g_over_delta))
    strong = 0.5 * abs(ds)
    return EnsembleDistances(initial=initial, weak=weak, strong=strong)


def infer_coupling(p_w: float) -> float:
    """Coupling (in units of Delta) from the state-identification success rate
    for initially orthogonal preparations: g = sqrt(2 |ln(2 P_w - 1)|)."""
    if not 0.5 < p_w <= 1.0:
        raise ValueError(f"no information about the coupling for P_w = {p_w}; need 0.5 < P_w <= 1")
    return math.sqrt(2.0 * abs(math.log(2.0 * p_w - 1.0)))


def post_selection_probability(s: Scenario) -> float:
    """P(f) = [1 + sin a sin b + exp(-z^2/2) cos a cos b] / 2."""
    return 0.5 * (
        1.0
        + math.sin(s.alpha) * math.sin(s.beta)
        + _decoherence(s.g_over_delta) * math.cos(s.alpha) * math.cos(s.beta)
    )


def _population_term(alpha: float, beta: float) -> float:
    return math.sin(alpha) * math.cos(beta) ** 2


def _coherence_term(alpha: float, beta: float) -> float:
    return math.cos(alpha) * math.sin(beta) * math.cos(beta)


def nonselective_distance(s: Scenario) -> float:
    """D(rho_i, rho_bar) for a non-selective final measurement along beta."""
    eps = _decoherence(s.g_over_delta)
    half_pi = 0.5 * math.pi
    population = _population_term(s.alpha, s.beta) - _coherence_term(s.alpha, s.beta) * eps
    coherence = (
        math.cos(s.alpha)
        + _coherence_term(s.alpha + half_pi, s.beta)
        - _population_term(s.alpha + half_pi, s.beta) * eps
    )
    return 0.5 * math.hypot(population, coherence)


def nonselective_distance_weak(alpha: float, beta: float) -> float:
    """g -> 0 limit, |sin(a - b)| / 2."""
    return 0.5 * abs(math.sin(alpha - beta))


def nonselective_distance_strong(alpha: float, beta: float) -> float:
    """g -> infinity limit of :func:`nonselective_distance`."""
    half_pi = 0.5 * math.pi
    population = _population_term(alpha, beta)
    coherence = math.cos(alpha) + _coherence_term(alpha + half_pi, beta)
    return 0.5 * math.hypot(population, coherence)


def postselected_state_distances(alpha: float, beta: float) -> tuple[float, float]:
    """D(rho_i, rho_up) and D(rho_i, rho_down) for the two final outcomes.

    Half-angle forms of sqrt([1 -+ cos(a - b)]/2)."""
    up = abs(math.sin(0.5 * (alpha - beta)))
    down = abs(math.cos(0.5 * (alpha - beta)))
    return up, down


def postselection_distance_bound(i: PureState, f: PureState, p_f: float) -> float:
    """Lower bound (1 - p_f) (|<f_perp|i>| - |<f|i>|) on
    D(rho_i, rho_f) - D(rho_i, rho_bar); non-negative exactly when the
    initial state leans toward the orthogonal outcome."""
    if i.dim != 2 or f.dim != 2:
        raise ValueError("the bound is stated for two-level systems")
    if not 0.0 <= p_f <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p_f}")
    f_perp = PureState(np.array([-np.conj(f.amplitudes[1]), np.conj(f.amplitudes[0])]))
    return (1.0 - p_f) * (abs(f_perp.overlap(i)) - abs(f.overlap(i)))


def pointer_fidelity_weak(g_over_delta: float) -> float:
    """Pointer fidelity without post-selection, exp(-z^2/4); independent of
    the preparation for spin-1/2."""
    return math.exp(-0.25 * g_over_delta * g_over_delta)


def _require_final_along_x(s: Scenario):
    if s.beta != 0.0:
        raise ValueError(
            "closed-form pointer fidelity is available for beta = 0 only; "
            "use the engine's generic reduced pointer for other post-selections"
        )


def pointer_fidelity_final(s: Scenario) -> float:
    """Pointer fidelity with post-selection on spin-up along x (beta = 0):
    (1 + cos a) exp(-z^2/4) / (1 + cos a exp(-z^2/2))."""
    _require_final_along_x(s)
    eps = _decoherence(s.g_over_delta)
    denominator = 1.0 + math.cos(s.alpha) * eps
    if denominator <= 1e-300:
        raise ZeroDivisionError("post-selection impossible: orthogonal states at zero coupling")
    return (1.0 + math.cos(s.alpha)) * math.exp(-0.25 * s.g_over_delta**2) / denominator


def pointer_fidelity_wv(s: Scenario) -> float:
    """Weak-value approximation exp(-z^2 tan^2(a/2) / 4) of the post-selected
    pointer fidelity (beta = 0)."""
    _require_final_along_x(s)
    wv = weak_value_conditional(s.alpha, 0.0)
    return math.exp(-0.25 * s.g_over_delta**2 * wv * wv)


def kappa(alpha: float, f_bound: float) -> float:
    """C(a) + sqrt(C(a)^2 - 4 F_b^2 cos a) with C(a) = 1 + cos a."""
    c = 1.0 + math.cos(alpha)
    discriminant = c * c - 4.0 * f_bound * f_bound * math.cos(alpha)
    return c + math.sqrt(max(0.0, discriminant))


def gamma(alpha: float, f_bound: float) -> float:
    """4 / kappa^2; at least 1 exactly when cos a <= 0."""
    return 4.0 / kappa(alpha, f_bound) ** 2


def g_min(f_bound: float, alpha: float, with_postselection: bool) -> float:
    """Smallest coupling (units of Delta) reaching pointer fidelity ``f_bound``.

    Without post-selection 2 sqrt|ln F_b|; with post-selection on spin-up
    along x, 2 sqrt(ln(kappa / (2 F_b))).
    """
    if f_bound >= 1.0:
        raise ValueError("fidelity bound of 1 or more needs no interaction")
    if f_bound <= 0.0:
        raise ValueError(f"fidelity bound must be positive, got {f_bound}")
    if not with_postselection:
        return 2.0 * math.sqrt(abs(math.log(f_bound)))
    if 1.0 + math.cos(alpha) <= 0.0:
        # orthogonal pre/post-selection: the post-selected fidelity is
        # identically zero, no coupling can reach a positive bound
        raise ValueError("no coupling reaches a positive fidelity bound at alpha = pi")
    return 2.0 * math.sqrt(max(0.0, math.log(kappa(alpha, f_bound) / (2.0 * f_bound))))


@dataclass(frozen=True)
class TradeoffReport:
    """Minimal couplings, state disturbances and success probabilities for a
    target pointer fidelity, with and without post-selection (beta = 0)."""

    alpha: float
    beta: float
    f_bound: float
    g_min_i: float
    g_min_ii: float
    d_min_i: float
    d_min_ii: float
    p_ap: float
    p_f: float
    kappa: float
    gamma: float


def tradeoff_report(alpha: float, f_bound: float) -> TradeoffReport:
    """Full sensitivity/disturbance ledger at preparation ``alpha``.

    ``p_ap`` is the overlap approximation cos^2(a/2) of the post-selection
    probability; ``p_f`` is the exact probability at the reduced coupling
    g_min_II, which can exceed it by an order of magnitude.
    """
    k = kappa(alpha, f_bound)
    gam = 4.0 / (k * k)
    cos_a = math.cos(alpha)
    return TradeoffReport(
        alpha=alpha,
        beta=0.0,
        f_bound=f_bound,
        g_min_i=g_min(f_bound, alpha, with_postselection=False),
        g_min_ii=g_min(f_bound, alpha, with_postselection=True),
        d_min_i=0.5 * abs(cos_a) * (1.0 - f_bound * f_bound),
        d_min_ii=0.5 * abs(cos_a) * (1.0 - gam * f_bound * f_bound),
        p_ap=math.cos(0.5 * alpha) ** 2,
        p_f=0.5 * (1.0 + cos_a * gam * f_bound * f_bound),
        kappa=k,
        gamma=gam,
    )


def tradeoff_lower_bound(alpha: float, d_pointer: float) -> float:
    """Lower bound |cos a| D_p^2 / 2 on the weak-measurement disturbance in
    terms of the pointer trace distance."""
    if not 0.0 <= d_pointer <= 1.0:
        raise ValueError(f"pointer trace distance must lie in [0, 1], got {d_pointer}")
    return 0.5 * abs(math.cos(alpha)) * d_pointer * d_pointer
