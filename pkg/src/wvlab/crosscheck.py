"""Triple agreement between the exact engine, the closed forms and the oracle.

For every point of an (alpha, g/Delta, beta) lattice the same observables
are computed three ways: by the generic engine, by the spin-1/2 closed
forms, and by brute-force quadrature on a dense grid.  Engine and closed
forms must agree to near machine precision; the oracle to quadrature
accuracy.  The joint state depends only on (alpha, g/Delta), so the lattice
is evaluated cell by cell with the post-selection angles sharing one dense
build.  Cells are independent and the reported numbers do not depend on
evaluation order or worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from wvlab import engine, oracle, pointer, qcore, spinhalf

ENGINE_TOL = 1e-12
ORACLE_TOL = 1e-6

DEFAULT_ALPHAS = tuple(f * math.pi for f in (0.15, 0.3, 0.55, 0.8, 1.2))
DEFAULT_G_OVER_DELTAS = (0.1, 0.5, 1.0, 2.0, 5.0)
DEFAULT_BETAS = tuple(f * math.pi for f in (0.0, 0.3, 0.7))


@dataclass(frozen=True)
class CheckRow:
    alpha: float
    beta: float
    g_over_delta: float
    quantity: str
    route: str
    difference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance


def default_workers() -> int:
    env = os.environ.get("WVLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(2, os.cpu_count() or 1))


def _check_cell(
    alpha: float,
    g_over_delta: float,
    betas: Sequence[float],
    n_points: int,
    engine_tol: float,
    oracle_tol: float,
    include_oracle: bool,
) -> list[CheckRow]:
    """All checks sharing one preparation and coupling.

    Quantities that do not involve the post-selection angle are emitted
    once per cell (their beta field is NaN); the rest once per beta.
    """
    z = g_over_delta
    scenario = spinhalf.Scenario(alpha=alpha, g_over_delta=z)
    setup = spinhalf.setup_for(scenario)

    evolved = engine.evolve(setup)
    rho_w_engine = engine.reduced_system(evolved)
    fid_w_engine = pointer.fidelity_with_initial(engine.reduced_pointer(evolved))
    d_weak_engine = qcore.trace_distance(setup.rho_i, rho_w_engine)
    rho_w_exact = spinhalf.state_family(scenario).rho_w

    def row(quantity, route, difference, tolerance, beta=math.nan):
        return CheckRow(alpha, beta, z, quantity, route, float(difference), tolerance)

    rows = [
        row("rho_w", "engine-analytic", np.abs(rho_w_engine.matrix - rho_w_exact.matrix).max(), engine_tol),
        row("fidelity_weak", "engine-analytic", abs(fid_w_engine - spinhalf.pointer_fidelity_weak(z)), engine_tol),
        row("d_initial_weak", "engine-analytic", abs(d_weak_engine - spinhalf.disturbance_weak(scenario)), engine_tol),
    ]

    grid = dense = unselected = None
    if include_oracle:
        grid = oracle.Grid.for_setup(setup, n_points=n_points)
        dense = oracle.build_joint(setup, grid)
        unselected = oracle.oracle_observables(dense)
        delta = setup.pointer.delta
        fid_w_oracle = oracle.initial_pointer_fidelity(unselected.sigma_reduced, grid, delta)
        rows += [
            row(
                "rho_w",
                "engine-oracle",
                np.abs(rho_w_engine.matrix - unselected.rho_reduced.matrix).max(),
                oracle_tol,
            ),
            row("fidelity_weak", "engine-oracle", abs(fid_w_engine - fid_w_oracle), oracle_tol),
            row(
                "d_initial_weak",
                "engine-oracle",
                abs(d_weak_engine - qcore.trace_distance(setup.rho_i, unselected.rho_reduced)),
                oracle_tol,
            ),
        ]

    for beta in betas:
        beta_scenario = spinhalf.Scenario(alpha=alpha, beta=beta, g_over_delta=z)
        final_up = spinhalf.up_state(beta)
        final_down = spinhalf.down_state(beta)
        selected, p_engine = engine.post_select(evolved, final_up)
        shift_engine = engine.conditional_pointer_shift(selected)
        fid_f_engine = pointer.fidelity_with_initial(engine.reduced_pointer(selected))
        rho_bar_engine = engine.nonselective_final(evolved, [final_up, final_down])
        d_bar_engine = qcore.trace_distance(setup.rho_i, rho_bar_engine)

        rows += [
            row(
                "q_shift",
                "engine-analytic",
                abs(shift_engine - z * spinhalf.exact_conditional(beta_scenario)),
                engine_tol,
                beta,
            ),
            row(
                "p_f",
                "engine-analytic",
                abs(p_engine - spinhalf.post_selection_probability(beta_scenario)),
                engine_tol,
                beta,
            ),
            row(
                "d_nonselective",
                "engine-analytic",
                abs(d_bar_engine - spinhalf.nonselective_distance(beta_scenario)),
                engine_tol,
                beta,
            ),
        ]
        if beta == 0.0:
            rows.append(
                row(
                    "fidelity_final",
                    "engine-analytic",
                    abs(fid_f_engine - spinhalf.pointer_fidelity_final(beta_scenario)),
                    engine_tol,
                    beta,
                )
            )

        if include_oracle:
            selected_oracle = oracle.oracle_observables(dense, final_up)
            fid_f_oracle = oracle.initial_pointer_fidelity(
                selected_oracle.sigma_reduced, grid, setup.pointer.delta
            )
            # Probability of the complementary outcome from the oracle's own
            # reduced system state; avoids a second full projection pass.
            amp_down = final_down.amplitudes
            p_down_oracle = float(
                np.real(amp_down.conj() @ unselected.rho_reduced.matrix @ amp_down)
            )
            rho_bar_matrix = (
                selected_oracle.p_f * final_up.density().matrix
                + p_down_oracle * final_down.density().matrix
            )
            rho_bar_oracle = qcore.DensityMatrix(rho_bar_matrix / np.trace(rho_bar_matrix).real)
            rows += [
                row("q_shift", "engine-oracle", abs(shift_engine - selected_oracle.q_mean), oracle_tol, beta),
                row("p_f", "engine-oracle", abs(p_engine - selected_oracle.p_f), oracle_tol, beta),
                row("fidelity_final", "engine-oracle", abs(fid_f_engine - fid_f_oracle), oracle_tol, beta),
                row(
                    "d_nonselective",
                    "engine-oracle",
                    abs(d_bar_engine - qcore.trace_distance(setup.rho_i, rho_bar_oracle)),
                    oracle_tol,
                    beta,
                ),
            ]
    return rows


def _check_cell_job(args) -> list[CheckRow]:
    return _check_cell(*args)


def run_triple_agreement(
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    g_over_deltas: Sequence[float] = DEFAULT_G_OVER_DELTAS,
    betas: Sequence[float] = DEFAULT_BETAS,
    n_points: int = 2048,
    engine_tol: float = ENGINE_TOL,
    oracle_tol: float = ORACLE_TOL,
    include_oracle: bool = True,
    max_workers: Optional[int] = None,
) -> list[CheckRow]:
    """Evaluate the agreement lattice; returns one row per (point, quantity, route)."""
    jobs = [
        (a, z, tuple(betas), n_points, engine_tol, oracle_tol, include_oracle)
        for a in alphas
        for z in g_over_deltas
    ]
    workers = max_workers if max_workers is not None else default_workers()
    if workers > 1 and len(jobs) > 1:
        # Worker processes, not threads: the dense-oracle arithmetic holds
        # the GIL.  Each cell is computed identically regardless of worker
        # count, so the parallelism cannot change any reported number.
        with ProcessPoolExecutor(max_workers=workers) as pool:
            nested = list(pool.map(_check_cell_job, jobs, chunksize=2))
    else:
        nested = [_check_cell_job(job) for job in jobs]
    return [row for rows in nested for row in rows]


def failures(rows: Sequence[CheckRow]) -> list[CheckRow]:
    return [row for row in rows if not row.passed]


def worst_by_quantity(rows: Sequence[CheckRow]) -> dict[tuple[str, str], CheckRow]:
    worst: dict[tuple[str, str], CheckRow] = {}
    for row in rows:
        key = (row.quantity, row.route)
        if key not in worst or row.difference > worst[key].difference:
            worst[key] = row
    return worst
