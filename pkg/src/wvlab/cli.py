"""Scenario runner and data exporter.

Reproduces the datasets behind the five figures and the trade-off numbers
as deterministic CSV or JSON, and runs the engine/closed-form/oracle
agreement suite (``verify``).  Re-running any command with the same
configuration produces byte-identical data; rows are sorted by parameter
and the metadata block carries the parameters and tool version only.

Angles are accepted as radians (``1.5708``), multiples of pi (``0.3pi``)
or degrees (``170deg``).  Ranges are either comma lists or
``start:stop:count`` linspace specs.  WVLAB_THREADS limits evaluation
parallelism; it never affects output bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from wvlab import __version__, crosscheck, engine, oracle, pointer, qcore, spinhalf

SCHEMA_VERSION = 1

COMMANDS = ("fig1", "fig2a", "fig2b", "fig3", "fig4", "fig5", "tradeoff", "sweep", "verify")


class UsageError(Exception):
    """Invalid ranges or flags; maps to exit code 2."""


def parse_angle(text: str) -> float:
    t = str(text).strip().lower()
    try:
        if t.endswith("deg"):
            return math.radians(float(t[:-3]))
        if t.endswith("pi"):
            head = t[:-2]
            if head in ("", "+", "-"):
                head += "1"
            return float(head) * math.pi
        return float(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse angle {text!r}: use radians, '0.3pi' or '170deg'") from exc


def parse_scalar(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc


def parse_range(text: str, scalar=parse_scalar) -> list[float]:
    """Comma list or start:stop:count linspace spec."""
    t = str(text).strip()
    if ":" in t:
        parts = t.split(":")
        if len(parts) != 3:
            raise UsageError(f"linspace spec must be start:stop:count, got {text!r}")
        start, stop = scalar(parts[0]), scalar(parts[1])
        try:
            count = int(parts[2])
        except ValueError as exc:
            raise UsageError(f"linspace count must be an integer, got {parts[2]!r}") from exc
        if count < 2:
            raise UsageError(f"linspace count must be at least 2, got {count}")
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    values = [scalar(part) for part in t.split(",") if part.strip() != ""]
    if not values:
        raise UsageError(f"empty range {text!r}")
    return values


def parse_angle_range(text: str) -> list[float]:
    return parse_range(text, scalar=parse_angle)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "csv"
    oracle: bool = False
    n_points: int = 2048
    engine_tol: float = crosscheck.ENGINE_TOL
    oracle_tol: float = crosscheck.ORACLE_TOL


@dataclass
class Dataset:
    command: str
    meta: list[tuple[str, str]]
    columns: list[str]
    rows: list[list[float]]


def _fmt(value: float) -> str:
    return repr(float(value))


def _fmt_list(values: Sequence[float]) -> str:
    return "[" + ", ".join(_fmt(v) for v in values) + "]"


def _pi_label(angle: float) -> str:
    return f"{angle / math.pi:g}pi"


def _map_points(fn, items: Sequence) -> list:
    workers = crosscheck.default_workers()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# dataset builders


def _fig1(params) -> Dataset:
    alphas = params["alpha"]
    beta = params["beta"]
    abl_beta = params["abl_beta"]
    gs = params["g_over_delta"]
    columns = ["alpha", "initial_expectation", "abl", "weak_value"]
    columns += [f"exact_g_{g:g}" for g in gs]
    rows = []
    for a in sorted(alphas):
        row = [
            a,
            math.sin(a),
            spinhalf.abl_conditional(a, abl_beta),
            spinhalf.weak_value_conditional(a, beta),
        ]
        row += [spinhalf.exact_conditional(spinhalf.Scenario(a, beta, g)) for g in gs]
        rows.append(row)
    meta = [
        ("beta", _fmt(beta)),
        ("abl_beta", _fmt(abl_beta)),
        ("g_over_delta", _fmt_list(gs)),
        ("note", "pointer readings are reported as <q>/g"),
    ]
    return Dataset("fig1", meta, columns, rows)


def _fig2a(params) -> Dataset:
    alphas = params["alpha"]
    gs = params["g_over_delta"]
    columns = ["alpha"] + [f"coherence_g_{g:g}" for g in gs]
    rows = [
        [a] + [spinhalf.preserved_coherence(spinhalf.Scenario(a, 0.0, g)) for g in gs]
        for a in sorted(alphas)
    ]
    return Dataset("fig2a", [("g_over_delta", _fmt_list(gs))], columns, rows)


def _fig2b(params) -> Dataset:
    alphas = params["alpha"]
    alpha_prime = params["alpha_prime"]
    gs = params["g_over_delta"]
    columns = ["alpha", "initial", "strong"] + [f"weak_g_{g:g}" for g in gs]
    rows = []
    for a in sorted(alphas):
        base = spinhalf.two_ensemble_distances(a, alpha_prime, 0.0)
        row = [a, base.initial, base.strong]
        row += [spinhalf.two_ensemble_distances(a, alpha_prime, g).weak for g in gs]
        rows.append(row)
    meta = [("alpha_prime", _fmt(alpha_prime)), ("g_over_delta", _fmt_list(gs))]
    return Dataset("fig2b", meta, columns, rows)


def _fig3(params) -> Dataset:
    alphas = params["alpha"]
    beta = params["beta"]
    columns = [
        "alpha",
        "postselected_up",
        "postselected_down",
        "nonselective_weak",
        "nonselective_strong",
    ]
    rows = []
    for a in sorted(alphas):
        up, down = spinhalf.postselected_state_distances(a, beta)
        rows.append(
            [
                a,
                up,
                down,
                spinhalf.nonselective_distance_weak(a, beta),
                spinhalf.nonselective_distance_strong(a, beta),
            ]
        )
    return Dataset("fig3", [("beta", _fmt(beta))], columns, rows)


def _fig4(params) -> Dataset:
    gs = params["g_over_delta"]
    alphas = params["alpha"]
    columns = ["g_over_delta", "fidelity_weak"]
    for a in alphas:
        columns.append(f"fidelity_final_a{_pi_label(a)}")
    for a in alphas:
        columns.append(f"fidelity_wv_a{_pi_label(a)}")
    rows = []
    for g in sorted(gs):
        row = [g, spinhalf.pointer_fidelity_weak(g)]
        row += [spinhalf.pointer_fidelity_final(spinhalf.Scenario(a, 0.0, g)) for a in alphas]
        row += [spinhalf.pointer_fidelity_wv(spinhalf.Scenario(a, 0.0, g)) for a in alphas]
        rows.append(row)
    meta = [("alpha", _fmt_list(alphas)), ("beta", _fmt(0.0))]
    return Dataset("fig4", meta, columns, rows)


def _fig5(params) -> Dataset:
    f_bounds = params["fb"]
    alphas = params["alpha"]
    columns = ["f_bound"]
    for a in alphas:
        columns += [f"d_min_i_a{_pi_label(a)}", f"d_min_ii_a{_pi_label(a)}"]
    rows = []
    for fb in sorted(f_bounds):
        row = [fb]
        for a in alphas:
            report = spinhalf.tradeoff_report(a, fb)
            row += [report.d_min_i, report.d_min_ii]
        rows.append(row)
    return Dataset("fig5", [("alpha", _fmt_list(alphas))], columns, rows)


def _tradeoff(params) -> Dataset:
    alphas = params["alpha"]
    f_bounds = params["fb"]
    columns = [
        "alpha",
        "f_bound",
        "g_min_i",
        "g_min_ii",
        "d_min_i",
        "d_min_ii",
        "p_ap",
        "p_f",
        "kappa",
        "gamma",
    ]
    rows = []
    for a in sorted(alphas):
        for fb in sorted(f_bounds):
            r = spinhalf.tradeoff_report(a, fb)
            rows.append(
                [a, fb, r.g_min_i, r.g_min_ii, r.d_min_i, r.d_min_ii, r.p_ap, r.p_f, r.kappa, r.gamma]
            )
    return Dataset("tradeoff", [("beta", _fmt(0.0))], columns, rows)


def _sweep_point(point):
    a, b, z, with_oracle, n_points = point
    scenario = spinhalf.Scenario(a, b, z)
    setup = spinhalf.setup_for(scenario)
    evolved = engine.evolve(setup)
    rho_w = engine.reduced_system(evolved)
    fidelity_weak = pointer.fidelity_with_initial(engine.reduced_pointer(evolved))
    final_up = spinhalf.up_state(b)
    final_down = spinhalf.down_state(b)
    d_weak = qcore.trace_distance(setup.rho_i, rho_w)
    d_bar = qcore.trace_distance(setup.rho_i, engine.nonselective_final(evolved, [final_up, final_down]))
    try:
        selected, p_f = engine.post_select(evolved, final_up)
        q_over_g = engine.conditional_pointer_shift(selected) / setup.g if setup.g > 0 else float("nan")
        fidelity_final = pointer.fidelity_with_initial(engine.reduced_pointer(selected))
    except engine.PostSelectionError:
        p_f, q_over_g, fidelity_final = 0.0, float("nan"), float("nan")
    row = [a, b, z, q_over_g, p_f, d_weak, d_bar, fidelity_weak, fidelity_final]
    if with_oracle:
        grid = oracle.Grid.for_setup(setup, n_points=n_points)
        dense = oracle.build_joint(setup, grid)
        try:
            selected_oracle = oracle.oracle_observables(dense, final_up)
            row += [
                selected_oracle.q_mean / setup.g if setup.g > 0 else float("nan"),
                selected_oracle.p_f,
            ]
        except ValueError:
            row += [float("nan"), 0.0]
    return row


def _sweep(params, with_oracle: bool, n_points: int) -> Dataset:
    points = [
        (a, b, z, with_oracle, n_points)
        for a in sorted(params["alpha"])
        for b in sorted(params["beta"])
        for z in sorted(params["g_over_delta"])
    ]
    columns = [
        "alpha",
        "beta",
        "g_over_delta",
        "exact_conditional",
        "post_probability",
        "disturbance_weak",
        "nonselective_distance",
        "fidelity_weak",
        "fidelity_final",
    ]
    if with_oracle:
        columns += ["oracle_conditional", "oracle_post_probability"]
    rows = _map_points(_sweep_point, points)
    rows.sort(key=lambda row: (row[0], row[1], row[2]))
    meta = [("oracle", "on" if with_oracle else "off")]
    if with_oracle:
        meta.append(("n_points", str(n_points)))
    return Dataset("sweep", meta, columns, rows)


# ---------------------------------------------------------------------------
# output


def _write_csv(stream, dataset: Dataset):
    stream.write(f"# wvlab {dataset.command} v{__version__}\n")
    stream.write(f"# schema = {SCHEMA_VERSION}\n")
    for key, value in dataset.meta:
        stream.write(f"# {key} = {value}\n")
    stream.write(",".join(dataset.columns) + "\n")
    for row in dataset.rows:
        stream.write(",".join(_fmt(value) for value in row) + "\n")


def _write_json(stream, dataset: Dataset):
    payload = {
        "meta": {
            "tool": "wvlab",
            "version": __version__,
            "command": dataset.command,
            "schema": SCHEMA_VERSION,
            **dict(dataset.meta),
        },
        "columns": dataset.columns,
        "rows": [[float(v) for v in row] for row in dataset.rows],
    }
    json.dump(payload, stream, sort_keys=True)
    stream.write("\n")


def _emit(dataset: Dataset, config: RunConfig):
    writer = _write_json if config.fmt == "json" else _write_csv
    if config.out in (None, "-"):
        writer(sys.stdout, dataset)
    else:
        with open(config.out, "w", encoding="utf-8") as stream:
            writer(stream, dataset)


def _verify(config: RunConfig) -> int:
    rows = crosscheck.run_triple_agreement(
        n_points=config.n_points,
        engine_tol=config.engine_tol,
        oracle_tol=config.oracle_tol,
        include_oracle=config.oracle,
    )
    worst = crosscheck.worst_by_quantity(rows)
    for (quantity, route), row in sorted(worst.items()):
        status = "PASS" if row.difference <= row.tolerance else "FAIL"
        print(
            f"{status} {route:16s} {quantity:16s} worst |diff| = {row.difference:.3e} "
            f"(tol {row.tolerance:.0e}) at alpha={row.alpha:.6f} beta={row.beta:.6f} "
            f"g/D={row.g_over_delta:g}"
        )
    failed = crosscheck.failures(rows)
    if failed:
        print(f"{len(failed)} of {len(rows)} checks breached tolerance:")
        for row in failed:
            print(
                f"  {row.route} {row.quantity} diff={row.difference:.6e} tol={row.tolerance:.0e} "
                f"alpha={row.alpha:.6f} beta={row.beta:.6f} g/D={row.g_over_delta:g}"
            )
        return 1
    print(f"all {len(rows)} checks passed")
    if config.out not in (None, "-"):
        dataset = Dataset(
            "verify",
            [("n_points", str(config.n_points))],
            ["alpha", "beta", "g_over_delta", "difference", "tolerance"],
            [[r.alpha, r.beta, r.g_over_delta, r.difference, r.tolerance] for r in rows],
        )
        _emit(dataset, config)
    return 0


def run(config: RunConfig) -> int:
    """Execute a command; returns the process exit code."""
    if config.command == "verify":
        return _verify(config)
    builders = {
        "fig1": lambda: _fig1(config.params),
        "fig2a": lambda: _fig2a(config.params),
        "fig2b": lambda: _fig2b(config.params),
        "fig3": lambda: _fig3(config.params),
        "fig4": lambda: _fig4(config.params),
        "fig5": lambda: _fig5(config.params),
        "tradeoff": lambda: _tradeoff(config.params),
        "sweep": lambda: _sweep(config.params, config.oracle, config.n_points),
    }
    if config.command not in builders:
        raise UsageError(f"unknown command {config.command!r}")
    _emit(builders[config.command](), config)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


DEFAULT_ALPHA_GRID = "0:6.283185307179586:721"
DEFAULT_G_LIST = "0.1,0.5,1,2,5"


def _add_common(sub):
    sub.add_argument("--out", default=None, help="output file (default: stdout)")
    sub.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wvlab",
        description="Exact weak-measurement and post-selection scenario runner.",
    )
    parser.add_argument("--version", action="version", version=f"wvlab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    fig1 = subs.add_parser("fig1", help="pointer readings vs preparation angle")
    fig1.add_argument("--alpha", default=DEFAULT_ALPHA_GRID)
    fig1.add_argument("--beta", default="0")
    fig1.add_argument("--abl-beta", dest="abl_beta", default="0.3pi")
    fig1.add_argument("--g-over-delta", dest="g_over_delta", default=DEFAULT_G_LIST)
    _add_common(fig1)

    fig2a = subs.add_parser("fig2a", help="preserved coherence vs preparation angle")
    fig2a.add_argument("--alpha", default=DEFAULT_ALPHA_GRID)
    fig2a.add_argument("--g-over-delta", dest="g_over_delta", default=DEFAULT_G_LIST)
    _add_common(fig2a)

    fig2b = subs.add_parser("fig2b", help="two-ensemble distinguishability")
    fig2b.add_argument("--alpha", default=DEFAULT_ALPHA_GRID)
    fig2b.add_argument("--alpha-prime", dest="alpha_prime", default="0")
    fig2b.add_argument("--g-over-delta", dest="g_over_delta", default=DEFAULT_G_LIST)
    _add_common(fig2b)

    fig3 = subs.add_parser("fig3", help="distances to post-selected and non-selective states")
    fig3.add_argument("--alpha", default=DEFAULT_ALPHA_GRID)
    fig3.add_argument("--beta", default="0")
    _add_common(fig3)

    fig4 = subs.add_parser("fig4", help="pointer fidelities vs coupling strength")
    fig4.add_argument("--g-over-delta", dest="g_over_delta", default="0:4:401")
    fig4.add_argument("--alpha", default="0.3pi,0.9pi")
    _add_common(fig4)

    fig5 = subs.add_parser("fig5", help="minimal state disturbance vs pointer fidelity bound")
    fig5.add_argument("--fb", default="0.01:0.99:99")
    fig5.add_argument("--alpha", default="0.3pi,0.6pi,0.9pi")
    _add_common(fig5)

    tradeoff = subs.add_parser("tradeoff", help="full trade-off ledger")
    tradeoff.add_argument("--alpha", required=True)
    tradeoff.add_argument("--fb", required=True)
    _add_common(tradeoff)

    sweep = subs.add_parser("sweep", help="generic engine sweep over (alpha, beta, g/Delta)")
    sweep.add_argument("--alpha", default="0:2pi:25")
    sweep.add_argument("--beta", default="0")
    sweep.add_argument("--g-over-delta", dest="g_over_delta", default="0.1,1,5")
    sweep.add_argument("--oracle", action="store_true", help="add oracle cross-check columns")
    sweep.add_argument("--n-points", dest="n_points", type=int, default=1024)
    _add_common(sweep)

    verify = subs.add_parser("verify", help="run the triple-agreement suite")
    verify.add_argument("--n-points", dest="n_points", type=int, default=2048)
    verify.add_argument("--engine-tol", dest="engine_tol", type=float, default=crosscheck.ENGINE_TOL)
    verify.add_argument("--oracle-tol", dest="oracle_tol", type=float, default=crosscheck.ORACLE_TOL)
    verify.add_argument("--no-oracle", dest="no_oracle", action="store_true")
    _add_common(verify)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command
    params: dict = {}
    if command in ("fig1", "fig2a", "fig2b", "fig3"):
        params["alpha"] = parse_angle_range(args.alpha)
    if command == "fig1":
        params["beta"] = parse_angle(args.beta)
        params["abl_beta"] = parse_angle(args.abl_beta)
    if command == "fig2b":
        params["alpha_prime"] = parse_angle(args.alpha_prime)
    if command == "fig3":
        params["beta"] = parse_angle(args.beta)
    if command in ("fig1", "fig2a", "fig2b"):
        params["g_over_delta"] = parse_range(args.g_over_delta)
    if command == "fig4":
        params["g_over_delta"] = parse_range(args.g_over_delta)
        params["alpha"] = parse_angle_range(args.alpha)
    if command in ("fig5", "tradeoff"):
        params["alpha"] = parse_angle_range(args.alpha)
        params["fb"] = parse_range(args.fb)
    if command == "sweep":
        params["alpha"] = parse_angle_range(args.alpha)
        params["beta"] = parse_angle_range(args.beta)
        params["g_over_delta"] = parse_range(args.g_over_delta)
    for key, values in params.items():
        if isinstance(values, list):
            for v in values:
                if not math.isfinite(v):
                    raise UsageError(f"non-finite value in --{key}")
    config = RunConfig(
        command=command,
        params=params,
        out=getattr(args, "out", None),
        fmt=getattr(args, "fmt", "csv"),
    )
    if command == "sweep":
        config.oracle = bool(args.oracle)
        config.n_points = int(args.n_points)
    if command == "verify":
        config.oracle = not args.no_oracle
        config.n_points = int(args.n_points)
        config.engine_tol = float(args.engine_tol)
        config.oracle_tol = float(args.oracle_tol)
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return run(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
