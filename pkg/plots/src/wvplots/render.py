"""Render wvlab CSV datasets into publication-style figures.

Rendering is strictly read-only over the CSVs: no physics is recomputed
here.  Each figure id carries a column schema; files that do not match it
are rejected with a listing of expected versus found columns rather than
plotted by guesswork.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """CSV columns do not match the figure schema."""


class DataError(ValueError):
    """CSV is structurally valid but has no usable rows."""


@dataclass(frozen=True)
class ColumnFamily:
    """A required column: either an exact name or a non-empty prefix group."""

    name: str
    is_prefix: bool = False
    color: str = "black"
    linestyle: str = "solid"
    linewidth: float = 1.5


@dataclass(frozen=True)
class FigureSchema:
    x_column: str
    x_label: str
    y_label: str
    title: str
    families: tuple[ColumnFamily, ...]
    guides: tuple[float, ...] = ()
    y_limits: tuple[float, float] | None = None


SCHEMAS: dict[str, FigureSchema] = {
    "fig1": FigureSchema(
        x_column="alpha",
        x_label="preparation angle alpha (rad)",
        y_label="pointer reading <q>/g",
        title="Conditional pointer readings",
        families=(
            ColumnFamily("initial_expectation", color="black", linestyle="dashed"),
            ColumnFamily("abl", color="black", linestyle="dashdot"),
            ColumnFamily("weak_value", color="tab:blue", linestyle="solid", linewidth=2.0),
            ColumnFamily("exact_g_", is_prefix=True, color="gray"),
        ),
        guides=(-1.0, 1.0),
        y_limits=(-4.0, 4.0),
    ),
    "fig2a": FigureSchema(
        x_column="alpha",
        x_label="preparation angle alpha (rad)",
        y_label="preserved coherence",
        title="Coherence preserved by a weak measurement",
        families=(ColumnFamily("coherence_g_", is_prefix=True, color="gray"),),
    ),
    "fig2b": FigureSchema(
        x_column="alpha",
        x_label="preparation angle alpha (rad)",
        y_label="trace distance",
        title="Distinguishability of two preparations",
        families=(
            ColumnFamily("initial", color="tab:blue", linestyle="solid", linewidth=2.0),
            ColumnFamily("strong", color="black", linestyle="dashdot"),
            ColumnFamily("weak_g_", is_prefix=True, color="gray"),
        ),
    ),
    "fig3": FigureSchema(
        x_column="alpha",
        x_label="preparation angle alpha (rad)",
        y_label="trace distance to the initial state",
        title="Post-selected versus non-selective final states",
        families=(
            ColumnFamily("postselected_up", color="tab:blue", linestyle="solid", linewidth=2.0),
            ColumnFamily("postselected_down", color="tab:blue", linestyle="dashed"),
            ColumnFamily("nonselective_weak", color="black", linestyle="dashdot"),
            ColumnFamily("nonselective_strong", color="gray", linestyle="solid"),
        ),
    ),
    "fig4": FigureSchema(
        x_column="g_over_delta",
        x_label="coupling strength g/Delta",
        y_label="pointer fidelity",
        title="Pointer-state fidelity with the initial Gaussian",
        families=(
            ColumnFamily("fidelity_weak", color="black", linestyle="dotted", linewidth=2.0),
            ColumnFamily("fidelity_final_", is_prefix=True, color="tab:blue"),
            ColumnFamily("fidelity_wv_", is_prefix=True, color="gray"),
        ),
    ),
    "fig5": FigureSchema(
        x_column="f_bound",
        x_label="pointer fidelity bound F_b",
        y_label="minimal state disturbance",
        title="State disturbance at the minimal coupling",
        families=(
            ColumnFamily("d_min_i_", is_prefix=True, color="gray"),
            ColumnFamily("d_min_ii_", is_prefix=True, color="tab:blue"),
        ),
    ),
}

LINESTYLE_CYCLE = ("solid", "dashed", "dashdot", "dotted")


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    csv_path: Path
    out_path: Path
    dpi: int = 150
    style_overrides: dict = field(default_factory=dict)


def read_dataset(path: Path) -> tuple[list[str], np.ndarray]:
    """Columns and data rows of a wvlab CSV; '#' lines are metadata."""
    columns: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as stream:
        for record in csv.reader(stream):
            if not record or record[0].startswith("#"):
                continue
            if columns is None:
                columns = [name.strip() for name in record]
            else:
                rows.append([float(cell) for cell in record])
    if columns is None:
        raise DataError(f"{path}: no header row found")
    if not rows:
        raise DataError(f"{path}: no data rows")
    return columns, np.asarray(rows)


def _match_columns(schema: FigureSchema, columns: list[str]) -> dict[str, ColumnFamily]:
    expected = [schema.x_column] + [
        f"{family.name}*" if family.is_prefix else family.name for family in schema.families
    ]
    if schema.x_column not in columns:
        raise SchemaError(f"expected columns {expected}, found {columns}")
    matched: dict[str, ColumnFamily] = {}
    for family in schema.families:
        if family.is_prefix:
            members = [name for name in columns if name.startswith(family.name)]
            if not members:
                raise SchemaError(f"expected columns {expected}, found {columns}")
            for name in members:
                matched[name] = family
        else:
            if family.name not in columns:
                raise SchemaError(f"expected columns {expected}, found {columns}")
            matched[family.name] = family
    unexpected = set(columns) - set(matched) - {schema.x_column}
    if unexpected:
        raise SchemaError(
            f"unexpected columns {sorted(unexpected)} for {expected}; found {columns}"
        )
    return matched


def render_figure(spec: FigureSpec):
    """Render one dataset; returns the matplotlib figure after saving it."""
    if spec.figure_id not in SCHEMAS:
        raise SchemaError(f"unknown figure id {spec.figure_id!r}; known: {sorted(SCHEMAS)}")
    schema = SCHEMAS[spec.figure_id]
    columns, data = read_dataset(Path(spec.csv_path))
    matched = _match_columns(schema, columns)

    x = data[:, columns.index(schema.x_column)]
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    family_counters: dict[str, int] = {}
    for name in columns:
        if name == schema.x_column:
            continue
        family = matched[name]
        index = family_counters.get(family.name, 0)
        family_counters[family.name] = index + 1
        linestyle = family.linestyle
        if family.is_prefix:
            linestyle = LINESTYLE_CYCLE[index % len(LINESTYLE_CYCLE)]
        ax.plot(
            x,
            data[:, columns.index(name)],
            label=name,
            color=spec.style_overrides.get(name, family.color),
            linestyle=linestyle,
            linewidth=family.linewidth,
            gid="curve",
        )
    for guide in schema.guides:
        ax.axhline(guide, color="black", linestyle="dotted", linewidth=0.8)
    if schema.y_limits is not None:
        ax.set_ylim(*schema.y_limits)
    ax.set_xlabel(schema.x_label)
    ax.set_ylabel(schema.y_label)
    ax.set_title(schema.title)
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=spec.dpi)
    return fig
