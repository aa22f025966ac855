"""Figure rendering for the engine's delimited outputs.

Input contract (CSV with a header row):

  * sweep tables:      delta_mhz, gamma_khz, negativity, fidelity_psi,
                       residual, status, wall_ms
  * trajectory tables: t_ms, p_psi, p_phi, p_upsilon, p_ground,
                       fidelity_target, trace

Annotations always restate a source cell exactly as printed at six
significant digits; numeric values are never recomputed or rescaled.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("heatmap", "line", "trajectory")

REQUIRED_COLUMNS = {
    "heatmap": ("delta_mhz", "gamma_khz", "negativity"),
    "line": ("delta_mhz", "fidelity_psi"),
    "trajectory": ("t_ms", "fidelity_target"),
}

TRAJECTORY_SERIES = ("fidelity_target", "p_psi", "p_phi", "p_upsilon",
                     "p_ground")

SERIES_LABELS = {
    "fidelity_target": "target fidelity",
    "p_psi": "P(psi)",
    "p_phi": "P(phi)",
    "p_upsilon": "P(upsilon)",
    "p_ground": "ground manifold",
}

_STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


class SchemaError(ValueError):
    """Input CSV does not match the documented schema for its kind."""


@dataclass
class PlotJob:
    input_csv: str
    kind: str
    output: str
    title: str | None = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"expected one of {KINDS}")


def sig6(cell: str) -> str:
    """A source cell as printed at six significant digits."""
    return format(float(cell), ".6g")


def load_table(path, required) -> dict:
    """Read a CSV into raw string columns, checking the needed header."""
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file not found: {p}")
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{p}: empty file") from None
        rows = [row for row in reader if row]
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(
            f"{p}: missing required column(s): {', '.join(missing)}"
        )
    if not rows:
        raise SchemaError(f"{p}: no data rows")
    idx = {name: header.index(name) for name in header}
    return {name: [row[idx[name]] for row in rows] for name in header}


def _floats(cells) -> np.ndarray:
    return np.array([float(c) for c in cells])


def _render_heatmap(table, ax):
    deltas = _floats(table["delta_mhz"])
    gammas = _floats(table["gamma_khz"])
    neg = _floats(table["negativity"])
    dvals = np.unique(deltas)
    gvals = np.unique(gammas)
    grid = np.full((gvals.size, dvals.size), np.nan)
    for d, g, n in zip(deltas, gammas, neg):
        grid[np.searchsorted(gvals, g), np.searchsorted(dvals, d)] = n
    mesh = ax.pcolormesh(dvals, gvals, grid, shading="nearest",
                         cmap="viridis")
    ax.figure.colorbar(mesh, ax=ax, label="negativity")
    ax.set_xlabel("detuning / 2pi (MHz)")
    ax.set_ylabel("decay rate (kHz)")
    # annotate the best cell with its exact printed value
    k = int(np.nanargmax(neg))
    text = sig6(table["negativity"][k])
    ax.annotate(text, (deltas[k], gammas[k]), color="white",
                ha="center", va="center", fontsize=9)
    return text


def _render_line(table, ax):
    x = _floats(table["delta_mhz"])
    y = _floats(table["fidelity_psi"])
    order = np.argsort(x)
    ax.plot(x[order], y[order], "o-", color="tab:blue")
    ax.set_xlabel("detuning / 2pi (MHz)")
    ax.set_ylabel("steady-state fidelity")
    k = int(order[-1])
    text = sig6(table["fidelity_psi"][k])
    ax.annotate(text, (x[k], y[k]), textcoords="offset points",
                xytext=(-8, -12), ha="right")
    return text


def _render_trajectory(table, ax):
    t = _floats(table["t_ms"])
    for name in TRAJECTORY_SERIES:
        if name not in table:
            continue
        y = _floats(table[name])
        if np.all(np.isnan(y)):
            continue
        ax.plot(t, y, label=SERIES_LABELS.get(name, name),
                lw=2 if name == "fidelity_target" else 1.2)
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("population / fidelity")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    text = sig6(table["fidelity_target"][-1])
    ax.annotate(text, (t[-1], float(table["fidelity_target"][-1])),
                textcoords="offset points", xytext=(-8, 8), ha="right")
    return text


def render(job: PlotJob):
    """Render one CSV to an image; returns (figure, annotation_text).

    The annotation restates one source cell (the best grid point for
    heatmaps, the last row otherwise) exactly as printed at six
    significant digits.
    """
    table = load_table(job.input_csv, REQUIRED_COLUMNS[job.kind])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if job.kind == "heatmap":
            text = _render_heatmap(table, ax)
        elif job.kind == "line":
            text = _render_line(table, ax)
        else:
            text = _render_trajectory(table, ax)
        if job.title:
            ax.set_title(job.title)
        if "x" in job.labels:
            ax.set_xlabel(job.labels["x"])
        if "y" in job.labels:
            ax.set_ylabel(job.labels["y"])
        out = Path(job.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.tight_layout()
        fig.savefig(out)
    return fig, text
