"""Figure rendering over the sweep CSV schema (version 1).

Heatmaps annotate the exciton-gap resonance with a dashed vertical line
and mark the two reference frequencies (813 off-resonant, 1111
quasi-resonant) at the reference mode-displacement value 0.0578.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMA_VERSION = "1"
RESONANCE_OMEGA = 1058.0
REFERENCE_POINTS = ((813.0, 0.0578), (1111.0, 0.0578))

KINDS = ("heatmap", "lines", "timeseries")

_REQUIRED = {
    "heatmap": ("omega", "huang_rhys", "lambda_e", "lambda_v", "eta", "im_coherence"),
    "lines": ("omega", "huang_rhys", "lambda_e", "lambda_v", "eta"),
    "timeseries": ("t_fs", "pop_A", "rc_population", "im_coherence"),
}


class SchemaError(Exception):
    """Input does not match the documented CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple
    kind: str
    output: str
    title: str = ""
    xlim: tuple | None = None
    ylim: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("no input files given")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))


def _check_sidecar(path: Path) -> None:
    sidecar = path.parent / "metadata.json"
    if not sidecar.exists():
        return
    meta = json.loads(sidecar.read_text())
    version = str(meta.get("schema_version", ""))
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"{path.name}: schema version {version!r} does not match {SCHEMA_VERSION!r}")


def load_table(path, required=()) -> dict:
    """Read one CSV into float arrays; failed rows are dropped."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    _check_sidecar(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path.name}: missing columns {missing}")
        rows = [r for r in reader]
    if "status" in header:
        rows = [r for r in rows if r["status"] == "ok"]
    if not rows:
        raise SchemaError(f"{path.name}: no usable data rows")
    table = {}
    for col in header:
        if col in ("method", "status", "error"):
            continue
        table[col] = np.array([float(r[col]) for r in rows])
    return table


def _save(fig, spec: FigureSpec) -> str:
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # no Software chunk: byte-identical output for identical input
    fig.savefig(out, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return str(out)


def _pair_key(table):
    return sorted({(le, lv) for le, lv in zip(table["lambda_e"], table["lambda_v"])})


def _annotate_resonance(ax):
    ax.axvline(RESONANCE_OMEGA, color="white", linestyle="--", linewidth=1.0)
    for om, s in REFERENCE_POINTS:
        ax.plot(om, s, marker="o", markersize=4, color="black")


def _render_heatmap(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0], _REQUIRED["heatmap"])
    pairs = _pair_key(table)
    fig, axes = plt.subplots(2, len(pairs), figsize=(3.6 * len(pairs), 6.2),
                             squeeze=False, sharex=True, sharey=True)
    for col, (le, lv) in enumerate(pairs):
        mask = (table["lambda_e"] == le) & (table["lambda_v"] == lv)
        omegas = np.unique(table["omega"][mask])
        svals = np.unique(table["huang_rhys"][mask])
        if omegas.size < 2 or svals.size < 2:
            raise SchemaError("heatmap needs at least a 2x2 (omega, huang_rhys) grid")
        for row, quantity in enumerate(("eta", "im_coherence")):
            grid = np.full((svals.size, omegas.size), np.nan)
            oi = np.searchsorted(omegas, table["omega"][mask])
            si = np.searchsorted(svals, table["huang_rhys"][mask])
            grid[si, oi] = table[quantity][mask]
            ax = axes[row][col]
            mesh = ax.pcolormesh(omegas, svals, grid, shading="nearest",
                                 cmap="viridis")
            ax.set_yscale("log")
            _annotate_resonance(ax)
            fig.colorbar(mesh, ax=ax)
            if row == 1:
                ax.set_xlabel(r"$\Omega$ (cm$^{-1}$)")
            if col == 0:
                label = "quantum yield" if quantity == "eta" else r"Im[$\rho_{DA}$]"
                ax.set_ylabel(f"{label}\nHuang-Rhys factor")
        axes[0][col].set_title(rf"$\lambda$ = ({le:g}, {lv:g}) cm$^{{-1}}$")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return _save(fig, spec)


def _render_lines(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0], _REQUIRED["lines"])
    svals = np.unique(table["huang_rhys"])
    pairs = _pair_key(table)
    fig, axes = plt.subplots(1, svals.size, figsize=(4.0 * svals.size, 3.4),
                             squeeze=False, sharey=False)
    for col, s in enumerate(svals):
        ax = axes[0][col]
        for le, lv in pairs:
            mask = ((table["huang_rhys"] == s) & (table["lambda_e"] == le)
                    & (table["lambda_v"] == lv))
            omegas = table["omega"][mask]
            order = np.argsort(omegas)
            ax.plot(omegas[order], table["eta"][mask][order],
                    label=rf"$\lambda$=({le:g},{lv:g})")
        ax.axvline(RESONANCE_OMEGA, color="gray", linestyle="--", linewidth=0.8)
        ax.set_title(f"S = {s:g}")
        ax.set_xlabel(r"$\Omega$ (cm$^{-1}$)")
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
    axes[0][0].set_ylabel("quantum yield")
    axes[0][-1].legend(fontsize=8)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return _save(fig, spec)


def _render_timeseries(spec: FigureSpec) -> str:
    panels = (("pop_A", "acceptor population"),
              ("rc_population", "reaction-center population"),
              ("im_coherence", r"Im[$\rho_{DA}$]"))
    fig, axes = plt.subplots(1, 3, figsize=(11.0, 3.2))
    for path in spec.inputs:
        table = load_table(path, _REQUIRED["timeseries"])
        label = Path(path).stem.replace("dynamics_", "")
        for ax, (colname, _) in zip(axes, panels):
            ax.plot(table["t_fs"], table[colname], label=label, linewidth=1.0)
    for ax, (_, title) in zip(axes, panels):
        ax.set_xlabel("t (fs)")
        ax.set_ylabel(title)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
    axes[-1].legend(fontsize=8)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return _save(fig, spec)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "lines": _render_lines,
    "timeseries": _render_timeseries,
}


def render(spec: FigureSpec) -> str:
    """Render the figure described by the spec; returns the output path."""
    return _RENDERERS[spec.kind](spec)
