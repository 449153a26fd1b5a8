"""Figure construction for the three scan kinds.

Layout conventions: pump sweeps use a log occupation axis with vertical
arrows at the analytic thresholds; phase diagrams overlay the continuum
curve (black), the reversible bound (red dashed) and numeric points
(orange markers); current scans use stacked panels with the Carnot
efficiency as a black dashed reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import FigureDataError, load_manifest, load_table

KINDS = ("pump-sweep", "phase-diagram", "currents")

_THRESHOLD_LABELS = {
    "reversible_dye": "reversible dye threshold",
    "two_level": "two-level threshold",
    "continuum": "continuum threshold",
}


@dataclass
class FigureSpec:
    kind: str
    inputs: tuple = ()
    out: str | None = None
    manifest: str | None = None
    log_y: bool = True
    arrows: bool = True
    carnot: bool = True
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureDataError(f"unknown figure kind {self.kind!r}; "
                                  f"expected one of {KINDS}")
        self.inputs = tuple(str(p) for p in self.inputs)
        if not self.inputs:
            raise FigureDataError("at least one input CSV is required")


def _threshold_arrows(ax, manifest: dict):
    thresholds = manifest.get("thresholds", {})
    ymin, ymax = ax.get_ylim()
    for i, (key, label) in enumerate(_THRESHOLD_LABELS.items()):
        if key not in thresholds:
            continue
        x = thresholds[key]
        ax.axvline(x, color="k", lw=0.6, ls=":")
        ax.annotate("", xy=(x, ymin), xytext=(x, ymin * 4 if ax.get_yscale() == "log"
                                              else ymin + 0.08 * (ymax - ymin)),
                    arrowprops=dict(arrowstyle="->", color="k"),
                    annotation_clip=False)
        ax.text(x, ymax, f" {label}", rotation=90, va="top", fontsize=7)


def _render_pump_sweep(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    manifest = {}
    for path in spec.inputs:
        table = load_table(path, required=("t_hot_K", "n0", "n_photon", "f0"))
        stem = Path(path).stem
        ax.plot(table["t_hot_K"], table["n0"], "o-", ms=3,
                label=f"{stem}: $n_0$")
        ax.plot(table["t_hot_K"], table["n_photon"], "s--", ms=3,
                label=f"{stem}: $N_{{ph}}$")
        if not manifest:
            manifest = load_manifest(path, spec.manifest)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("$T_h$ (K)")
    ax.set_ylabel("occupation")
    if spec.arrows:
        _threshold_arrows(ax, manifest)
    ax.legend(fontsize=7)
    return fig


def _render_phase_diagram(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for path in spec.inputs:
        table = load_table(path, required=("t_cold_K", "t_h_continuum_K",
                                           "t_h_two_level_K", "t_h_numeric_K"))
        ax.plot(table["t_cold_K"], table["t_h_continuum_K"], "k-",
                label="continuum threshold")
        ax.plot(table["t_cold_K"], table["t_h_two_level_K"], "r--",
                label="reversible bound at $\\bar\\omega_h$")
        ax.plot(table["t_cold_K"], table["t_h_numeric_K"], "o",
                color="tab:orange", label="numeric threshold")
    ax.set_xlabel("$T_c$ (K)")
    ax.set_ylabel("$T_h$ at threshold (K)")
    ax.legend(fontsize=8)
    return fig


def _render_currents(spec: FigureSpec):
    fig, axes = plt.subplots(3, 1, figsize=(5.0, 7.2), sharex=True)
    for path in spec.inputs:
        table = load_table(path, required=("t_hot_K", "j_hot", "j_cold",
                                           "work", "l_incoherent", "eta",
                                           "eta_carnot", "sigma"))
        t = table["t_hot_K"]
        axes[0].plot(t, table["j_hot"], label="$J_{hot}$")
        axes[0].plot(t, table["j_cold"], label="$J_{cold}$")
        axes[1].plot(t, table["work"], label="$W$")
        axes[1].plot(t, table["l_incoherent"], label="$L$")
        axes[2].plot(t, table["eta"], label="$\\eta$")
        if spec.carnot:
            axes[2].plot(t, table["eta_carnot"], "k--", lw=0.8,
                         label="$\\eta_{Carnot}$")
    axes[0].set_ylabel("heat current")
    axes[1].set_ylabel("output power")
    axes[2].set_ylabel("efficiency")
    axes[2].set_xlabel("$T_h$ (K)")
    axes[2].set_ylim(0.0, 1.05)
    for ax in axes:
        ax.legend(fontsize=7)
    return fig


_RENDERERS = {
    "pump-sweep": _render_pump_sweep,
    "phase-diagram": _render_phase_diagram,
    "currents": _render_currents,
}


def render(spec: FigureSpec):
    """Build the figure; write it when spec.out is set. Returns the
    matplotlib Figure so callers and tests can inspect it."""
    fig = _RENDERERS[spec.kind](spec)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    if spec.out:
        fig.savefig(spec.out, dpi=200)
    return fig
