"""Figure layouts over the simulator's CSV outputs.

Three layouts:

* ``trajectory`` — three stacked rows from one path: wage share and
  employment; net financial charges (r_l*ell - r_m*m) and the speculative
  flow; discounted price with the trend indicator and effective rate.
  An optional jump log adds event markers to the price row.
* ``sweep`` — crisis probability against one parameter with its 95%
  Wilson band.
* ``heatmap`` — crisis probability over a two-parameter grid.

Rendering is a pure function of the CSV bytes and the spec: a fixed
canvas, fixed dpi, and no embedded timestamps or writer metadata, so
identical inputs give identical image bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import RenderInputError, Table, read_table

__all__ = ["PanelSpec", "render"]

_FIGSIZE = (8.0, 9.0)
_DPI = 120
# Strip the writer name so the PNG bytes depend only on the drawn content.
_METADATA = {"Software": None}

_LAYOUTS = ("trajectory", "sweep", "heatmap")


@dataclass(frozen=True)
class PanelSpec:
    layout: str            # "trajectory" | "sweep" | "heatmap"
    csv_path: str
    out_path: str
    jumps_path: str | None = None   # trajectory layout only
    overlay: bool = False           # analytic reference lines


def render(spec: PanelSpec) -> None:
    """Render one figure to ``spec.out_path``."""
    if spec.layout not in _LAYOUTS:
        raise RenderInputError(
            f"unknown layout {spec.layout!r} (expected one of {_LAYOUTS})")
    table = read_table(spec.csv_path)
    if spec.layout == "trajectory":
        jumps = (read_table(spec.jumps_path, allow_empty=True)
                 if spec.jumps_path else None)
        fig = _trajectory_panel(table, jumps, spec.overlay)
    elif spec.layout == "sweep":
        fig = _sweep_figure(table)
    else:
        fig = _heatmap_figure(table)
    try:
        fig.savefig(spec.out_path, dpi=_DPI, metadata=_METADATA)
    finally:
        plt.close(fig)


def _trajectory_panel(table: Table, jumps: Table | None, overlay: bool):
    t = table.column("t")
    r_l = table.param("r_l")
    r_m = table.param("r_m")
    fig, (ax1, ax2, ax3) = plt.subplots(
        3, 1, figsize=_FIGSIZE, dpi=_DPI, sharex=True)

    ax1.plot(t, table.column("omega"), color="tab:blue", label="wage share")
    ax1.plot(t, table.column("e"), color="tab:orange", label="employment rate")
    ax1.set_ylabel("share / rate")
    ax1.legend(loc="upper right")

    charges = r_l * table.column("ell") - r_m * table.column("m")
    ax2.plot(t, charges, color="tab:red", label="net financial charges")
    ax2.plot(t, table.column("f"), color="tab:green", label="speculative flow")
    ax2.set_ylabel("fraction of output")
    ax2.legend(loc="upper right")

    ax3.plot(t, table.column("mu"), color="tab:purple", label="price trend")
    ax3.plot(t, table.column("r"), color="tab:brown", label="effective rate")
    ax3.set_ylabel("rate, 1/years")
    ax3.set_xlabel("time, years")
    price_ax = ax3.twinx()
    price_ax.plot(t, table.column("S_disc"), color="tab:gray", alpha=0.8,
                  label="discounted price")
    price_ax.set_ylabel("discounted price")

    if jumps is not None and jumps.rows:
        times = jumps.column("t")
        kinds = jumps.strings("kind")
        seen = set()
        for tj, kind in zip(times, kinds):
            color = "crimson" if kind == "down-price" else "seagreen"
            ax3.axvline(tj, color=color, alpha=0.3, linewidth=0.8,
                        label=None if kind in seen else f"{kind} jump")
            seen.add(kind)

    if overlay:
        sigma = table.param("sigma")
        rho_1 = table.param("rho_1")
        ax3.axhline(r_l - 0.5 * sigma**2, color="tab:purple", linestyle="--",
                    linewidth=0.8, label="stationary trend mean")
        ax3.axhline(r_l + rho_1, color="tab:brown", linestyle="--",
                    linewidth=0.8, label="quiet-market rate limit")

    handles, labels = ax3.get_legend_handles_labels()
    hp, lp = price_ax.get_legend_handles_labels()
    ax3.legend(handles + hp, labels + lp, loc="upper left", fontsize=8)
    fig.align_ylabels()
    fig.tight_layout()
    return fig


def _sweep_figure(table: Table):
    names = set(table.strings("param"))
    if len(names) != 1:
        raise RenderInputError(
            f"{table.path}: expected a single swept parameter, got {sorted(names)}")
    (name,) = names
    x = table.column("value")
    fig, ax = plt.subplots(figsize=(_FIGSIZE[0], 5.0), dpi=_DPI)
    ax.fill_between(x, table.column("ci_low"), table.column("ci_high"),
                    color="tab:blue", alpha=0.25, label="95% interval")
    ax.plot(x, table.column("p_hat"), marker="o", color="tab:blue",
            label="crisis probability")
    ax.set_xlabel(name)
    ax.set_ylabel("crisis probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def _heatmap_figure(table: Table):
    n1 = table.strings("p1")[0]
    n2 = table.strings("p2")[0]
    v1 = table.column("p1_value")
    v2 = table.column("p2_value")
    p = table.column("p_hat")
    rows = np.unique(v1)
    cols = np.unique(v2)
    if len(rows) * len(cols) != len(p):
        raise RenderInputError(
            f"{table.path}: grid is not complete "
            f"({len(rows)}x{len(cols)} axes vs {len(p)} cells)")
    grid = np.full((len(rows), len(cols)), np.nan)
    for a, b, val in zip(v1, v2, p):
        grid[np.searchsorted(rows, a), np.searchsorted(cols, b)] = val

    fig, ax = plt.subplots(figsize=(_FIGSIZE[0], 6.0), dpi=_DPI)
    mesh = ax.pcolormesh(cols, rows, grid, cmap="viridis", vmin=0.0, vmax=1.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="crisis probability")
    ax.set_xlabel(n2)
    ax.set_ylabel(n1)
    fig.tight_layout()
    return fig
