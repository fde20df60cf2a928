"""Matplotlib rendering of sweep results to image files."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .field import ridge_width
from .scenario import AlphaBetaGrid, FieldGrid, Scenario, TimeSeries, WindowSearch


def _series_plot(s: Scenario, cols, rows, path):
    taus = np.array([r["tau"] for r in rows])
    fig, ax = plt.subplots(figsize=(7.2, 4.4))
    plotted = 0
    for col in cols:
        if col == "tau":
            continue
        vals = np.array([float(r[col]) for r in rows])
        ax.plot(taus, vals, lw=0.9, label=col)
        plotted += 1
    if any(c.startswith("c_minus") for c in cols):
        ax.axhline(0.5 * s.params.hbar, color="k", lw=0.6, ls=":")
    ax.set_xlabel(r"$\tau$")
    ax.set_title(s.name)
    if plotted <= 8:
        ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _grid_plot(s: Scenario, cols, rows, path):
    alphas = sorted({r["alpha"] for r in rows})
    betas = sorted({r["beta"] for r in rows})
    z = np.full((len(betas), len(alphas)), np.nan)
    for r in rows:
        z[betas.index(r["beta"]), alphas.index(r["alpha"])] = r["sigma_min"]
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    pm = ax.pcolormesh(alphas, betas, z, shading="nearest", cmap="viridis")
    fig.colorbar(pm, ax=ax, label=r"$\min_\tau\,\Sigma$")
    w = math.sqrt(s.params.omega_r)
    ax.plot([w], [w], "r+", ms=12)
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$\beta$")
    ax.set_title(s.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _field_plot(s: Scenario, cols, rows, path):
    sw = s.sweep
    grid = np.array(sorted({r["s"] for r in rows}))
    n = len(grid)
    z = np.array([r["abs_cross_kernel"] for r in rows]).reshape(n, n)
    fig, ax = plt.subplots(figsize=(5.8, 5.0))
    pm = ax.pcolormesh(grid, grid, z.T, shading="nearest", cmap="magma")
    fig.colorbar(pm, ax=ax, label=r"$|D^+|$")
    borders = [-10.0, 0.0, ridge_width(s.params.accel, sw.eps), 15.0]
    tau0 = s.params.tau0
    for b, style in zip(borders, ("--", "-", ":", "-.")):
        ax.plot([b, b], [tau0, b], "w" + style, lw=0.9)
        ax.plot([tau0, b], [b, b], "w" + style, lw=0.9)
    ax.set_xlabel(r"$s$")
    ax.set_ylabel(r"$s'$")
    ax.set_title(s.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _window_plot(s: Scenario, cols, rows, path):
    from .entanglement import c_minus_weak
    row = rows[0]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if row["window_exists"]:
        lo, hi = row["tau_e"], row["tau_de"]
        taus = np.geomspace(max(lo / 5.0, 1.0), hi * 3.0, 400)
        ax.semilogx(taus, [c_minus_weak(s.params, t) for t in taus], lw=1.0)
        ax.axvspan(lo, hi, color="0.9")
    ax.axhline(0.5 * s.params.hbar, color="k", lw=0.6, ls=":")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$c_-$ (weak coupling)")
    ax.set_title(s.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figure(s: Scenario, cols, rows, path: str) -> None:
    """Render the sweep result to an image file next to its CSV."""
    if isinstance(s.sweep, TimeSeries):
        _series_plot(s, cols, rows, path)
    elif isinstance(s.sweep, AlphaBetaGrid):
        _grid_plot(s, cols, rows, path)
    elif isinstance(s.sweep, FieldGrid):
        _field_plot(s, cols, rows, path)
    elif isinstance(s.sweep, WindowSearch):
        _window_plot(s, cols, rows, path)
