"""Figure rendering for the CLI report paths.

Each renderer writes a file next to the delimited output; nothing here is
needed by the numerical pipelines.  Uses the Agg backend so rendering
works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import ScanGrid

_DPI = 150


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def scan_figure(grid: ScanGrid, path: str | Path, title: str = "") -> None:
    """Two panels in the style of the published validity-domain maps:
    optimal order per cell, and log10 of the minimal G.  Escaped cells are
    hatched out (gray)."""
    extent = (grid.xs[0], grid.xs[-1], grid.ys[0], grid.ys[-1])
    opt = np.ma.masked_where(grid.escaped, grid.opt_n)
    logg = np.ma.masked_where(
        grid.escaped | ~np.isfinite(grid.min_g) | (grid.min_g <= 0),
        np.log10(np.maximum(grid.min_g, 1e-300)),
    )
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    cmap = plt.get_cmap("viridis", grid.n_max)
    cmap.set_bad("0.85")
    im1 = ax1.imshow(
        opt, origin="lower", extent=extent, cmap=cmap,
        vmin=0.5, vmax=grid.n_max + 0.5, interpolation="nearest",
    )
    fig.colorbar(im1, ax=ax1, label="optimal n", ticks=range(1, grid.n_max + 1))
    ax1.set_xlabel("x")
    ax1.set_ylabel("y")
    ax1.set_title("optimal interpolation order")
    cmap2 = plt.get_cmap("magma").copy()
    cmap2.set_bad("0.85")
    im2 = ax2.imshow(
        logg, origin="lower", extent=extent, cmap=cmap2, interpolation="nearest"
    )
    fig.colorbar(im2, ax=ax2, label="log10 min G")
    ax2.set_xlabel("x")
    ax2.set_ylabel("y")
    ax2.set_title("minimal G value")
    if title:
        fig.suptitle(title)
    _save(fig, path)


def error_profile_figure(
    entries, path: str | Path, xlabel: str = "m", title: str = ""
) -> None:
    """Semi-log decay profile (order against error)."""
    xs = [e[0] for e in entries]
    ys = [e[1] for e in entries]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(xs, ys, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("error (max norm)")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    _save(fig, path)


def orbit_figure(points: np.ndarray, path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    if points.shape[1] >= 2:
        ax.plot(points[:, 0], points[:, 1], ",", color="0.3")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    else:
        ax.plot(points[:, 0], ".", markersize=2)
        ax.set_xlabel("k")
        ax.set_ylabel("x")
    if title:
        ax.set_title(title)
    _save(fig, path)


def drift_figure(values: np.ndarray, path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(values) - values[0], lw=0.7)
    ax.set_xlabel("iterate k")
    ax.set_ylabel("h(x_k) - h(x_0)")
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    _save(fig, path)
