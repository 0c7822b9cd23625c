"""SVG figures of point clouds and approximation studies.

Figures are drawn on an object-oriented matplotlib canvas (no pyplot state)
and written with a fixed hash salt and no date stamp, so identical inputs
give identical bytes.
"""

from __future__ import annotations

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .geometry import CompactSet, DimensionError

_RC = {
    "svg.hashsalt": "ifsx",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig: Figure, path) -> None:
    FigureCanvasSVG(fig)
    fig.savefig(path, format="svg", metadata={"Date": None})


def render_points(a: CompactSet, path, title: str | None = None, width: float = 6.0) -> None:
    """Tick plot on [0, 1] for d = 1, scatter on the unit square for d = 2."""
    if a.dim > 2:
        raise DimensionError(f"can only draw d = 1 or d = 2 clouds, got d = {a.dim}")
    if len(a) == 0:
        raise ValueError("nothing to draw")
    with matplotlib.rc_context(_RC):
        if a.dim == 1:
            fig = Figure(figsize=(width, 1.2))
            ax = fig.add_subplot(1, 1, 1)
            ax.vlines(a.points[:, 0], 0.0, 1.0, colors="k", linewidth=0.5)
            ax.set_ylim(0.0, 1.0)
            ax.set_yticks([])
            ax.spines["left"].set_visible(False)
        else:
            fig = Figure(figsize=(width, width))
            ax = fig.add_subplot(1, 1, 1)
            ax.scatter(a.points[:, 0], a.points[:, 1], s=1.0, c="k", marker="o", linewidths=0)
            ax.set_ylim(0.0, 1.0)
            ax.set_aspect("equal")
        ax.set_xlim(0.0, 1.0)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def render_study(ks, distances, path, title: str | None = None) -> None:
    """Log-log plot of Hausdorff distance against the number of nodes."""
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(4.5, 3.2))
        ax = fig.add_subplot(1, 1, 1)
        pos = [(k, d) for k, d in zip(ks, distances) if d > 0]
        if pos:
            ax.loglog([k for k, _ in pos], [d for _, d in pos], "o-", color="k", markersize=3)
        ax.set_xlabel("rational nodes k")
        ax.set_ylabel("Hausdorff distance")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
