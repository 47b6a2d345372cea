"""SVG figures of depth regions over the data cloud.

Figures are drawn on an object-oriented Agg/SVG canvas (no pyplot global
state).  The SVG id salt and the date metadata are pinned so that equal
inputs give byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import rc_context
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

from .errors import InvalidData

__all__ = ["write_region_svg"]

_RC = {
    "svg.hashsalt": "mdepth",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.linewidth": 0.8,
}


def write_region_svg(regions, sample, path, labels=None, title=None, figsize=(5.0, 5.0)):
    """Write the data scatter with one or more region polygons to ``path``.

    Parameters
    ----------
    regions : Region2D or sequence of Region2D
        Polygons drawn as translucent layers, first one at the bottom.
        Empty regions are skipped and reported in an annotation.
    sample : array_like or Sample
        ``n x 2`` data shown as a scatter.
    path : str or path-like
        Destination file; any ``OSError`` propagates.
    labels : sequence of str, optional
        Legend entries, one per region.
    """
    if hasattr(regions, "vertices"):
        regions = [regions]
    regions = list(regions)
    X = np.asarray(getattr(sample, "data", sample), dtype=float)
    if X.ndim != 2 or X.shape[1] != 2:
        raise InvalidData("region figures need bivariate data")
    if labels is not None and len(labels) != len(regions):
        raise ValueError("one label per region expected")

    with rc_context(_RC):
        fig = Figure(figsize=figsize)
        FigureCanvasSVG(fig)
        ax = fig.add_subplot(1, 1, 1)
        ax.scatter(X[:, 0], X[:, 1], s=4, c="0.55", linewidths=0, zorder=1)
        cmap = matplotlib.colormaps["viridis"]
        n_empty = 0
        for k, reg in enumerate(regions):
            if reg.is_empty:
                n_empty += 1
                continue
            col = cmap(k / max(1, len(regions) - 1))
            lab = None if labels is None else labels[k]
            ax.add_patch(Polygon(reg.vertices, closed=True, facecolor=col, alpha=0.35,
                                 edgecolor=col, linewidth=1.2, zorder=2 + k, label=lab))
        if n_empty:
            msg = "empty region" if n_empty == 1 else f"{n_empty} empty regions"
            ax.text(0.02, 0.98, msg, transform=ax.transAxes, ha="left", va="top", color="firebrick")
        if labels is not None and n_empty < len(regions):
            ax.legend(loc="lower right", frameon=False)
        if title:
            ax.set_title(title)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("$z_1$")
        ax.set_ylabel("$z_2$")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
