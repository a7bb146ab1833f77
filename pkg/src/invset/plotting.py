"""Matplotlib figures for point clouds and optimization traces.

Figures are written as SVG with a fixed hash salt and no date stamp, so the
same input always produces the same bytes. Point markers live in the SVG
group ``points`` (one ``<use>`` element per point) and spacing circles in the
group ``delta-circles`` (one ``<path>`` per point).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import PatchCollection  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from .geometry import as_points  # noqa: E402

MAX_REFERENCE_MARKERS = 4000
PROJECTIONS = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}

STYLE = {
    "svg.hashsalt": "invset",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.linewidth": 0.6,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "xtick.major.size": 3,
    "ytick.major.size": 3,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, out):
    out = Path(out)
    fig.savefig(out, format=out.suffix.lstrip(".") or "svg", metadata={"Date": None} if out.suffix == ".svg" else None)
    plt.close(fig)
    return out


def _project(pts: np.ndarray, proj: str, level: float) -> np.ndarray:
    d = pts.shape[1]
    if d == 1:
        return np.column_stack([pts[:, 0], np.full(pts.shape[0], level)])
    if d == 2:
        return pts
    if d == 3:
        try:
            i, j = PROJECTIONS[proj]
        except KeyError:
            raise ValueError(f"projection must be one of {sorted(PROJECTIONS)}, got {proj!r}") from None
        return pts[:, [i, j]]
    raise ValueError(f"can only plot clouds of dimension 1, 2 or 3, got {d}")


def plot_clouds(clouds, out, *, reference=None, delta=None, proj="xy", labels=None, title=None):
    """Scatter one or more clouds into ``out`` (SVG by default).

    1d clouds are drawn as rows stacked upward in input order, so a list of
    snapshots reads as the evolution of the cloud. Only the last cloud is
    decorated with circles of radius ``delta``.
    """
    clouds = [as_points(c) for c in clouds]
    if not clouds:
        raise ValueError("nothing to plot")
    dims = {c.shape[1] for c in clouds}
    if len(dims) != 1:
        raise ValueError(f"clouds have mixed dimensions {sorted(dims)}")
    dim = dims.pop()
    if dim not in (1, 2, 3):
        raise ValueError(f"can only plot clouds of dimension 1, 2 or 3, got {dim}")

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.0 if dim > 1 else 3.0))
        if reference is not None:
            ref = as_points(reference)
            if dim == 1:
                ax.axvspan(ref.min(), ref.max(), color="tab:red", alpha=0.15, lw=0, gid="reference")
            else:
                # thin dense references; the figure only needs their outline
                ref2 = _project(ref, proj, 0.0)[:: max(1, len(ref) // MAX_REFERENCE_MARKERS)]
                ax.scatter(ref2[:, 0], ref2[:, 1], s=1, color="tab:red", alpha=0.3, lw=0, gid="reference")

        cmap = plt.get_cmap("viridis")
        last = len(clouds) - 1
        for k, pts in enumerate(clouds):
            xy = _project(pts, proj, float(k))
            color = "k" if k == last else cmap(k / max(last, 1))
            label = labels[k] if labels else None
            gid = "points" if k == last else f"points-{k}"
            ax.scatter(xy[:, 0], xy[:, 1], s=4 if dim > 1 else 6, color=color, lw=0, label=label, gid=gid)

        if delta is not None and dim > 1:
            xy = _project(clouds[-1], proj, 0.0)
            circles = PatchCollection(
                [Circle(p, abs(delta)) for p in xy],
                facecolor="none", edgecolor="tab:blue", linewidth=0.3, gid="delta-circles",
            )
            ax.add_collection(circles)

        if dim > 1:
            ax.set_aspect("equal", adjustable="datalim")
            names = ("x", "y") if dim == 2 else tuple(proj)
            ax.set_xlabel(names[0])
            ax.set_ylabel(names[1])
        else:
            ax.set_xlabel("x")
            ax.set_ylabel("snapshot" if len(clouds) > 1 else "")
            if len(clouds) == 1:
                ax.set_yticks([])
        if labels:
            ax.legend(frameon=False, fontsize=7)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, out)


def plot_convergence(iters, values, grad_inf, out, title=None):
    """Objective value and gradient infinity norm against iteration, log scale."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        v = np.maximum(np.asarray(values, dtype=float), 1e-300)
        g = np.maximum(np.asarray(grad_inf, dtype=float), 1e-300)
        ax.semilogy(iters, v, color="k", lw=1.0, label="objective")
        ax.semilogy(iters, g, color="tab:blue", lw=0.8, ls="--", label="|grad|_inf")
        ax.set_xlabel("iteration")
        ax.legend(frameon=False, fontsize=7)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, out)
