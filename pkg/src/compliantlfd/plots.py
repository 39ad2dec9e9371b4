"""SVG figures for evaluation runs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import geometry as geo  # noqa: E402

# deterministic SVG output
matplotlib.rcParams["svg.hashsalt"] = "compliantlfd"
_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def error_boxplot(errors_by_size: dict, path, assumed_error_deg=None):
    """Angular error of the learned direction per demonstration group size."""
    sizes = sorted(errors_by_size)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.boxplot([np.asarray(errors_by_size[s]) for s in sizes], tick_labels=[str(s) for s in sizes])
    if assumed_error_deg is not None:
        ax.axhline(assumed_error_deg, ls="--", color="grey", lw=1)
    ax.set_xlabel("demonstrations per group")
    ax.set_ylabel("error [deg]")
    _save(fig, path)


def bic_bars(bic_by_scenario: dict, path):
    """Grouped bars of the mean BIC of the 0/1/2-axis models per scenario."""
    names = list(bic_by_scenario)
    fig, axes = plt.subplots(1, len(names), figsize=(3.2 * len(names), 3), squeeze=False)
    for ax, name in zip(axes[0], names):
        b = np.asarray(bic_by_scenario[name], dtype=float).reshape(-1, 3)
        mean = b.mean(axis=0)
        colors = ["C0"] * 3
        colors[int(np.argmin(mean))] = "C3"
        ax.bar(["0", "1", "2"], mean, color=colors)
        ax.set_title(name)
        ax.set_xlabel("compliant axes")
    axes[0, 0].set_ylabel("BIC")
    _save(fig, path)


def grid_heatmap(grid: geo.VotingGrid, path, cell=None):
    """Vote counts over the angular plane; the marked cell is the vector median.

    Returns the rendered image data (indexed ``[y, x]``).
    """
    c = np.degrees(grid.centers)
    h = grid.resolution_deg / 2
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(grid.counts.T, origin="lower", extent=(c[0] - h, c[-1] + h, c[0] - h, c[-1] + h),
                   cmap="viridis", interpolation="nearest")
    if cell is not None:
        g = np.degrees(grid.cell_center(cell))
        ax.plot(g[0], g[1], "r+", ms=10)
    fig.colorbar(im, ax=ax, label="votes")
    ax.set_xlabel("theta_x [deg]")
    ax.set_ylabel("theta_y [deg]")
    data = np.asarray(im.get_array())
    _save(fig, path)
    return data


def polygon_plot(polys, path, inliers=None, feasible=None, center=None):
    """Constraint polygons (outliers dashed), their intersection and its centre (degrees)."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    for i, p in enumerate(polys):
        q = np.degrees(np.vstack([p, p[:1]]))
        keep = inliers is None or inliers[i]
        ax.plot(q[:, 0], q[:, 1], "-" if keep else "--", color="C0" if keep else "0.6", lw=0.6)
    if feasible is not None and len(feasible):
        f = np.degrees(np.asarray(feasible))
        ax.fill(f[:, 0], f[:, 1], color="C3", alpha=0.5)
    if center is not None:
        ax.plot(*np.degrees(center), "k*")
    ax.set_aspect("equal")
    ax.set_xlabel("theta_x [deg]")
    ax.set_ylabel("theta_y [deg]")
    _save(fig, path)
