"""SVG artifacts: scenario snapshots and sweep comparison charts.

Output is fully vector (no rasterized layers) and byte-deterministic for
identical inputs: the SVG hash salt is pinned and no timestamps are written.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection, PolyCollection

from .search import PlanStatus
from .vehicle import Direction

OBSTACLE_COLOR = "#000000"
EXPANSION_COLOR = "#aaaaaa"
FORWARD_COLOR = "#2ca02c"
REVERSE_COLOR = "#d62728"
START_COLOR = "#00ffff"
GOAL_COLOR = "#2ca02c"

_TICK_LEN = 0.4

_HASH_SALT = "parkplan"


def _cell_polys(grid):
    res = grid.resolution
    occupied = np.argwhere(grid.cells)
    verts = np.empty((len(occupied), 4, 2))
    xs = occupied[:, 1] * res
    ys = occupied[:, 0] * res
    verts[:, 0, 0] = xs
    verts[:, 0, 1] = ys
    verts[:, 1, 0] = xs + res
    verts[:, 1, 1] = ys
    verts[:, 2, 0] = xs + res
    verts[:, 2, 1] = ys + res
    verts[:, 3, 0] = xs
    verts[:, 3, 1] = ys + res
    return verts


def _path_segments(poses):
    forward, reverse = [], []
    for (p0, _), (p1, tag) in zip(poses, poses[1:]):
        seg = ((p0.x, p0.y), (p1.x, p1.y))
        (forward if tag is Direction.FORWARD else reverse).append(seg)
    return forward, reverse


def render_svg(grid, result, out_path, expansions=(), goal=None):
    """Write the scenario snapshot; raises OSError if out_path is unwritable."""
    plt.rcParams["svg.hashsalt"] = _HASH_SALT
    fig, ax = plt.subplots(figsize=(8.0, 8.0 * grid.height_m / grid.width_m))
    try:
        ax.add_collection(PolyCollection(_cell_polys(grid),
                                         facecolors=OBSTACLE_COLOR,
                                         edgecolors="none"))
        if expansions:
            ticks = [((p.x, p.y),
                      (p.x + _TICK_LEN * np.cos(p.theta),
                       p.y + _TICK_LEN * np.sin(p.theta)))
                     for p in expansions]
            ax.add_collection(LineCollection(ticks, colors=EXPANSION_COLOR,
                                             linewidths=0.5))
        if result is not None and result.status is PlanStatus.FOUND:
            forward, reverse = _path_segments(result.poses)
            if forward:
                ax.add_collection(LineCollection(forward,
                                                 colors=FORWARD_COLOR,
                                                 linewidths=1.6))
            if reverse:
                ax.add_collection(LineCollection(reverse,
                                                 colors=REVERSE_COLOR,
                                                 linewidths=1.6))
        if result is not None:
            ax.plot([result.start.x], [result.start.y], marker="o",
                    color=START_COLOR, markersize=7, linestyle="none",
                    markeredgecolor="#006060")
        if goal is not None:
            ax.plot([goal.x], [goal.y], marker="*", color=GOAL_COLOR,
                    markersize=11, linestyle="none")
        ax.set_xlim(0.0, grid.width_m)
        ax.set_ylim(0.0, grid.height_m)
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)


def sweep_figure(rows, out_path):
    """Bar chart of mean expansions and times per engine over found rows."""
    plt.rcParams["svg.hashsalt"] = _HASH_SALT
    engines = ("hybrid", "smha")
    colors = {"hybrid": "#7f7f7f", "smha": "#1f77b4"}

    def mean_of(engine, column):
        vals = [float(r[column]) for r in rows
                if r["engine"] == engine and r["status"] == "Found"]
        return sum(vals) / len(vals) if vals else 0.0

    fig, (ax_states, ax_time) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    try:
        for ax, column, label in (
                (ax_states, "expanded_states", "mean expanded states"),
                (ax_time, "execution_time_s", "mean execution time [s]")):
            values = [mean_of(e, column) for e in engines]
            ax.bar(range(len(engines)), values,
                   color=[colors[e] for e in engines])
            ax.set_xticks(range(len(engines)))
            ax.set_xticklabels(engines)
            ax.set_ylabel(label)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
