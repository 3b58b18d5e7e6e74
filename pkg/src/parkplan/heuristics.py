"""Cost-to-go estimators that guide the planners.

Two complementary estimates: a steering-aware lower bound that ignores
obstacles, and an obstacle-aware 2-D grid distance that ignores steering
limits. Their maximum drives the baseline planner; the multi-queue planner
uses the first as its consistent anchor and both as inadmissible guides.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .reeds_shepp import rs_length
from .world import compute_distance_field


class CostMap2d:
    """Per-cell cost-to-goal in meters over the occupancy raster."""

    def __init__(self, values, resolution):
        arr = np.asarray(values, dtype=float)
        arr.setflags(write=False)
        self.values = arr
        self.resolution = float(resolution)

    @property
    def width_m(self):
        return self.values.shape[1] * self.resolution

    @property
    def height_m(self):
        return self.values.shape[0] * self.resolution


def build_costmap(grid, goal, footprint):
    """Dijkstra over 8-connected free cells, seeded at the goal's cell.

    Cells with less room than a single footprint disk are treated as blocked
    so the estimate never leads the vehicle somewhere it cannot physically be.
    The seed cell itself is exempt: a goal touching the blocked fringe still
    radiates costs outward.
    """
    field = compute_distance_field(grid)
    blocked = field.values < footprint.radius
    h, w = blocked.shape
    gx, gy = grid.cell_of(goal.x, goal.y)
    if not (0 <= gx < w and 0 <= gy < h):
        raise ValueError("goal pose lies outside the grid")
    if grid.is_occupied(gx, gy):
        raise ValueError("goal cell is inside an obstacle")

    res = grid.resolution
    step_straight = res
    step_diagonal = res * math.sqrt(2.0)
    values = np.full((h, w), math.inf)
    values[gy, gx] = 0.0
    heap = [(0.0, gy, gx)]
    while heap:
        cost, iy, ix = heapq.heappop(heap)
        if cost > values[iy, ix]:
            continue
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                ny, nx = iy + dy, ix + dx
                if not (0 <= nx < w and 0 <= ny < h) or blocked[ny, nx]:
                    continue
                step = step_straight if dx == 0 or dy == 0 else step_diagonal
                cand = cost + step
                if cand < values[ny, nx]:
                    values[ny, nx] = cand
                    heapq.heappush(heap, (cand, ny, nx))
    return CostMap2d(values, res)


def h_nonholonomic(pose, goal, radius):
    """Length of the optimal bounded-curvature path ignoring obstacles."""
    return rs_length(pose, goal, radius)


def h_holonomic(pose, costmap):
    """Bilinear lookup of the 2-D cost-to-go; heading is ignored.

    Infinite corners fall back to the nearest finite corner value; a pose
    outside the grid or surrounded by unreachable cells maps to +infinity.
    """
    if not (0.0 <= pose.x < costmap.width_m and 0.0 <= pose.y < costmap.height_m):
        return math.inf
    vals = costmap.values
    h, w = vals.shape
    res = costmap.resolution
    u = pose.x / res - 0.5
    v = pose.y / res - 0.5
    if w > 1:
        i0 = min(max(int(math.floor(u)), 0), w - 2)
        fx = min(max(u - i0, 0.0), 1.0)
        i1 = i0 + 1
    else:
        i0, i1, fx = 0, 0, 0.0
    if h > 1:
        j0 = min(max(int(math.floor(v)), 0), h - 2)
        fy = min(max(v - j0, 0.0), 1.0)
        j1 = j0 + 1
    else:
        j0, j1, fy = 0, 0, 0.0

    corners = ((vals[j0, i0], i0, j0), (vals[j0, i1], i1, j0),
               (vals[j1, i0], i0, j1), (vals[j1, i1], i1, j1))
    if all(math.isinf(c[0]) for c in corners):
        return math.inf
    if any(math.isinf(c[0]) for c in corners):
        best = math.inf
        best_d = math.inf
        for val, ix, iy in corners:
            if math.isinf(val):
                continue
            d = math.hypot(pose.x - (ix + 0.5) * res, pose.y - (iy + 0.5) * res)
            if d < best_d:
                best_d = d
                best = val
        return best
    top = corners[0][0] * (1.0 - fx) + corners[1][0] * fx
    bot = corners[2][0] * (1.0 - fx) + corners[3][0] * fx
    return top * (1.0 - fy) + bot * fy


def h_hybrid_max(pose, goal, radius, costmap):
    """Pointwise maximum of the two estimators; propagates +infinity."""
    return max(h_nonholonomic(pose, goal, radius), h_holonomic(pose, costmap))


@dataclass(frozen=True)
class HeuristicSet:
    """One consistent anchor plus the ordered inadmissible guides.

    `fused`, when present, returns (anchor_value, inadmissible_values) in one
    call so shared subexpressions are evaluated once per pose.
    """

    anchor: object
    inadmissibles: tuple
    fused: object = None

    def __post_init__(self):
        if self.anchor is None:
            raise ValueError("anchor heuristic required")
        if not self.inadmissibles:
            raise ValueError("at least one inadmissible heuristic required")

    def evaluate(self, pose):
        if self.fused is not None:
            return self.fused(pose)
        return self.anchor(pose), tuple(f(pose) for f in self.inadmissibles)


def make_heuristic_set(goal, radius, costmap):
    """Anchor = steering-aware bound; guides = grid distance and the max."""

    def anchor(pose):
        return rs_length(pose, goal, radius)

    def holonomic(pose):
        return h_holonomic(pose, costmap)

    def hybrid(pose):
        return max(anchor(pose), holonomic(pose))

    def fused(pose):
        a = anchor(pose)
        b = holonomic(pose)
        return a, (b, max(a, b))

    return HeuristicSet(anchor=anchor, inadmissibles=(holonomic, hybrid),
                        fused=fused)


class CostmapCache:
    """Memoizes costmaps by (grid identity, goal cell) for one planning run."""

    def __init__(self):
        self._maps = {}

    def get(self, grid, goal, footprint):
        key = (grid.grid_hash, grid.cell_of(goal.x, goal.y))
        if key not in self._maps:
            self._maps[key] = build_costmap(grid, goal, footprint)
        return self._maps[key]


def dump_costmap_pgm(costmap, path):
    """Grayscale debug dump; unreachable cells render white (255)."""
    vals = costmap.values
    finite = vals[np.isfinite(vals)]
    top = float(finite.max()) if finite.size and finite.max() > 0 else 1.0
    h, w = vals.shape
    lines = ["P2", "{} {}".format(w, h), "255"]
    for iy in range(h - 1, -1, -1):
        row = []
        for ix in range(w):
            v = vals[iy, ix]
            row.append("255" if math.isinf(v) else str(int(round(v / top * 254))))
        lines.append(" ".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
