"""Parking-lot environment: occupancy grid, distance field, collision queries.

The grid is row-major with cell (ix, iy) covering the square
[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res); continuous queries interpolate
the distance field bilinearly between cell centers.
"""

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage

from .vehicle import (
    DiskFootprint,
    Pose,
    VehicleParams,
    footprint_disks,
    transform_disks,
)

# Extra clearance demanded while searching so that the final path still
# verifies collision-free at the plain margin between sample points.
SEARCH_EXTRA_MARGIN = 0.1

_WALL_M = 0.5
_SIDE_MARGIN_M = 2.0


class Orientation(Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


class OccupancyGrid:
    """Immutable boolean occupancy raster."""

    def __init__(self, cells, resolution):
        arr = np.array(cells, dtype=bool)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("cells must be a non-empty height x width array")
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        arr.setflags(write=False)
        self.cells = arr
        self.resolution = float(resolution)
        self._hash = None

    @property
    def height_cells(self):
        return self.cells.shape[0]

    @property
    def width_cells(self):
        return self.cells.shape[1]

    @property
    def width_m(self):
        return self.width_cells * self.resolution

    @property
    def height_m(self):
        return self.height_cells * self.resolution

    def contains(self, x, y):
        return 0.0 <= x < self.width_m and 0.0 <= y < self.height_m

    def cell_of(self, x, y):
        return int(math.floor(x / self.resolution)), int(math.floor(y / self.resolution))

    def is_occupied(self, ix, iy):
        return bool(self.cells[iy, ix])

    @property
    def grid_hash(self):
        if self._hash is None:
            header = "{} {} {!r}".format(self.width_cells, self.height_cells,
                                         self.resolution)
            digest = hashlib.sha256()
            digest.update(header.encode())
            digest.update(np.packbits(self.cells).tobytes())
            self._hash = digest.hexdigest()
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return (self.resolution == other.resolution
                and self.cells.shape == other.cells.shape
                and bool(np.array_equal(self.cells, other.cells)))

    def __hash__(self):
        return hash(self.grid_hash)


class DistanceField:
    """Per-cell Euclidean distance in meters to the nearest occupied cell."""

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

    def value_at(self, x, y):
        """Bilinear interpolation between cell centers, clamped at the rim."""
        h, w = self.values.shape
        u = x / self.resolution - 0.5
        v = y / self.resolution - 0.5
        if w > 1:
            i0 = min(max(int(math.floor(u)), 0), w - 2)
            fx = min(max(u - i0, 0.0), 1.0)
        else:
            i0, fx = 0, 0.0
        if h > 1:
            j0 = min(max(int(math.floor(v)), 0), h - 2)
            fy = min(max(v - j0, 0.0), 1.0)
        else:
            j0, fy = 0, 0.0
        vals = self.values
        v00 = vals[j0, i0]
        if math.isinf(v00):
            # infinities only occur on fully free grids, where every cell is inf
            return math.inf
        i1 = i0 + 1 if w > 1 else i0
        j1 = j0 + 1 if h > 1 else j0
        top = v00 * (1.0 - fx) + vals[j0, i1] * fx
        bot = vals[j1, i0] * (1.0 - fx) + vals[j1, i1] * fx
        return top * (1.0 - fy) + bot * fy

    def values_at(self, xs, ys):
        """Vectorized value_at over broadcastable coordinate arrays."""
        h, w = self.values.shape
        if math.isinf(self.values[0, 0]):
            # infinities only occur on fully free grids, where every cell is inf
            return np.full(np.broadcast(xs, ys).shape, math.inf)
        u = np.asarray(xs, dtype=float) / self.resolution - 0.5
        v = np.asarray(ys, dtype=float) / self.resolution - 0.5
        if w > 1:
            i0 = np.clip(np.floor(u), 0, w - 2).astype(np.intp)
            fx = np.clip(u - i0, 0.0, 1.0)
            i1 = i0 + 1
        else:
            i0 = np.zeros(u.shape, dtype=np.intp)
            fx = np.zeros_like(u)
            i1 = i0
        if h > 1:
            j0 = np.clip(np.floor(v), 0, h - 2).astype(np.intp)
            fy = np.clip(v - j0, 0.0, 1.0)
            j1 = j0 + 1
        else:
            j0 = np.zeros(v.shape, dtype=np.intp)
            fy = np.zeros_like(v)
            j1 = j0
        vals = self.values
        top = vals[j0, i0] * (1.0 - fx) + vals[j0, i1] * fx
        bot = vals[j1, i0] * (1.0 - fx) + vals[j1, i1] * fx
        return top * (1.0 - fy) + bot * fy


def compute_distance_field(grid):
    """Exact Euclidean distance transform of the free space, in meters."""
    if not grid.cells.any():
        values = np.full(grid.cells.shape, math.inf)
    else:
        values = ndimage.distance_transform_edt(~grid.cells) * grid.resolution
    return DistanceField(values, grid.resolution)


def collision_margin(field):
    """Half cell diagonal: absorbs interpolation error of the sampled field."""
    return field.resolution * math.sqrt(2.0) / 2.0


def is_collision_free(pose, footprint, field, extra_margin=0.0):
    """True iff every disk center is in bounds and clear of obstacles.

    The boundary is closed: a disk exactly touching an obstacle collides.
    """
    margin = collision_margin(field) + extra_margin
    for cx, cy, r in transform_disks(footprint, pose):
        if not (0.0 <= cx < field.width_m and 0.0 <= cy < field.height_m):
            return False
        if field.value_at(cx, cy) <= r + margin:
            return False
    return True


def clear_pose_mask(xs, ys, thetas, footprint, field, extra_margin=0.0):
    """Vectorized is_collision_free over parallel pose component arrays.

    Returns a boolean array of the common shape: True where every disk of
    that pose is in bounds and strictly clear, same rule as the scalar form.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    offs = np.array(footprint.centers, dtype=float)
    cx = xs[..., None] + cos_t[..., None] * offs[:, 0] - sin_t[..., None] * offs[:, 1]
    cy = ys[..., None] + sin_t[..., None] * offs[:, 0] + cos_t[..., None] * offs[:, 1]
    inside = ((cx >= 0.0) & (cx < field.width_m)
              & (cy >= 0.0) & (cy < field.height_m))
    threshold = footprint.radius + collision_margin(field) + extra_margin
    clear = inside & (field.values_at(cx, cy) > threshold)
    return clear.all(axis=-1)


def clearance(pose, footprint, field):
    """Smallest distance-to-obstacle over the disks, radius subtracted.

    Returns 0 for colliding or out-of-bounds poses.
    """
    best = math.inf
    for cx, cy, r in transform_disks(footprint, pose):
        if not (0.0 <= cx < field.width_m and 0.0 <= cy < field.height_m):
            return 0.0
        best = min(best, field.value_at(cx, cy) - r)
    return max(best, 0.0)


@dataclass(frozen=True)
class LayoutParams:
    """Geometry knobs for the generated two-bank parking lot."""

    orientation: Orientation = Orientation.PARALLEL
    slots_per_row: int = 14
    slot_length: float = 7.5
    slot_width: float = 3.25
    aisle_width: float = 6.0
    resolution: float = 0.25
    entry: Pose = field(default_factory=lambda: Pose(0.0, 10.0, 0.0))


@dataclass(frozen=True)
class ParkingLayout:
    grid: OccupancyGrid
    slots: tuple
    entry: Pose
    orientation: Orientation

    def goal_of(self, slot_id):
        for sid, goal in self.slots:
            if sid == slot_id:
                return goal
        raise KeyError("unknown slot id {}".format(slot_id))


def build_parking_layout(layout, vehicle):
    """Construct the walled two-bank lot and one goal pose per slot.

    Slots line both sides of a single horizontal aisle centered on the entry
    height. Ids run west to east along the bottom bank, then the top bank.
    """
    if layout.slots_per_row < 1:
        raise ValueError("need at least one slot per row")
    if layout.slot_length < vehicle.body_length or layout.slot_width < vehicle.body_width:
        raise ValueError("slot dimensions cannot contain the vehicle body")

    res = layout.resolution
    if layout.orientation is Orientation.PARALLEL:
        along, depth = layout.slot_length, layout.slot_width
    else:
        along, depth = layout.slot_width, layout.slot_length

    n = layout.slots_per_row
    bank_x0 = _WALL_M + _SIDE_MARGIN_M
    bank_w = n * along + (n + 1) * res
    width = bank_x0 + bank_w + _SIDE_MARGIN_M + _WALL_M
    aisle_lo = layout.entry.y - layout.aisle_width / 2.0
    aisle_hi = layout.entry.y + layout.aisle_width / 2.0
    bottom_lo = aisle_lo - depth
    if bottom_lo < _WALL_M:
        raise ValueError("slots do not fit between the entry height and the map edge")
    height = aisle_hi + depth + _WALL_M

    w_cells = int(round(width / res))
    h_cells = int(round(height / res))
    occ = np.zeros((h_cells, w_cells), dtype=bool)

    def fill(x0, x1, y0, y1):
        c0, c1 = int(round(x0 / res)), int(round(x1 / res))
        r0, r1 = int(round(y0 / res)), int(round(y1 / res))
        occ[r0:r1, c0:c1] = True

    fill(0.0, width, 0.0, bottom_lo)                 # ground block doubles as rear wall
    fill(0.0, width, height - _WALL_M, height)       # top wall
    fill(width - _WALL_M, width, 0.0, height)        # east wall
    fill(0.0, _WALL_M, 0.0, aisle_lo)                # west wall below the gate
    fill(0.0, _WALL_M, aisle_hi, height)             # west wall above the gate

    bands = ((bottom_lo, aisle_lo), (aisle_hi, aisle_hi + depth))
    for y0, y1 in bands:
        fill(_WALL_M, bank_x0, y0, y1)
        fill(bank_x0 + bank_w, width - _WALL_M, y0, y1)
        for i in range(n + 1):
            x_div = bank_x0 + i * (along + res)
            fill(x_div, x_div + res, y0, y1)

    slots = []
    half_body = vehicle.body_length / 2.0
    for bank, (y0, y1) in enumerate(bands):
        cy = (y0 + y1) / 2.0
        for i in range(n):
            cx = bank_x0 + res + i * (along + res) + along / 2.0
            if layout.orientation is Orientation.PARALLEL:
                goal = Pose(cx + vehicle.rear_overhang - half_body, cy, 0.0)
            elif bank == 0:
                goal = Pose(cx, cy + half_body - vehicle.rear_overhang,
                            -math.pi / 2.0)
            else:
                goal = Pose(cx, cy - half_body + vehicle.rear_overhang,
                            math.pi / 2.0)
            slots.append((bank * n + i, goal))

    grid = OccupancyGrid(occ, res)
    dist = compute_distance_field(grid)
    fp = footprint_disks(vehicle)
    if not is_collision_free(layout.entry, fp, dist,
                             extra_margin=SEARCH_EXTRA_MARGIN):
        raise ValueError("entry pose is not collision-free in this layout")
    for sid, goal in slots:
        if not is_collision_free(goal, fp, dist,
                                 extra_margin=SEARCH_EXTRA_MARGIN):
            raise ValueError("goal pose for slot {} is not collision-free".format(sid))

    return ParkingLayout(grid, tuple(slots), layout.entry, layout.orientation)


def save_map(grid, slots, path):
    """Write the bit-exact map text format (occupancy rows plus slot list)."""
    lines = ["{} {} {!r}".format(grid.width_cells, grid.height_cells,
                                 grid.resolution)]
    for iy in range(grid.height_cells):
        row = grid.cells[iy]
        lines.append("".join("#" if c else "." for c in row))
    lines.append("SLOTS")
    for sid, goal in slots:
        lines.append("{} {!r} {!r} {!r}".format(sid, goal.x, goal.y, goal.theta))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_map(path):
    """Inverse of save_map; returns (grid, slots)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    w, h, res = lines[0].split()
    w, h = int(w), int(h)
    cells = np.zeros((h, w), dtype=bool)
    for iy in range(h):
        row = lines[1 + iy]
        if len(row) != w:
            raise ValueError("row {} has {} cells, expected {}".format(iy, len(row), w))
        cells[iy] = [c == "#" for c in row]
    if lines[1 + h] != "SLOTS":
        raise ValueError("missing SLOTS section")
    slots = []
    for line in lines[2 + h:]:
        if not line:
            continue
        sid, x, y, theta = line.split()
        slots.append((int(sid), Pose(float(x), float(y), float(theta))))
    return OccupancyGrid(cells, float(res)), slots
