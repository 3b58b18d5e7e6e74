"""Kinematic single-track vehicle model, motion primitives, and disk footprint."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (theta + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class Pose:
    """Rear-axle pose (x, y, heading). Heading is normalized to [-pi, pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


class Direction(Enum):
    FORWARD = 1
    REVERSE = -1


class Steering(Enum):
    LEFT = 1
    STRAIGHT = 0
    RIGHT = -1


class ControlAction(NamedTuple):
    direction: Direction
    steering: Steering


# Fixed enumeration order; search tie-breaking depends on it staying stable.
ACTIONS: tuple[ControlAction, ...] = (
    ControlAction(Direction.FORWARD, Steering.LEFT),
    ControlAction(Direction.FORWARD, Steering.STRAIGHT),
    ControlAction(Direction.FORWARD, Steering.RIGHT),
    ControlAction(Direction.REVERSE, Steering.LEFT),
    ControlAction(Direction.REVERSE, Steering.STRAIGHT),
    ControlAction(Direction.REVERSE, Steering.RIGHT),
)


def flip_direction(action: ControlAction) -> ControlAction:
    """Swap Forward and Reverse, keeping steering; time reversal of an arc."""
    d = Direction.REVERSE if action.direction is Direction.FORWARD else Direction.FORWARD
    return ControlAction(d, action.steering)


@dataclass(frozen=True)
class VehicleParams:
    """Vehicle geometry and steering limit.

    All lengths in meters, alpha_max in radians. body_length is bumper to
    bumper; rear_overhang is the distance from the rear axle back to the
    rear bumper, so the body spans [-rear_overhang, body_length -
    rear_overhang] along the longitudinal axis of the rear-axle frame.
    """

    wheelbase: float = 2.7
    body_length: float = 4.4
    body_width: float = 1.8
    rear_overhang: float = 0.8
    alpha_max: float = 0.6
    n_disks: int = 5

    def __post_init__(self):
        if min(self.wheelbase, self.body_length, self.body_width) <= 0.0:
            raise ValueError("vehicle dimensions must be positive")
        if self.body_length <= self.wheelbase:
            raise ValueError("body_length must exceed wheelbase")
        if not 0.0 <= self.rear_overhang < self.body_length:
            raise ValueError("rear_overhang must lie within the body")
        if not 0.0 < self.alpha_max < math.pi / 2.0:
            raise ValueError("alpha_max must be in (0, pi/2)")
        if self.n_disks < 1:
            raise ValueError("n_disks must be at least 1")


@dataclass(frozen=True)
class DiskFootprint:
    """Collision footprint: equal-radius disks centered on the longitudinal axis.

    centers are (x, y) in the rear-axle frame (y is always 0); spacing is the
    full-width coverage chord of one disk, an upper bound on the actual
    distance between consecutive centers.
    """

    centers: tuple[tuple[float, float], ...]
    radius: float
    spacing: float


def min_turning_radius(params: VehicleParams) -> float:
    """Smallest turning radius of the rear axle at full steering lock."""
    return params.wheelbase / math.tan(params.alpha_max)


def arc_step(pose: Pose, action: ControlAction, arc_length: float,
             radius: float) -> Pose:
    """Propagate along one constant-control arc of an explicit turning radius."""
    if arc_length < 0.0:
        raise ValueError("arc_length must be non-negative")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    sgn = float(action.direction.value)
    steer = float(action.steering.value)
    if steer == 0.0:
        return Pose(pose.x + sgn * arc_length * math.cos(pose.theta),
                    pose.y + sgn * arc_length * math.sin(pose.theta),
                    pose.theta)
    theta1 = pose.theta + sgn * steer * arc_length / radius
    k = radius / steer
    return Pose(pose.x + k * (math.sin(theta1) - math.sin(pose.theta)),
                pose.y - k * (math.cos(theta1) - math.cos(pose.theta)),
                theta1)


def integrate_step(pose: Pose, action: ControlAction, arc_length: float,
                   params: VehicleParams) -> Pose:
    """Exact closed-form propagation of one motion primitive.

    Straight segments translate along the heading; Left/Right follow a
    circular arc of the vehicle's minimum turning radius. arc_length is the
    unsigned distance traveled in the action's direction.
    """
    return arc_step(pose, action, arc_length, min_turning_radius(params))


def expand_primitives(pose: Pose, params: VehicleParams,
                      arc_length: float) -> list[tuple[ControlAction, Pose]]:
    """Successor poses for all six control actions, in fixed action order."""
    radius = min_turning_radius(params)
    return [(a, arc_step(pose, a, arc_length, radius)) for a in ACTIONS]


def footprint_disks(params: VehicleParams) -> DiskFootprint:
    """Compute the disk decomposition of the vehicle body rectangle.

    Disk radius and coverage chord follow the n-disk decomposition of an
    l x w rectangle; centers are arranged compactly so the outermost
    full-width chords sit exactly on the bumpers, which keeps the swept
    footprint tight around the body.
    """
    l = params.body_length
    w = params.body_width
    n = params.n_disks
    radius = math.sqrt(l * l / (n * n) + w * w / 4.0)
    spacing = 2.0 * math.sqrt(radius * radius - w * w / 4.0)
    rear = -params.rear_overhang
    front = l - params.rear_overhang
    if n == 1:
        xs = [(rear + front) / 2.0]
    else:
        first = rear + spacing / 2.0
        last = front - spacing / 2.0
        step = (last - first) / (n - 1)
        xs = [first + i * step for i in range(n)]
    centers = tuple((x, 0.0) for x in xs)
    return DiskFootprint(centers=centers, radius=radius, spacing=spacing)


def transform_disks(footprint: DiskFootprint,
                    pose: Pose) -> list[tuple[float, float, float]]:
    """Disk centers in world coordinates, as (x, y, radius) triples."""
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    r = footprint.radius
    return [(pose.x + c * cx - s * cy, pose.y + s * cx + c * cy, r)
            for cx, cy in footprint.centers]
