"""Analytic Reeds-Shepp shortest paths for a car driving forward and reverse.

The full word catalog is generated from twelve base-word solvers combined
with the time-flip and reflection symmetries. Solvers work in a normalized
frame (start at the origin, unit turning radius); segment lengths are signed,
negative meaning the segment is driven in reverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .vehicle import ControlAction, Direction, Pose, Steering, arc_step

L = Steering.LEFT
S = Steering.STRAIGHT
R = Steering.RIGHT

# Tolerance for snapping inverse-trig arguments at domain boundaries.
_SNAP = 1e-10
# Segments shorter than this (in meters) are dropped from returned paths.
_MIN_SEG = 1e-9


class RsSegment(NamedTuple):
    kind: Steering
    signed_length: float


@dataclass(frozen=True)
class RsPath:
    segments: tuple[RsSegment, ...]
    total_length: float


def _wrap(theta: float) -> float:
    theta = theta % (2.0 * math.pi)
    if theta >= math.pi:
        theta -= 2.0 * math.pi
    return theta


def _polar(x: float, y: float) -> tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _acos(a: float) -> Optional[float]:
    if a > 1.0:
        return 0.0 if a - 1.0 <= _SNAP else None
    if a < -1.0:
        return math.pi if -1.0 - a <= _SNAP else None
    return math.acos(a)


def _asin(a: float) -> Optional[float]:
    if a > 1.0:
        return math.pi / 2.0 if a - 1.0 <= _SNAP else None
    if a < -1.0:
        return -math.pi / 2.0 if -1.0 - a <= _SNAP else None
    return math.asin(a)


# Each solver returns a list of (kind, signed unit length) or None when the
# word family has no solution for the target. Sign already folds in the base
# word's gear pattern, so the time-flip transform is a plain negation.

def _lsl(x, y, phi):
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    v = _wrap(phi - t)
    return [(L, t), (S, u), (L, v)]


def _lsr(x, y, phi):
    rho, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho * rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0)
    t = _wrap(t1 + math.atan2(2.0, u))
    v = _wrap(t - phi)
    return [(L, t), (S, u), (R, v)]


def _lrl(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    a = _acos(rho / 4.0)
    if a is None:
        return None
    t = _wrap(theta + math.pi / 2.0 + a)
    u = _wrap(math.pi - 2.0 * a)
    v = _wrap(phi - t - u)
    return [(L, t), (R, -u), (L, v)]


def _lrl_rev_tail(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    a = _acos(rho / 4.0)
    if a is None:
        return None
    t = _wrap(theta + math.pi / 2.0 + a)
    u = _wrap(math.pi - 2.0 * a)
    v = _wrap(t + u - phi)
    return [(L, t), (R, -u), (L, -v)]


def _lrl_rev_mid(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0 + _SNAP:
        return None
    u = _acos(1.0 - rho * rho / 8.0)
    if u is None or rho < _SNAP:
        return None
    a = _asin(2.0 * math.sin(u) / rho)
    if a is None:
        return None
    t = _wrap(theta + math.pi / 2.0 - a)
    v = _wrap(t - u - phi)
    return [(L, t), (R, u), (L, -v)]


def _lrlrn(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho > 4.0 + _SNAP:
        return None
    if rho <= 2.0:
        a = _acos((rho + 2.0) / 4.0)
        if a is None:
            return None
        t = _wrap(theta + math.pi / 2.0 + a)
        u = _wrap(a)
    else:
        a = _acos((rho - 2.0) / 4.0)
        if a is None:
            return None
        t = _wrap(theta + math.pi / 2.0 - a)
        u = _wrap(math.pi - a)
    v = _wrap(phi - t + 2.0 * u)
    return [(L, t), (R, u), (L, -u), (R, -v)]


def _lrlrp(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    u1 = (20.0 - rho * rho) / 16.0
    if rho > 6.0 or not -_SNAP <= u1 <= 1.0 + _SNAP or rho < _SNAP:
        return None
    u = _acos(u1)
    if u is None:
        return None
    a = _asin(2.0 * math.sin(u) / rho)
    if a is None:
        return None
    t = _wrap(theta + math.pi / 2.0 + a)
    v = _wrap(t - phi)
    return [(L, t), (R, -u), (L, -u), (R, v)]


def _lrsl(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(2.0, u + 2.0)
    t = _wrap(theta + math.pi / 2.0 + a)
    v = _wrap(t - phi + math.pi / 2.0)
    return [(L, t), (R, -math.pi / 2.0), (S, -u), (L, -v)]


def _lsrl(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(u + 2.0, 2.0)
    t = _wrap(theta + math.pi / 2.0 - a)
    v = _wrap(t - phi - math.pi / 2.0)
    return [(L, t), (S, u), (R, math.pi / 2.0), (L, -v)]


def _lrsr(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta + math.pi / 2.0)
    u = rho - 2.0
    v = _wrap(phi - t - math.pi / 2.0)
    return [(L, t), (R, -math.pi / 2.0), (S, -u), (R, -v)]


def _lsrr(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta)
    u = rho - 2.0
    v = _wrap(phi - t - math.pi / 2.0)
    return [(L, t), (S, u), (L, math.pi / 2.0), (R, -v)]


def _lrslr(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 4.0
    a = math.atan2(2.0, u + 4.0)
    t = _wrap(theta + math.pi / 2.0 + a)
    v = _wrap(t - phi)
    return [(L, t), (R, -math.pi / 2.0), (S, -u), (L, -math.pi / 2.0), (R, v)]


_SOLVERS = (_lsl, _lsr, _lrl, _lrl_rev_tail, _lrl_rev_mid, _lrlrn, _lrlrp,
            _lrsl, _lsrl, _lrsr, _lsrr, _lrslr)

_REFLECT = {L: R, S: S, R: L}


def _goal_in_start_frame(start: Pose, goal: Pose,
                         radius: float) -> tuple[float, float, float]:
    dx = goal.x - start.x
    dy = goal.y - start.y
    c = math.cos(start.theta)
    s = math.sin(start.theta)
    return ((c * dx + s * dy) / radius, (-s * dx + c * dy) / radius,
            _wrap(goal.theta - start.theta))


def _candidates(x: float, y: float, phi: float):
    """Yield (word, unit length) for every solvable word, in catalog order."""
    for solver in _SOLVERS:
        for variant in range(4):
            if variant == 0:
                word = solver(x, y, phi)
            elif variant == 1:  # time flip
                word = solver(-x, y, -phi)
                if word is not None:
                    word = [(k, -s) for k, s in word]
            elif variant == 2:  # reflect
                word = solver(x, -y, -phi)
                if word is not None:
                    word = [(_REFLECT[k], s) for k, s in word]
            else:  # both
                word = solver(-x, -y, phi)
                if word is not None:
                    word = [(_REFLECT[k], -s) for k, s in word]
            if word is not None:
                yield word, sum(abs(s) for _, s in word)


def rs_shortest_path(start: Pose, goal: Pose, radius: float) -> RsPath:
    """Shortest Reeds-Shepp path; ties broken by catalog enumeration order."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    x, y, phi = _goal_in_start_frame(start, goal, radius)
    best = None
    best_len = math.inf
    for word, length in _candidates(x, y, phi):
        if length < best_len:
            best = word
            best_len = length
    segments = tuple(RsSegment(k, s * radius) for k, s in best
                     if abs(s * radius) >= _MIN_SEG)
    return RsPath(segments=segments,
                  total_length=sum(abs(s.signed_length) for s in segments))


def rs_length(start: Pose, goal: Pose, radius: float) -> float:
    """Length of the shortest Reeds-Shepp path, without building segments."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    x, y, phi = _goal_in_start_frame(start, goal, radius)
    best = math.inf
    for _, length in _candidates(x, y, phi):
        if length < best:
            best = length
    return best * radius


def rs_all_paths(start: Pose, goal: Pose, radius: float) -> tuple[RsPath, ...]:
    """Every solvable word as a path, shortest first.

    Ties keep catalog enumeration order, so the sequence is deterministic.
    Used to fall back to longer words when the shortest one is obstructed.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    x, y, phi = _goal_in_start_frame(start, goal, radius)
    ranked = sorted((length, idx, word) for idx, (word, length)
                    in enumerate(_candidates(x, y, phi)))
    paths = []
    for _, _, word in ranked:
        segments = tuple(RsSegment(k, s * radius) for k, s in word
                         if abs(s * radius) >= _MIN_SEG)
        paths.append(RsPath(
            segments=segments,
            total_length=sum(abs(s.signed_length) for s in segments)))
    return tuple(paths)


def segment_action(segment: RsSegment) -> ControlAction:
    """Control action that drives the segment (direction from the sign)."""
    d = Direction.FORWARD if segment.signed_length >= 0.0 else Direction.REVERSE
    return ControlAction(d, segment.kind)


def rs_sample(path: RsPath, start: Pose, radius: float,
              step: float) -> list[tuple[Pose, Direction]]:
    """Poses along the path at arc-length intervals <= step, endpoints included.

    Each sample carries the direction of the motion that reaches it; the
    start sample carries the first segment's direction.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    first_dir = (segment_action(path.segments[0]).direction
                 if path.segments else Direction.FORWARD)
    samples = [(start, first_dir)]
    pose = start
    for seg in path.segments:
        action = segment_action(seg)
        length = abs(seg.signed_length)
        n = max(1, math.ceil(length / step))
        for i in range(1, n + 1):
            samples.append((arc_step(pose, action, length * i / n, radius),
                            action.direction))
        pose = samples[-1][0]
    return samples
