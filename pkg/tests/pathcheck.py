"""Shared checks for planned paths, used by unit and acceptance tests."""

import math

from parkplan.search import SAMPLE_STEP, edge_cost
from parkplan.vehicle import arc_step, footprint_disks, min_turning_radius
from parkplan.world import compute_distance_field, is_collision_free

CURVATURE_SLACK = 1e-6
REPLAY_TOL = 1e-6


def angle_diff(a, b):
    return (a - b + math.pi) % (2.0 * math.pi) - math.pi


def replay_cost(actions, config):
    """Accumulated penalized cost of an action chain (equals tree-path g)."""
    total, prev = 0.0, None
    for action, arc in actions:
        total += edge_cost(action, arc, prev, config)
        prev = action
    return total


def direction_changes(poses):
    tags = [d for _, d in poses]
    return sum(1 for a, b in zip(tags, tags[1:]) if a is not b)


def path_length(poses):
    return sum(math.hypot(q[0].x - p[0].x, q[0].y - p[0].y)
               for p, q in zip(poses, poses[1:]))


def check_plan_contract(result, grid, params, config, goal=None):
    """Four-part contract of a Found plan.

    (a) every sample collision-free and consecutive samples <= one step
        apart, (b) curvature within the vehicle bound, (c) endpoint within
        goal tolerances when a goal is given, (d) independent replay of the
        action chain reproduces the sampled poses.
    """
    assert result.found, f"expected Found, got {result.status}"
    assert result.poses, "Found plan must carry samples"

    field = compute_distance_field(grid)
    footprint = footprint_disks(params)
    radius = min_turning_radius(params)

    for pose, _ in result.poses:
        assert is_collision_free(pose, footprint, field), \
            f"sample in collision at {pose}"
    for (p, _), (q, _) in zip(result.poses, result.poses[1:]):
        assert math.hypot(q.x - p.x, q.y - p.y) <= SAMPLE_STEP + 1e-9

    # (b) heading change per unit arc length, measured between samples
    kappa_max = 1.0 / radius + CURVATURE_SLACK
    idx = 1
    for action, arc in result.actions:
        n = max(1, math.ceil(arc / SAMPLE_STEP))
        ds = arc / n
        prev_theta = result.poses[idx - 1][0].theta
        for i in range(n):
            theta = result.poses[idx + i][0].theta
            assert abs(angle_diff(theta, prev_theta)) <= kappa_max * ds + 1e-12
            prev_theta = theta
        idx += n

    if goal is not None:
        end = result.poses[-1][0]
        assert math.hypot(end.x - goal.x, end.y - goal.y) <= config.goal_xy_tol
        assert abs(angle_diff(end.theta, goal.theta)) <= config.goal_theta_tol

    # (d) replay: same closed-form propagation, fresh accumulation
    pose = result.start
    idx = 1
    worst = 0.0
    for action, arc in result.actions:
        n = max(1, math.ceil(arc / SAMPLE_STEP))
        for i in range(1, n + 1):
            sample = arc_step(pose, action, arc * i / n, radius)
            recorded = result.poses[idx][0]
            worst = max(worst,
                        math.hypot(sample.x - recorded.x, sample.y - recorded.y),
                        abs(angle_diff(sample.theta, recorded.theta)))
            idx += 1
        pose = sample
    assert idx == len(result.poses), "sample count mismatch with actions"
    assert worst <= REPLAY_TOL, f"replay deviates by {worst}"
